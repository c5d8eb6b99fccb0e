#include "echoscope/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "echoscope/text.hpp"

namespace echoscope {

using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

unsigned resolve_threads(unsigned threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

PlatformRegistry registry_for(const RunConfig& config) {
  auto reg = PlatformRegistry::defaults();
  for (const auto& p : config.platforms) reg.add(p.id);
  return reg;
}

std::vector<PlatformId> configured_platforms(const RunConfig& config, PlatformRegistry& reg) {
  std::vector<PlatformId> out;
  for (const auto& p : config.platforms) out.push_back(reg.add(p.id));
  return out;
}

std::optional<TimeWindow> config_window(const RunConfig& config) {
  if (!config.time_window) return std::nullopt;
  auto s = parse_iso8601(config.time_window->start), e = parse_iso8601(config.time_window->end);
  if (!s || !e) throw ConfigError("time_window bounds are not ISO-8601 instants");
  TimeWindow w{*s, *e};
  if (!w.valid()) throw ConfigError("time_window start is after end");
  return w;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& file, std::string_view content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out << content;
  if (!out) throw IoError("write failure on " + file.string());
}

json stats_json(const IngestStats& s) {
  return {{"total_lines", s.read.total_lines},
          {"emitted", s.read.emitted},
          {"skipped", s.read.skipped},
          {"dropped_keyword", s.dropped_keyword},
          {"dropped_window", s.dropped_window},
          {"dropped_community", s.dropped_community},
          {"posts_kept", s.posts_kept},
          {"urls_seen", s.urls_seen},
          {"url_parse_errors", s.url_parse_errors},
          {"invalid_domains", s.invalid_domains},
          {"unexpanded_shorteners", s.unexpanded_shorteners},
          {"links_kept", s.links_kept},
          {"excluded", s.excluded}};
}

IngestStats stats_from_json(const json& j) {
  IngestStats s;
  s.read.total_lines = j.at("total_lines");
  s.read.emitted = j.at("emitted");
  s.read.skipped = j.at("skipped");
  s.dropped_keyword = j.at("dropped_keyword");
  s.dropped_window = j.at("dropped_window");
  s.dropped_community = j.at("dropped_community");
  s.posts_kept = j.at("posts_kept");
  s.urls_seen = j.at("urls_seen");
  s.url_parse_errors = j.at("url_parse_errors");
  s.invalid_domains = j.at("invalid_domains");
  s.unexpanded_shorteners = j.at("unexpanded_shorteners");
  s.links_kept = j.at("links_kept");
  s.excluded = j.at("excluded").get<std::map<std::string, std::size_t>>();
  return s;
}

std::filesystem::path cache_dir_for(const std::filesystem::path& outdir) {
  auto p = outdir;
  if (!p.has_filename()) p = p.parent_path();
  return p.parent_path() / (p.filename().string() + ".cache");
}

void write_cache(const std::filesystem::path& dir, const IngestSnapshot& snap, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  write_links(dir / "links.jsonl", snap.links);
  json meta;
  meta["config_sha256"] = config_hash;
  json platforms = json::array();
  for (const auto& p : snap.platforms) platforms.push_back(p.str());
  meta["platforms"] = platforms;
  json stats = json::object();
  for (const auto& [p, s] : snap.stats) stats[p.str()] = stats_json(s);
  meta["stats"] = stats;
  write_text(dir / "ingest.json", meta.dump(2) + "\n");
}

IngestSnapshot read_cache(const std::filesystem::path& dir, const std::string& config_hash,
                          std::vector<std::string>& warnings) {
  if (!std::filesystem::exists(dir / "ingest.json") || !std::filesystem::exists(dir / "links.jsonl"))
    throw IoError("no cached ingest at " + dir.string() + "; run the ingest stage first");
  json meta = json::parse(read_text(dir / "ingest.json"), nullptr, false);
  if (meta.is_discarded()) throw DataQualityError("corrupt ingest cache metadata");
  if (meta.value("config_sha256", "") != config_hash)
    warnings.push_back("cached ingest was produced by a different config");
  PlatformRegistry reg;
  IngestSnapshot snap;
  for (const auto& p : meta.at("platforms")) snap.platforms.push_back(reg.add(p.get<std::string>()));
  for (const auto& [p, s] : meta.at("stats").items()) snap.stats[reg.add(p)] = stats_from_json(s);
  snap.links = read_links(dir / "links.jsonl", reg);
  return snap;
}

}  // namespace

Stage parse_stage(std::string_view s) {
  auto t = text::to_lower(s);
  if (t == "ingest") return Stage::Ingest;
  if (t == "graph") return Stage::Graph;
  if (t == "diet") return Stage::Diet;
  if (t == "users") return Stage::Users;
  if (t == "report") return Stage::Report;
  if (t == "all") return Stage::All;
  throw ArgumentError("unknown stage: " + std::string(s));
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::All: return "all";
    case Stage::Ingest: return "ingest";
    case Stage::Graph: return "graph";
    case Stage::Diet: return "diet";
    case Stage::Users: return "users";
    case Stage::Report: return "report";
  }
  return "all";
}

RunConfig apply_overrides(RunConfig config, const RunOverrides& o) {
  if (o.window) config.time_window = WindowConfig{format_iso8601(o.window->start), format_iso8601(o.window->end)};
  if (o.k_values) config.analysis.k_values = *o.k_values;
  if (o.output_dir) config.output_dir = o.output_dir->string();
  return config;
}

IngestSnapshot run_ingest(const RunConfig& config, unsigned threads) {
  auto reg = registry_for(config);
  IngestSnapshot snap;
  snap.platforms = configured_platforms(config, reg);

  auto psl = PublicSuffixList::load(config.resolve(config.data.public_suffix_list));
  auto shorteners = ShortenerTable::load(config.resolve(config.data.shorteners));
  auto aliases = PlatformAliasTable::load(config.resolve(config.data.platform_domains), reg);
  if (config.analysis.patriots_win_as_scored) aliases.add("patriots.win", "", reg.add("Scored"));
  auto exclusions = ExclusionRules::load(config.resolve(config.data.exclusions));

  std::map<std::string, std::vector<std::string>> keyword_sets;
  bool need_sets = std::any_of(config.platforms.begin(), config.platforms.end(),
                               [](const PlatformConfig& p) { return p.keyword_set.has_value(); });
  if (need_sets) keyword_sets = load_keyword_sets(config.resolve(config.data.keyword_sets));

  AdapterRegistry adapters;
  for (const auto& [name, m] : config.adapters) adapters.add(name, m);

  const auto window = config_window(config);
  std::vector<PlatformSource> sources;
  for (std::size_t k = 0; k < config.platforms.size(); ++k) {
    const auto& pc = config.platforms[k];
    PlatformSource src;
    src.platform = snap.platforms[k];
    for (const auto& f : pc.files) src.files.push_back({config.resolve(f), pc.adapter, src.platform});
    if (pc.keyword_set) {
      auto it = keyword_sets.find(*pc.keyword_set);
      if (it == keyword_sets.end()) throw ConfigError("unknown keyword set " + *pc.keyword_set);
      src.filters.keywords = KeywordSet(it->second);
    } else if (pc.keywords) {
      src.filters.keywords = KeywordSet(*pc.keywords);
    }
    if (pc.communities) src.filters.communities = CommunityAllowlist(*pc.communities);
    if (pc.communities_file) src.filters.communities = CommunityAllowlist::load(config.resolve(*pc.communities_file));
    src.filters.window = window;
    sources.push_back(std::move(src));
  }

  LinkContext ctx;
  ctx.psl = &psl;
  ctx.shorteners = &shorteners;
  ctx.aliases = &aliases;
  ctx.exclusions = &exclusions;
  ctx.analyzed.insert(snap.platforms.begin(), snap.platforms.end());

  ReadOptions opts;
  opts.max_malformed_fraction = config.analysis.max_malformed_fraction;
  auto result = ingest(sources, adapters, ctx, opts, resolve_threads(threads));
  snap.links = std::move(result.links);
  snap.stats = std::move(result.stats);
  return snap;
}

std::vector<Table1Row> make_table1(const RunConfig& config, const IngestSnapshot& snapshot,
                                   const GraphOutputs& graph, const DietOutputs& diet, const UserOutputs& users) {
  struct Tally {
    std::set<std::string> users, domains;
    std::size_t links = 0;
  };
  std::map<PlatformId, Tally> tallies;
  for (const auto& l : snapshot.links) {
    auto& t = tallies[l.platform];
    ++t.links;
    t.users.insert(l.user_id);
    t.domains.insert(l.domain);
  }
  const auto mode = config.analysis.q_denominator == "all" ? QDenominator::All : QDenominator::Labeled;
  std::vector<Table1Row> rows;
  for (std::size_t k = 0; k < snapshot.platforms.size(); ++k) {
    const auto& p = snapshot.platforms[k];
    Table1Row r;
    r.platform = p;
    const auto& t = tallies[p];
    r.N = t.users.size();
    r.n_u = t.links;
    r.n_d = t.domains.size();
    r.PR = graph.pagerank.at(graph.graph.index_of(p));
    const auto& prof = diet.profiles.at(k);
    try {
      r.q = questionable_fraction(prof, mode);
    } catch (const UndefinedMetricError&) {
      r.q = kNaN;
    }
    auto h = users.histograms.find(p);
    r.sigma2 = h == users.histograms.end() ? kNaN : h->second.sigma2;
    rows.push_back(r);
  }
  return rows;
}

std::string table1_csv(const std::vector<Table1Row>& rows) {
  std::string out = "platform,N,n_u,n_d,PR,q,sigma2\n";
  for (const auto& r : rows) {
    out += text::csv_escape(r.platform.str()) + "," + std::to_string(r.N) + "," + std::to_string(r.n_u) + "," +
           std::to_string(r.n_d) + "," + text::fixed(r.PR) + "," + text::fixed(r.q) + "," + text::fixed(r.sigma2) +
           "\n";
  }
  return out;
}

ReportBundle analyze(const RunConfig& config, const IngestSnapshot& snap, Stage stage) {
  ReportBundle b;
  b.platforms = snap.platforms;
  b.ingest_stats = snap.stats;
  b.config_json = serialize_config(config);
  b.config_hash = sha256_hex(b.config_json);
  b.catalog_version = config.catalog_version;
  b.mc_seed = config.analysis.mc_seed;
  for (const auto& l : snap.links) ++b.links_per_platform[l.platform];

  const bool all = stage == Stage::All || stage == Stage::Report;
  const auto& an = config.analysis;

  if (all || stage == Stage::Graph) {
    GraphOutputs g;
    g.graph = build_graph(snap.platforms, snap.links);
    g.expected = expected_matrix(g.graph);
    g.rescaled = rescale(g.graph);
    g.monte_carlo = monte_carlo_expected(g.graph, static_cast<std::uint64_t>(an.mc_samples), an.mc_seed,
                                         resolve_threads(0));
    g.pagerank = pagerank(g.rescaled, {an.damping, an.tol, an.max_iter});
    b.graph = std::move(g);
  }

  const bool need_catalog = all || stage == Stage::Diet || stage == Stage::Users;
  if (need_catalog) {
    auto psl = PublicSuffixList::load(config.resolve(config.data.public_suffix_list));
    std::optional<std::filesystem::path> overrides;
    if (config.overrides) overrides = config.resolve(*config.overrides);
    b.catalog = load_catalog(config.resolve(config.catalog), psl, overrides, config.catalog_version);
    for (const auto& w : b.catalog->warnings()) b.warnings.push_back("catalog: " + w);
  }

  if (all || stage == Stage::Diet) {
    DietOutputs d;
    d.primary_k = an.similarity_k;
    std::map<PlatformId, DietAccumulator> acc;
    for (const auto& p : snap.platforms) acc.emplace(p, DietAccumulator(p, {an.exclude_extreme_left}));
    for (const auto& l : snap.links) acc.at(l.platform).add(l, *b.catalog);
    for (const auto& p : snap.platforms) {
      d.profiles.push_back(acc.at(p).snapshot());
      if (d.profiles.back().empty()) b.warnings.push_back("no external links for " + p.str());
    }
    std::set<int> ks(an.k_values.begin(), an.k_values.end());
    ks.insert(an.similarity_k);
    const auto mode = an.support_mode == "global-union" ? SupportMode::GlobalUnion : SupportMode::PairUnion;
    for (int k : ks) d.similarity[k] = similarity_network(d.profiles, static_cast<std::size_t>(k), mode);
    b.diet = std::move(d);
  }

  if (all || stage == Stage::Users) {
    UserOutputs u;
    u.bins = static_cast<std::size_t>(an.bins);
    LeaningAccumulator acc({static_cast<std::size_t>(an.min_urls), an.exclude_extreme_left});
    for (const auto& l : snap.links) acc.add(l, *b.catalog);
    u.profiles = acc.profiles();
    for (const auto& p : snap.platforms) {
      auto mine = acc.profiles(p);
      if (mine.empty()) {
        b.warnings.push_back("no qualifying users on " + p.str());
        continue;
      }
      u.histograms.emplace(p, leaning_histogram(mine, u.bins));
      u.variance.emplace(p, per_user_variance_distribution(mine, static_cast<std::size_t>(an.variance_bins)));
    }
    b.users = std::move(u);
  }

  if (b.graph && b.diet && b.users) b.table1 = make_table1(config, snap, *b.graph, *b.diet, *b.users);
  return b;
}

PipelineResult run_pipeline(const RunConfig& input, const RunOverrides& overrides, Stage stage) {
  const RunConfig config = apply_overrides(input, overrides);
  auto violations = validate(config);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
    throw ConfigError(msg);
  }

  PipelineResult result;
  result.output_dir = std::filesystem::absolute(config.output_dir).lexically_normal();
  const auto cache = cache_dir_for(result.output_dir);
  const std::string config_hash = sha256_hex(serialize_config(config));
  Stage current = Stage::Ingest;
  try {
    IngestSnapshot snap;
    std::vector<std::string> cache_warnings;
    if (stage == Stage::All || stage == Stage::Ingest) {
      snap = run_ingest(config, overrides.threads);
      write_cache(cache, snap, config_hash);
      if (stage == Stage::Ingest) return result;
    } else {
      snap = read_cache(cache, config_hash, cache_warnings);
    }
    current = stage == Stage::All ? Stage::Report : stage;
    result.bundle = analyze(config, snap, stage);
    result.bundle.warnings.insert(result.bundle.warnings.begin(), cache_warnings.begin(), cache_warnings.end());
    const bool partial = stage == Stage::Graph || stage == Stage::Diet || stage == Stage::Users;
    result.manifest = emit(result.bundle, result.output_dir, partial);
  } catch (const std::exception& e) {
    std::error_code ec;
    std::filesystem::create_directories(result.output_dir, ec);
    std::ofstream marker(result.output_dir / "FAILED", std::ios::trunc);
    marker << "stage: " << to_string(current) << "\nerror: " << e.what() << "\n";
    throw StageError(current, std::string(to_string(current)) + " stage failed: " + e.what());
  }
  return result;
}

}  // namespace echoscope
