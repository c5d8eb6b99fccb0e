#include "echoscope/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "echoscope/error.hpp"
#include "echoscope/timeutil.hpp"

namespace echoscope {

using json = nlohmann::json;

std::filesystem::path RunConfig::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal();
  return (base_dir / p).lexically_normal();
}

namespace {

// Reads an object while tracking which keys were consumed, so leftovers can
// be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }
  void done() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError("missing key '" + key + "' in " + where_);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError("wrong type for '" + key + "' in " + where_);
    }
  }

  template <typename T>
  void maybe(const std::string& key, T& out) {
    if (has(key)) out = get<T>(key);
  }

  template <typename T>
  void maybe(const std::string& key, std::optional<T>& out) {
    if (has(key)) out = get<T>(key);
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

SchemaMapping parse_adapter(const json& j, const std::string& where) {
  Reader r(j, where);
  SchemaMapping m;
  m.format = parse_input_format(r.get<std::string>("format"));
  m.user = r.get<std::string>("user");
  m.timestamp = r.get<std::string>("timestamp");
  if (r.has("timestamp_format")) m.timestamp_format = parse_timestamp_format(r.get<std::string>("timestamp_format"));
  r.maybe("text", m.text);
  r.maybe("community", m.community);
  r.maybe("urls", m.urls);
  r.maybe("extract_urls_from_text", m.extract_urls_from_text);
  r.done();
  return m;
}

json adapter_json(const SchemaMapping& m) {
  json j;
  j["format"] = m.format == InputFormat::Jsonl ? "jsonl" : m.format == InputFormat::Csv ? "csv" : "tsv";
  j["user"] = m.user;
  j["timestamp"] = m.timestamp;
  j["timestamp_format"] = m.timestamp_format == TimestampFormat::Epoch ? "epoch" : "iso8601";
  j["text"] = m.text;
  if (!m.community.empty()) j["community"] = m.community;
  if (!m.urls.empty()) j["urls"] = m.urls;
  j["extract_urls_from_text"] = m.extract_urls_from_text;
  return j;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, std::filesystem::path base_dir) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  RunConfig c;
  c.base_dir = std::move(base_dir);
  Reader r(root, "config");

  if (r.has("adapters")) {
    const json& a = r.at("adapters");
    if (!a.is_object()) throw ConfigError("adapters must be an object");
    for (const auto& [name, spec] : a.items()) c.adapters[name] = parse_adapter(spec, "adapters." + name);
  }

  const json& pls = r.at("platforms");
  if (!pls.is_array()) throw ConfigError("platforms must be an array");
  for (std::size_t k = 0; k < pls.size(); ++k) {
    Reader p(pls[k], "platforms[" + std::to_string(k) + "]");
    PlatformConfig pc;
    pc.id = p.get<std::string>("id");
    pc.files = p.get<std::vector<std::string>>("files");
    pc.adapter = p.get<std::string>("adapter");
    p.maybe("keyword_set", pc.keyword_set);
    p.maybe("keywords", pc.keywords);
    p.maybe("communities", pc.communities);
    p.maybe("communities_file", pc.communities_file);
    p.done();
    c.platforms.push_back(std::move(pc));
  }

  c.catalog = r.get<std::string>("catalog");
  r.maybe("overrides", c.overrides);
  r.maybe("catalog_version", c.catalog_version);
  r.maybe("output_dir", c.output_dir);

  {
    Reader d(r.at("data"), "data");
    c.data.public_suffix_list = d.get<std::string>("public_suffix_list");
    c.data.platform_domains = d.get<std::string>("platform_domains");
    c.data.shorteners = d.get<std::string>("shorteners");
    c.data.exclusions = d.get<std::string>("exclusions");
    d.maybe("keyword_sets", c.data.keyword_sets);
    d.done();
  }

  if (r.has("analysis")) {
    Reader a(r.at("analysis"), "analysis");
    auto& an = c.analysis;
    a.maybe("exclude_extreme_left", an.exclude_extreme_left);
    a.maybe("q_denominator", an.q_denominator);
    a.maybe("similarity_k", an.similarity_k);
    a.maybe("k_values", an.k_values);
    a.maybe("support_mode", an.support_mode);
    a.maybe("min_urls", an.min_urls);
    a.maybe("bins", an.bins);
    a.maybe("variance_bins", an.variance_bins);
    a.maybe("patriots_win_as_scored", an.patriots_win_as_scored);
    a.maybe("max_malformed_fraction", an.max_malformed_fraction);
    if (a.has("pagerank")) {
      Reader pr(a.at("pagerank"), "analysis.pagerank");
      pr.maybe("damping", an.damping);
      pr.maybe("tol", an.tol);
      pr.maybe("max_iter", an.max_iter);
      pr.done();
    }
    if (a.has("monte_carlo")) {
      Reader mc(a.at("monte_carlo"), "analysis.monte_carlo");
      mc.maybe("samples", an.mc_samples);
      mc.maybe("seed", an.mc_seed);
      mc.done();
    }
    a.done();
  }

  if (r.has("time_window")) {
    Reader w(r.at("time_window"), "time_window");
    c.time_window = WindowConfig{w.get<std::string>("start"), w.get<std::string>("end")};
    w.done();
  }
  r.done();
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = std::filesystem::absolute(file).parent_path();
  return parse_config(ss.str(), base);
}

std::string serialize_config(const RunConfig& c) {
  json root;
  json adapters = json::object();
  for (const auto& [name, m] : c.adapters) adapters[name] = adapter_json(m);
  root["adapters"] = adapters;
  json pls = json::array();
  for (const auto& p : c.platforms) {
    json j;
    j["id"] = p.id;
    j["files"] = p.files;
    j["adapter"] = p.adapter;
    if (p.keyword_set) j["keyword_set"] = *p.keyword_set;
    if (p.keywords) j["keywords"] = *p.keywords;
    if (p.communities) j["communities"] = *p.communities;
    if (p.communities_file) j["communities_file"] = *p.communities_file;
    pls.push_back(std::move(j));
  }
  root["platforms"] = pls;
  root["catalog"] = c.catalog;
  if (c.overrides) root["overrides"] = *c.overrides;
  root["catalog_version"] = c.catalog_version;
  root["output_dir"] = c.output_dir;
  root["data"] = {{"public_suffix_list", c.data.public_suffix_list},
                  {"platform_domains", c.data.platform_domains},
                  {"shorteners", c.data.shorteners},
                  {"exclusions", c.data.exclusions},
                  {"keyword_sets", c.data.keyword_sets}};
  const auto& a = c.analysis;
  root["analysis"] = {{"exclude_extreme_left", a.exclude_extreme_left},
                      {"q_denominator", a.q_denominator},
                      {"similarity_k", a.similarity_k},
                      {"k_values", a.k_values},
                      {"support_mode", a.support_mode},
                      {"min_urls", a.min_urls},
                      {"bins", a.bins},
                      {"variance_bins", a.variance_bins},
                      {"pagerank", {{"damping", a.damping}, {"tol", a.tol}, {"max_iter", a.max_iter}}},
                      {"monte_carlo", {{"samples", a.mc_samples}, {"seed", a.mc_seed}}},
                      {"patriots_win_as_scored", a.patriots_win_as_scored},
                      {"max_malformed_fraction", a.max_malformed_fraction}};
  if (c.time_window) root["time_window"] = {{"start", c.time_window->start}, {"end", c.time_window->end}};
  return root.dump(2) + "\n";
}

std::vector<Violation> validate(const RunConfig& c) {
  std::vector<Violation> out;
  auto bad = [&out](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };
  auto need_file = [&](const std::string& field, const std::string& rel) {
    if (rel.empty()) {
      bad(field, "path is empty");
      return false;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(c.resolve(rel), ec)) {
      bad(field, "file not found: " + c.resolve(rel).string());
      return false;
    }
    return true;
  };

  need_file("catalog", c.catalog);
  if (c.overrides) need_file("overrides", *c.overrides);
  need_file("data.public_suffix_list", c.data.public_suffix_list);
  need_file("data.platform_domains", c.data.platform_domains);
  need_file("data.shorteners", c.data.shorteners);
  need_file("data.exclusions", c.data.exclusions);

  std::map<std::string, std::vector<std::string>> keyword_sets;
  bool uses_sets = false;
  for (const auto& p : c.platforms) uses_sets = uses_sets || p.keyword_set.has_value();
  if (uses_sets && need_file("data.keyword_sets", c.data.keyword_sets)) {
    try {
      keyword_sets = load_keyword_sets(c.resolve(c.data.keyword_sets));
    } catch (const Error& e) {
      bad("data.keyword_sets", e.what());
    }
  }

  if (c.platforms.empty()) bad("platforms", "no platforms configured");
  std::set<std::string> ids;
  for (std::size_t k = 0; k < c.platforms.size(); ++k) {
    const auto& p = c.platforms[k];
    const std::string where = "platforms[" + std::to_string(k) + "]";
    if (p.id.empty()) bad(where + ".id", "empty platform id");
    if (!ids.insert(p.id).second) bad(where + ".id", "duplicate platform id " + p.id);
    if (p.files.empty()) bad(where + ".files", "no input files");
    for (std::size_t f = 0; f < p.files.size(); ++f) need_file(where + ".files[" + std::to_string(f) + "]", p.files[f]);
    if (!c.adapters.count(p.adapter)) bad(where + ".adapter", "adapter not registered: " + p.adapter);
    if (p.keyword_set && p.keywords) bad(where, "keyword_set and keywords are mutually exclusive");
    if (p.keyword_set && !keyword_sets.empty() && !keyword_sets.count(*p.keyword_set))
      bad(where + ".keyword_set", "unknown keyword set " + *p.keyword_set);
    if (p.keywords && p.keywords->empty()) bad(where + ".keywords", "empty keyword list");
    if (p.communities && p.communities_file) bad(where, "communities and communities_file are mutually exclusive");
    if (p.communities_file) need_file(where + ".communities_file", *p.communities_file);
  }

  const auto& a = c.analysis;
  if (a.q_denominator != "labeled" && a.q_denominator != "all")
    bad("analysis.q_denominator", "must be 'labeled' or 'all'");
  if (a.support_mode != "pair-union" && a.support_mode != "global-union")
    bad("analysis.support_mode", "must be 'pair-union' or 'global-union'");
  if (a.similarity_k < 1) bad("analysis.similarity_k", "must be >= 1");
  if (a.k_values.empty()) bad("analysis.k_values", "must not be empty");
  for (int k : a.k_values)
    if (k < 1) bad("analysis.k_values", "entries must be >= 1");
  if (a.min_urls < 1) bad("analysis.min_urls", "must be >= 1");
  if (a.bins < 1) bad("analysis.bins", "must be >= 1");
  if (a.variance_bins < 1) bad("analysis.variance_bins", "must be >= 1");
  if (!(a.damping > 0 && a.damping < 1)) bad("analysis.pagerank.damping", "must lie in (0, 1)");
  if (!(a.tol > 0)) bad("analysis.pagerank.tol", "must be > 0");
  if (a.max_iter < 1) bad("analysis.pagerank.max_iter", "must be >= 1");
  if (a.mc_samples < 1) bad("analysis.monte_carlo.samples", "must be >= 1");
  if (!(a.max_malformed_fraction >= 0 && a.max_malformed_fraction <= 1))
    bad("analysis.max_malformed_fraction", "must lie in [0, 1]");

  if (c.time_window) {
    auto s = parse_iso8601(c.time_window->start), e = parse_iso8601(c.time_window->end);
    if (!s) bad("time_window.start", "not an ISO-8601 instant");
    if (!e) bad("time_window.end", "not an ISO-8601 instant");
    if (s && e && *s > *e) bad("time_window", "start is after end");
  }
  if (c.output_dir.empty()) bad("output_dir", "must not be empty");
  return out;
}

}  // namespace echoscope
