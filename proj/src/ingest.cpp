#include "echoscope/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "echoscope/error.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

using json = nlohmann::json;

InputFormat parse_input_format(std::string_view tag) {
  auto t = text::to_lower(tag);
  if (t == "jsonl" || t == "ndjson") return InputFormat::Jsonl;
  if (t == "csv") return InputFormat::Csv;
  if (t == "tsv") return InputFormat::Tsv;
  throw ConfigError("unknown input format tag: " + std::string(tag));
}

TimestampFormat parse_timestamp_format(std::string_view tag) {
  auto t = text::to_lower(tag);
  if (t == "iso8601" || t == "iso") return TimestampFormat::Iso8601;
  if (t == "epoch" || t == "unix") return TimestampFormat::Epoch;
  throw ConfigError("unknown timestamp format: " + std::string(tag));
}

void AdapterRegistry::add(std::string name, SchemaMapping mapping) {
  adapters_.insert_or_assign(std::move(name), std::move(mapping));
}

const SchemaMapping* AdapterRegistry::find(std::string_view name) const {
  auto it = adapters_.find(name);
  return it == adapters_.end() ? nullptr : &it->second;
}

namespace {

// A field value pulled out of a record, independent of the input format.
struct FieldValue {
  enum class Kind { Missing, String, Integer, Float, List, Other } kind = Kind::Missing;
  std::string str;
  double number = 0;
  std::vector<FieldValue> items;
};

FieldValue from_json(const json& v) {
  FieldValue f;
  if (v.is_string()) {
    f.kind = FieldValue::Kind::String;
    f.str = v.get<std::string>();
  } else if (v.is_number_integer()) {
    f.kind = FieldValue::Kind::Integer;
    f.str = v.dump();
    f.number = v.get<double>();
  } else if (v.is_number_float()) {
    f.kind = FieldValue::Kind::Float;
    f.str = v.dump();
    f.number = v.get<double>();
  } else {
    f.kind = FieldValue::Kind::Other;
  }
  return f;
}

FieldValue json_path(const json& obj, std::string_view path) {
  std::vector<const json*> cur{&obj};
  bool is_list = false;
  for (const auto& seg_raw : text::split(path, '.')) {
    std::string_view seg = seg_raw;
    bool arr = seg.size() >= 2 && seg.substr(seg.size() - 2) == "[]";
    std::string key(arr ? seg.substr(0, seg.size() - 2) : seg);
    std::vector<const json*> next;
    for (const json* c : cur) {
      if (!c->is_object()) continue;
      auto it = c->find(key);
      if (it == c->end()) continue;
      if (arr) {
        if (it->is_array()) {
          for (const auto& e : *it) next.push_back(&e);
          is_list = true;
        }
      } else {
        next.push_back(&*it);
      }
    }
    cur = std::move(next);
  }
  if (is_list) {
    FieldValue f;
    f.kind = FieldValue::Kind::List;
    for (const json* e : cur) f.items.push_back(from_json(*e));
    return f;
  }
  if (cur.empty()) return {};
  if (cur.front()->is_array()) {
    FieldValue f;
    f.kind = FieldValue::Kind::List;
    for (const auto& e : *cur.front()) f.items.push_back(from_json(e));
    return f;
  }
  return from_json(*cur.front());
}

// Builds a PostRecord from a field accessor; nullopt when malformed.
template <typename Get>
std::optional<PostRecord> build_record(const SchemaMapping& m, const PlatformId& platform, Get&& get) {
  PostRecord r;
  r.platform = platform;

  auto user = get(m.user);
  if (user.kind == FieldValue::Kind::String || user.kind == FieldValue::Kind::Integer) {
    r.user_id = user.str;
  }
  if (r.user_id.empty()) return std::nullopt;

  auto ts = get(m.timestamp);
  std::optional<Timestamp> parsed;
  if (m.timestamp_format == TimestampFormat::Epoch) {
    if (ts.kind == FieldValue::Kind::String || ts.kind == FieldValue::Kind::Integer ||
        ts.kind == FieldValue::Kind::Float)
      parsed = parse_epoch(ts.str);
  } else if (ts.kind == FieldValue::Kind::String) {
    parsed = parse_iso8601(ts.str);
  }
  if (!parsed) return std::nullopt;
  r.timestamp = *parsed;

  for (const auto& field : m.text) {
    auto v = get(field);
    if (v.kind == FieldValue::Kind::String && !v.str.empty()) {
      if (!r.text.empty()) r.text.push_back(' ');
      r.text += v.str;
    }
  }
  if (!m.community.empty()) {
    auto c = get(m.community);
    if (c.kind == FieldValue::Kind::String && !c.str.empty()) r.community = c.str;
  }
  if (!m.urls.empty()) {
    auto u = get(m.urls);
    auto push = [&r](const FieldValue& v) {
      if (v.kind != FieldValue::Kind::String) return;
      auto t = text::trim(v.str);
      if (!t.empty()) r.raw_urls.emplace_back(t);
    };
    if (u.kind == FieldValue::Kind::List) {
      for (const auto& item : u.items) push(item);
    } else {
      push(u);
    }
  }
  if (m.extract_urls_from_text) {
    for (auto& url : extract_urls(r.text)) r.raw_urls.push_back(std::move(url));
  }
  return r;
}

bool blank(std::string_view line) { return text::trim(line).empty(); }

}  // namespace

struct RecordReader::Impl {
  std::unique_ptr<std::istream> input;
  SchemaMapping mapping;
  PlatformId platform;
  ReadOptions options;
  ReadStats stats;
  std::vector<std::string> header;
  std::map<std::string, std::size_t, std::less<>> column;
  bool header_read = false;
  bool finished = false;
  std::vector<std::string> fields;

  char delimiter() const { return mapping.format == InputFormat::Tsv ? '\t' : ','; }

  void read_header(const std::string& line) {
    if (!text::split_delimited(line, delimiter(), header))
      throw DataQualityError("unparseable header row");
    for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
    auto require = [this](const std::string& name) {
      if (!name.empty() && !column.count(name))
        throw ConfigError("column '" + name + "' missing from table header");
    };
    require(mapping.user);
    require(mapping.timestamp);
    require(mapping.community);
    require(mapping.urls);
    for (const auto& f : mapping.text) require(f);
    header_read = true;
  }

  std::optional<PostRecord> parse_line(const std::string& line) {
    if (mapping.format == InputFormat::Jsonl) {
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
      return build_record(mapping, platform,
                          [&obj](const std::string& path) { return json_path(obj, path); });
    }
    if (!text::split_delimited(line, delimiter(), fields) || fields.size() != header.size())
      return std::nullopt;
    return build_record(mapping, platform, [this](const std::string& name) {
      FieldValue f;
      auto it = column.find(name);
      if (it == column.end()) return f;
      f.kind = FieldValue::Kind::String;
      f.str = fields[it->second];
      return f;
    });
  }

  void finish() {
    finished = true;
    if (stats.total_lines == 0) return;
    double frac = static_cast<double>(stats.skipped) / static_cast<double>(stats.total_lines);
    if (frac > options.max_malformed_fraction) {
      throw DataQualityError("malformed fraction " + text::fixed(frac, 4) + " exceeds threshold " +
                             text::fixed(options.max_malformed_fraction, 4));
    }
  }
};

RecordReader::RecordReader(const SourceDescriptor& source, const AdapterRegistry& adapters,
                           ReadOptions options)
    : impl_(std::make_unique<Impl>()) {
  const SchemaMapping* mapping = adapters.find(source.adapter);
  if (!mapping) throw ConfigError("no adapter registered under '" + source.adapter + "'");
  auto in = std::make_unique<std::ifstream>(source.path, std::ios::binary);
  if (!*in) throw IoError("cannot open " + source.path.string());
  impl_->input = std::move(in);
  impl_->mapping = *mapping;
  impl_->platform = source.platform;
  impl_->options = options;
}

RecordReader::RecordReader(std::unique_ptr<std::istream> input, SchemaMapping mapping,
                           PlatformId platform, ReadOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->input = std::move(input);
  impl_->mapping = std::move(mapping);
  impl_->platform = std::move(platform);
  impl_->options = options;
}

RecordReader::~RecordReader() = default;
RecordReader::RecordReader(RecordReader&&) noexcept = default;
RecordReader& RecordReader::operator=(RecordReader&&) noexcept = default;

std::optional<PostRecord> RecordReader::next() {
  if (impl_->finished) return std::nullopt;
  std::string line;
  while (std::getline(*impl_->input, line)) {
    if (blank(line)) continue;
    if (impl_->mapping.format != InputFormat::Jsonl && !impl_->header_read) {
      impl_->read_header(line);
      continue;
    }
    ++impl_->stats.total_lines;
    if (auto rec = impl_->parse_line(line)) {
      ++impl_->stats.emitted;
      return rec;
    }
    ++impl_->stats.skipped;
  }
  if (impl_->input->bad()) throw IoError("read failure");
  impl_->finish();
  return std::nullopt;
}

const ReadStats& RecordReader::stats() const noexcept { return impl_->stats; }

std::vector<PostRecord> read_records(const SourceDescriptor& source, const AdapterRegistry& adapters,
                                     ReadStats* stats, ReadOptions options) {
  RecordReader reader(source, adapters, options);
  std::vector<PostRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  if (stats) *stats = reader.stats();
  return out;
}

KeywordSet::KeywordSet(const std::vector<std::string>& keywords) {
  for (const auto& k : keywords) {
    auto t = text::to_lower(text::trim(k));
    if (!t.empty() && t != "#") words_.insert(std::move(t));
  }
}

std::map<std::string, std::vector<std::string>> load_keyword_sets(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("keyword set file must be a JSON object");
  std::map<std::string, std::vector<std::string>> out;
  for (auto& [name, list] : j.items()) {
    if (!list.is_array()) throw ConfigError("keyword set '" + name + "' must be an array");
    for (const auto& k : list) out[name].push_back(k.get<std::string>());
  }
  return out;
}

namespace {
bool word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c >= 0x80;
}
}  // namespace

bool keyword_match(const PostRecord& record, const KeywordSet& keywords) {
  const std::string& s = record.text;
  const auto& words = keywords.words();
  std::string token;
  for (std::size_t i = 0; i < s.size();) {
    if (!word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && word_byte(static_cast<unsigned char>(s[i]))) ++i;
    token = text::to_lower(std::string_view(s).substr(start, i - start));
    if (words.count(token)) return true;
    if (start > 0 && s[start - 1] == '#' && words.count("#" + token)) return true;
  }
  return false;
}

bool in_window(const PostRecord& record, const TimeWindow& window) {
  return window.contains(record.timestamp);
}

CommunityAllowlist::CommunityAllowlist(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    auto t = text::trim(n);
    if (!t.empty()) names_.insert(text::to_lower(t));
  }
}

CommunityAllowlist CommunityAllowlist::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty() && t.front() != '#') names.emplace_back(t);
  }
  return CommunityAllowlist(names);
}

bool CommunityAllowlist::contains(std::string_view community) const {
  return names_.count(text::to_lower(community)) > 0;
}

bool community_allowed(const PostRecord& record, const CommunityAllowlist* allowlist) {
  if (!allowlist) return true;
  return record.community && allowlist->contains(*record.community);
}

bool domain_glob_match(std::string_view pattern, std::string_view domain) {
  // Iterative wildcard match with single backtrack point.
  std::size_t p = 0, d = 0, star = std::string_view::npos, mark = 0;
  while (d < domain.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = d;
    } else if (p < pattern.size() && pattern[p] == domain[d]) {
      ++p;
      ++d;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      d = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

ExclusionRules::ExclusionRules(std::vector<ExclusionRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) {
    if (r.self_link()) continue;
    bool ok = !r.pattern.empty() && std::all_of(r.pattern.begin(), r.pattern.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '*' ||
             c == '_';
    });
    if (!ok) throw ConfigError("invalid exclusion pattern: " + r.pattern);
  }
}

ExclusionRules ExclusionRules::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ExclusionRules ExclusionRules::parse(std::string_view contents) {
  std::vector<ExclusionRule> rules;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos) throw ConfigError("exclusion line without a tab: " + std::string(t));
    rules.push_back({std::string(text::trim(t.substr(0, tab))),
                     text::to_lower(text::trim(t.substr(tab + 1)))});
  }
  return ExclusionRules(std::move(rules));
}

ExclusionDecision apply_exclusions(const PlatformId& source, std::string_view domain,
                                   const std::optional<PlatformId>& target,
                                   const ExclusionRules& rules) {
  for (const auto& rule : rules.rules()) {
    if (rule.self_link()) {
      if (target && *target == source) return ExclusionDecision::drop(rule.category);
    } else if (domain_glob_match(rule.pattern, domain)) {
      return ExclusionDecision::drop(rule.category);
    }
  }
  return ExclusionDecision::kept();
}

void IngestConfig::validate() const {
  for (const auto& [platform, f] : filters) {
    if (f.window && !f.window->valid())
      throw ConfigError("time window start after end for " + platform.str());
    if (f.keywords && f.keywords->empty())
      throw ConfigError("empty keyword set for " + platform.str());
  }
}

IngestStats& IngestStats::operator+=(const IngestStats& o) {
  read += o.read;
  dropped_keyword += o.dropped_keyword;
  dropped_window += o.dropped_window;
  dropped_community += o.dropped_community;
  posts_kept += o.posts_kept;
  urls_seen += o.urls_seen;
  url_parse_errors += o.url_parse_errors;
  invalid_domains += o.invalid_domains;
  unexpanded_shorteners += o.unexpanded_shorteners;
  links_kept += o.links_kept;
  for (const auto& [k, v] : o.excluded) excluded[k] += v;
  return *this;
}

bool passes_filters(const PostRecord& record, const PlatformFilters& filters, IngestStats& stats) {
  if (filters.keywords && !keyword_match(record, *filters.keywords)) {
    ++stats.dropped_keyword;
    return false;
  }
  if (filters.window && !in_window(record, *filters.window)) {
    ++stats.dropped_window;
    return false;
  }
  if (filters.communities && !community_allowed(record, &*filters.communities)) {
    ++stats.dropped_community;
    return false;
  }
  ++stats.posts_kept;
  return true;
}

void extract_links(const PostRecord& record, const LinkContext& ctx, IngestStats& stats,
                   std::vector<LinkRecord>& out) {
  for (const auto& raw : record.raw_urls) {
    ++stats.urls_seen;
    NormalizedUrl url;
    try {
      url = normalize_url(raw, ctx.shorteners);
    } catch (const ParseError&) {
      ++stats.url_parse_errors;
      continue;
    }
    std::string domain;
    try {
      domain = ctx.psl->registrable_domain(url.host);
    } catch (const DomainResolutionError&) {
      ++stats.invalid_domains;
      continue;
    }
    if (url.unexpanded_shortener) ++stats.unexpanded_shorteners;
    auto target = ctx.aliases ? ctx.aliases->classify(domain, url.path) : std::nullopt;
    if (ctx.exclusions) {
      auto decision = apply_exclusions(record.platform, domain, target, *ctx.exclusions);
      if (!decision.keep) {
        ++stats.excluded[decision.category];
        continue;
      }
    }
    if (target && !ctx.analyzed.empty() && !ctx.analyzed.count(*target)) {
      ++stats.excluded["other-social"];
      continue;
    }
    ++stats.links_kept;
    out.push_back(LinkRecord{record.platform, record.user_id, record.timestamp, std::move(domain),
                             std::move(target), record.community});
  }
}

namespace {

struct ShardOutput {
  std::vector<LinkRecord> links;
  IngestStats stats;
};

ShardOutput run_shard(const SourceDescriptor& file, const PlatformFilters& filters,
                      const AdapterRegistry& adapters, const LinkContext& ctx, ReadOptions options) {
  ShardOutput out;
  RecordReader reader(file, adapters, options);
  while (auto rec = reader.next()) {
    if (!passes_filters(*rec, filters, out.stats)) continue;
    extract_links(*rec, ctx, out.stats, out.links);
  }
  out.stats.read = reader.stats();
  return out;
}

}  // namespace

IngestResult ingest(const std::vector<PlatformSource>& sources, const AdapterRegistry& adapters,
                    const LinkContext& context, ReadOptions options, unsigned threads) {
  if (!context.psl) throw ArgumentError("ingest requires a public suffix list");
  struct Job {
    const PlatformSource* source;
    const SourceDescriptor* file;
  };
  std::vector<Job> jobs;
  for (const auto& s : sources)
    for (const auto& f : s.files) jobs.push_back({&s, &f});

  std::vector<ShardOutput> outputs(jobs.size());
  threads = std::max(1u, threads);
  for (std::size_t begin = 0; begin < jobs.size(); begin += threads) {
    std::size_t end = std::min(jobs.size(), begin + threads);
    if (threads == 1) {
      outputs[begin] = run_shard(*jobs[begin].file, jobs[begin].source->filters, adapters, context, options);
      continue;
    }
    std::vector<std::future<ShardOutput>> pending;
    for (std::size_t k = begin; k < end; ++k) {
      pending.push_back(std::async(std::launch::async, [&, k] {
        return run_shard(*jobs[k].file, jobs[k].source->filters, adapters, context, options);
      }));
    }
    for (std::size_t k = begin; k < end; ++k) outputs[k] = pending[k - begin].get();
  }

  IngestResult result;
  for (const auto& s : sources) result.stats[s.platform];
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    result.stats[jobs[k].source->platform] += outputs[k].stats;
    auto& links = outputs[k].links;
    result.links.insert(result.links.end(), std::make_move_iterator(links.begin()),
                        std::make_move_iterator(links.end()));
  }
  return result;
}

void write_links(const std::filesystem::path& file, const std::vector<LinkRecord>& links) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  for (const auto& l : links) {
    json j;
    j["platform"] = l.platform.str();
    j["user"] = l.user_id;
    j["ts"] = format_iso8601(l.timestamp);
    j["domain"] = l.domain;
    j["target"] = l.target_platform ? json(l.target_platform->str()) : json(nullptr);
    j["community"] = l.community ? json(*l.community) : json(nullptr);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failure on " + file.string());
}

std::vector<LinkRecord> read_links(const std::filesystem::path& file, PlatformRegistry& registry) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::vector<LinkRecord> links;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataQualityError("corrupt link cache line " + std::to_string(lineno));
    LinkRecord l;
    l.platform = registry.add(j.at("platform").get<std::string>());
    l.user_id = j.at("user").get<std::string>();
    auto ts = parse_iso8601(j.at("ts").get<std::string>());
    if (!ts) throw DataQualityError("bad timestamp in link cache line " + std::to_string(lineno));
    l.timestamp = *ts;
    l.domain = j.at("domain").get<std::string>();
    if (!j.at("target").is_null()) l.target_platform = registry.add(j.at("target").get<std::string>());
    if (!j.at("community").is_null()) l.community = j.at("community").get<std::string>();
    links.push_back(std::move(l));
  }
  return links;
}

}  // namespace echoscope
