#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "echoscope/platform.hpp"
#include "echoscope/timeutil.hpp"
#include "echoscope/urlkit.hpp"

namespace echoscope {

struct PostRecord {
  PlatformId platform;
  std::string user_id;
  Timestamp timestamp;
  std::string text;  // mapped text fields joined by a single space
  std::optional<std::string> community;
  std::vector<std::string> raw_urls;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

enum class InputFormat { Jsonl, Csv, Tsv };
enum class TimestampFormat { Iso8601, Epoch };

/// Throws ConfigError for unknown tags.
InputFormat parse_input_format(std::string_view tag);
TimestampFormat parse_timestamp_format(std::string_view tag);

/// Declarative mapping from one dump schema onto PostRecord. For JSONL,
/// field names are dotted paths; a segment ending in "[]" maps over an
/// array ("entities.urls[].expanded_url"). For delimited tables they are
/// column names.
struct SchemaMapping {
  InputFormat format = InputFormat::Jsonl;
  std::string user;
  std::string timestamp;
  TimestampFormat timestamp_format = TimestampFormat::Iso8601;
  std::vector<std::string> text;
  std::string community;  // empty: platform has no communities
  std::string urls;       // empty: no dedicated URL field
  bool extract_urls_from_text = true;

  friend bool operator==(const SchemaMapping&, const SchemaMapping&) = default;
};

class AdapterRegistry {
 public:
  void add(std::string name, SchemaMapping mapping);
  const SchemaMapping* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::map<std::string, SchemaMapping, std::less<>>& entries() const noexcept { return adapters_; }

 private:
  std::map<std::string, SchemaMapping, std::less<>> adapters_;
};

struct SourceDescriptor {
  std::filesystem::path path;
  std::string adapter;
  PlatformId platform;
};

struct ReadOptions {
  // Abort with DataQualityError when skipped / total exceeds this.
  double max_malformed_fraction = 0.5;
};

struct ReadStats {
  std::size_t total_lines = 0;  // non-blank data lines
  std::size_t emitted = 0;
  std::size_t skipped = 0;

  ReadStats& operator+=(const ReadStats& o) {
    total_lines += o.total_lines;
    emitted += o.emitted;
    skipped += o.skipped;
    return *this;
  }
};

/// Pull-based reader over one dump. Malformed lines are counted and
/// skipped; the malformed-fraction check runs once the input is exhausted.
class RecordReader {
 public:
  RecordReader(const SourceDescriptor& source, const AdapterRegistry& adapters,
               ReadOptions options = {});
  RecordReader(std::unique_ptr<std::istream> input, SchemaMapping mapping, PlatformId platform,
               ReadOptions options = {});
  ~RecordReader();
  RecordReader(RecordReader&&) noexcept;
  RecordReader& operator=(RecordReader&&) noexcept;

  std::optional<PostRecord> next();
  const ReadStats& stats() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: materializes every record of one source.
std::vector<PostRecord> read_records(const SourceDescriptor& source, const AdapterRegistry& adapters,
                                     ReadStats* stats = nullptr, ReadOptions options = {});

/// Lowercase keywords. A keyword written "#tag" only matches hashtags; a bare
/// keyword matches the token whether or not it carries a '#'.
class KeywordSet {
 public:
  KeywordSet() = default;
  explicit KeywordSet(const std::vector<std::string>& keywords);
  bool empty() const noexcept { return words_.empty(); }
  const std::set<std::string>& words() const noexcept { return words_; }

 private:
  std::set<std::string> words_;
};

std::map<std::string, std::vector<std::string>> load_keyword_sets(const std::filesystem::path& file);

bool keyword_match(const PostRecord& record, const KeywordSet& keywords);
bool in_window(const PostRecord& record, const TimeWindow& window);

/// Case-insensitive exact community names.
class CommunityAllowlist {
 public:
  CommunityAllowlist() = default;
  explicit CommunityAllowlist(const std::vector<std::string>& names);
  static CommunityAllowlist load(const std::filesystem::path& file);
  bool contains(std::string_view community) const;
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::set<std::string> names_;
};

/// True when no allowlist applies or the record's community is listed.
bool community_allowed(const PostRecord& record, const CommunityAllowlist* allowlist);

/// Glob over domain names; '*' matches any run of characters.
bool domain_glob_match(std::string_view pattern, std::string_view domain);

struct ExclusionRule {
  std::string category;
  std::string pattern;  // domain glob, or "@self"
  bool self_link() const noexcept { return pattern == "@self"; }
};

class ExclusionRules {
 public:
  ExclusionRules() = default;
  explicit ExclusionRules(std::vector<ExclusionRule> rules);
  static ExclusionRules load(const std::filesystem::path& file);
  static ExclusionRules parse(std::string_view contents);
  const std::vector<ExclusionRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<ExclusionRule> rules_;
};

struct ExclusionDecision {
  bool keep = true;
  std::string category;  // set when dropped

  static ExclusionDecision kept() { return {}; }
  static ExclusionDecision drop(std::string category) { return {false, std::move(category)}; }
};

/// First matching rule wins.
ExclusionDecision apply_exclusions(const PlatformId& source, std::string_view domain,
                                   const std::optional<PlatformId>& target,
                                   const ExclusionRules& rules);

/// Relevance filters for one platform.
struct PlatformFilters {
  std::optional<KeywordSet> keywords;
  std::optional<CommunityAllowlist> communities;
  std::optional<TimeWindow> window;
};

struct IngestConfig {
  std::map<PlatformId, PlatformFilters> filters;
  ExclusionRules exclusion_rules;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// Counters for one platform; all fields are additive so per-shard results
/// merge by summation.
struct IngestStats {
  ReadStats read;
  std::size_t dropped_keyword = 0;
  std::size_t dropped_window = 0;
  std::size_t dropped_community = 0;
  std::size_t posts_kept = 0;
  std::size_t urls_seen = 0;
  std::size_t url_parse_errors = 0;
  std::size_t invalid_domains = 0;
  std::size_t unexpanded_shorteners = 0;
  std::size_t links_kept = 0;
  std::map<std::string, std::size_t> excluded;  // by category

  IngestStats& operator+=(const IngestStats& o);
};

/// Everything needed to turn raw URLs into LinkRecords.
struct LinkContext {
  const PublicSuffixList* psl = nullptr;
  const ShortenerTable* shorteners = nullptr;
  const PlatformAliasTable* aliases = nullptr;
  const ExclusionRules* exclusions = nullptr;
  // Platforms analyzed in this run; links to any other platform are dropped.
  std::set<PlatformId> analyzed;
};

/// Applies the platform's filters to one record. Returns false (and bumps
/// the matching counter) when the record is filtered out.
bool passes_filters(const PostRecord& record, const PlatformFilters& filters, IngestStats& stats);

/// Normalizes, reduces and classifies every URL of a kept record.
void extract_links(const PostRecord& record, const LinkContext& context, IngestStats& stats,
                   std::vector<LinkRecord>& out);

struct PlatformSource {
  PlatformId platform;
  std::vector<SourceDescriptor> files;
  PlatformFilters filters;
};

struct IngestResult {
  std::vector<LinkRecord> links;  // grouped by source order, file order within
  std::map<PlatformId, IngestStats> stats;
};

/// Runs every source, optionally on `threads` workers. The result is
/// independent of the thread count.
IngestResult ingest(const std::vector<PlatformSource>& sources, const AdapterRegistry& adapters,
                    const LinkContext& context, ReadOptions options = {}, unsigned threads = 1);

/// One LinkRecord per line (JSON), for restarting later stages.
void write_links(const std::filesystem::path& file, const std::vector<LinkRecord>& links);
std::vector<LinkRecord> read_links(const std::filesystem::path& file, PlatformRegistry& registry);

}  // namespace echoscope
