#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoscope/ingest.hpp"

namespace echoscope {

struct PlatformConfig {
  std::string id;
  std::vector<std::string> files;
  std::string adapter;
  std::optional<std::string> keyword_set;
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::vector<std::string>> communities;
  std::optional<std::string> communities_file;

  friend bool operator==(const PlatformConfig&, const PlatformConfig&) = default;
};

struct DataPaths {
  std::string public_suffix_list;
  std::string platform_domains;
  std::string shorteners;
  std::string exclusions;
  std::string keyword_sets;

  friend bool operator==(const DataPaths&, const DataPaths&) = default;
};

struct AnalysisConfig {
  bool exclude_extreme_left = true;
  std::string q_denominator = "labeled";  // labeled | all
  int similarity_k = 20;
  std::vector<int> k_values = {10, 20, 30, 50};
  std::string support_mode = "pair-union";  // pair-union | global-union
  int min_urls = 10;
  int bins = 40;
  int variance_bins = 20;
  double damping = 0.85;
  double tol = 1e-12;
  int max_iter = 10000;
  std::int64_t mc_samples = 2000;
  std::uint64_t mc_seed = 42;
  bool patriots_win_as_scored = false;
  double max_malformed_fraction = 0.5;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct WindowConfig {
  std::string start;
  std::string end;

  friend bool operator==(const WindowConfig&, const WindowConfig&) = default;
};

/// Everything a run needs. Relative paths resolve against base_dir (the
/// directory holding the config file), which is not part of the
/// serialized form.
struct RunConfig {
  std::map<std::string, SchemaMapping> adapters;
  std::vector<PlatformConfig> platforms;
  std::string catalog;
  std::optional<std::string> overrides;
  std::string catalog_version;
  DataPaths data;
  AnalysisConfig analysis;
  std::optional<WindowConfig> time_window;
  std::string output_dir;

  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& relative) const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.adapters == b.adapters && a.platforms == b.platforms && a.catalog == b.catalog &&
           a.overrides == b.overrides && a.catalog_version == b.catalog_version && a.data == b.data &&
           a.analysis == b.analysis && a.time_window == b.time_window && a.output_dir == b.output_dir;
  }
};

/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
RunConfig parse_config(std::string_view json_text, std::filesystem::path base_dir = {});
RunConfig load_config(const std::filesystem::path& file);

/// Canonical pretty-printed JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

struct Violation {
  std::string field;
  std::string message;
};

/// Reports every problem found; never throws.
std::vector<Violation> validate(const RunConfig& config);

}  // namespace echoscope
