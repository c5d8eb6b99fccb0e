#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "echoscope/config.hpp"
#include "echoscope/diet.hpp"
#include "echoscope/error.hpp"
#include "echoscope/graph.hpp"
#include "echoscope/ingest.hpp"
#include "echoscope/leaning.hpp"
#include "echoscope/sourcedb.hpp"

namespace echoscope {

enum class Stage { All, Ingest, Graph, Diet, Users, Report };

/// Parses "ingest", "graph", "diet", "users" or "report".
Stage parse_stage(std::string_view s);
std::string_view to_string(Stage s);

struct RunOverrides {
  std::optional<TimeWindow> window;
  std::optional<std::vector<int>> k_values;
  std::optional<std::filesystem::path> output_dir;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Applies command-line overrides to a config (window, k list, output).
RunConfig apply_overrides(RunConfig config, const RunOverrides& overrides);

struct Table1Row {
  PlatformId platform;
  std::size_t N = 0;    // distinct users with a kept link
  std::size_t n_u = 0;  // kept links
  std::size_t n_d = 0;  // distinct domains among kept links
  double PR = 0;
  double q = 0;       // NaN when undefined
  double sigma2 = 0;  // NaN when no user qualifies
};

struct GraphOutputs {
  PlatformGraph graph;
  Matrix expected;
  RescaledMatrix rescaled;
  MonteCarloResult monte_carlo;
  std::vector<double> pagerank;
};

struct DietOutputs {
  std::vector<DietProfile> profiles;  // config order
  std::map<int, SimilarityNetwork> similarity;
  int primary_k = 20;
};

struct UserOutputs {
  std::vector<UserProfile> profiles;
  std::map<PlatformId, LeaningDistribution> histograms;
  std::map<PlatformId, VarianceSummary> variance;
  std::size_t bins = 40;
};

/// Result of a run. Optional sections are absent when a stage did not run.
struct ReportBundle {
  std::vector<PlatformId> platforms;
  std::optional<std::vector<Table1Row>> table1;
  std::optional<GraphOutputs> graph;
  std::optional<DietOutputs> diet;
  std::optional<UserOutputs> users;
  std::map<PlatformId, IngestStats> ingest_stats;
  std::map<PlatformId, std::size_t> links_per_platform;
  std::optional<SourceCatalog> catalog;
  std::string config_json;  // effective config, canonical form
  std::string config_hash;  // SHA-256 of config_json
  std::string catalog_version;
  std::uint64_t mc_seed = 0;
  std::vector<std::string> warnings;

  bool empty() const noexcept { return !table1 && !graph && !diet && !users; }
};

/// Ingested links plus their counters; cached between stages.
struct IngestSnapshot {
  std::vector<PlatformId> platforms;
  std::vector<LinkRecord> links;
  std::map<PlatformId, IngestStats> stats;
};

IngestSnapshot run_ingest(const RunConfig& config, unsigned threads = 0);

/// Builds every analysis section from ingested links.
ReportBundle analyze(const RunConfig& config, const IngestSnapshot& snapshot, Stage stage = Stage::All);

/// Table 1 over a complete bundle.
std::vector<Table1Row> make_table1(const RunConfig& config, const IngestSnapshot& snapshot,
                                   const GraphOutputs& graph, const DietOutputs& diet, const UserOutputs& users);
std::string table1_csv(const std::vector<Table1Row>& rows);

struct FileEntry {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Writes the bundle into `outdir` atomically: files go to a staging
/// directory first, which then replaces `outdir`. Returns the manifest.
/// Throws ArgumentError for an empty bundle, IoError when staging fails.
/// With keep_existing, files of a previous bundle in `outdir` that this
/// bundle does not produce are carried over (used by single-stage reruns).
std::vector<FileEntry> emit(const ReportBundle& bundle, const std::filesystem::path& outdir,
                            bool keep_existing = false);

/// Renders every report file in memory, keyed by file name.
std::map<std::string, std::string> render(const ReportBundle& bundle);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

struct PipelineResult {
  ReportBundle bundle;
  std::filesystem::path output_dir;
  std::vector<FileEntry> manifest;
};

/// Runs the configured pipeline, honoring `stage`. Ingested links are cached
/// in "<output_dir>.cache" so later stages can restart from them. On failure
/// a FAILED marker naming the stage is written into the output directory
/// and the error is rethrown wrapped with its stage.
PipelineResult run_pipeline(const RunConfig& config, const RunOverrides& overrides = {}, Stage stage = Stage::All);

/// Error raised by run_pipeline, tagged with the stage that failed.
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& what) : Error(what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

}  // namespace echoscope
