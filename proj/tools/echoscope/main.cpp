// Command-line front end: validate, run and compare.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "echoscope/compare.hpp"
#include "echoscope/config.hpp"
#include "echoscope/error.hpp"
#include "echoscope/pipeline.hpp"
#include "echoscope/text.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

int cmd_validate(const std::string& path) {
  echoscope::RunConfig config;
  try {
    config = echoscope::load_config(path);
  } catch (const echoscope::Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kInvalid;
  }
  auto violations = echoscope::validate(config);
  for (const auto& v : violations) std::cout << v.field << ": " << v.message << "\n";
  if (violations.empty()) std::cout << "ok\n";
  return violations.empty() ? kOk : kInvalid;
}

int cmd_run(const std::string& path, const std::string& stage_name, const std::string& window,
            const std::string& k_list, const std::string& output, unsigned threads) {
  echoscope::RunConfig config;
  echoscope::RunOverrides overrides;
  echoscope::Stage stage = echoscope::Stage::All;
  try {
    config = echoscope::load_config(path);
    if (!stage_name.empty()) stage = echoscope::parse_stage(stage_name);
    if (!window.empty()) {
      overrides.window = echoscope::parse_window(window);
      if (!overrides.window) throw echoscope::ConfigError("--window expects START..END in ISO-8601");
    }
    if (!k_list.empty()) {
      std::vector<int> ks;
      for (const auto& part : echoscope::text::split(k_list, ',')) ks.push_back(std::stoi(part));
      overrides.k_values = ks;
    }
    if (!output.empty()) overrides.output_dir = output;
    overrides.threads = threads;
    auto violations = echoscope::validate(echoscope::apply_overrides(config, overrides));
    for (const auto& v : violations) std::cerr << v.field << ": " << v.message << "\n";
    if (!violations.empty()) return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kInvalid;
  }

  try {
    auto result = echoscope::run_pipeline(config, overrides, stage);
    for (const auto& w : result.bundle.warnings) std::cerr << "warning: " << w << "\n";
    if (stage == echoscope::Stage::Ingest) {
      std::cout << "ingest cached next to " << result.output_dir.string() << "\n";
    } else {
      std::cout << "wrote " << result.manifest.size() << " files to " << result.output_dir.string() << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

int cmd_compare(const std::string& a, const std::string& b, int k, bool strict) {
  try {
    echoscope::CompareOptions opt;
    opt.similarity_k = k;
    auto lines = echoscope::compare_bundles(a, b, opt);
    std::cout << echoscope::compare_csv(lines);
    bool all = true;
    for (const auto& l : lines) all = all && l.pass;
    return strict && !all ? kInvalid : kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-platform news-diet and link-ecosystem analysis"};
  app.require_subcommand(1);

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check a run config and report every problem");
  validate->add_option("config", config_path, "Run config (JSON)")->required();

  std::string stage, window, k_list, output;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Run the pipeline and write the report bundle");
  run->add_option("config", config_path, "Run config (JSON)")->required();
  run->add_option("--stage", stage, "Only this stage: ingest|graph|diet|users|report");
  run->add_option("--window", window, "Restrict to START..END (ISO-8601, inclusive)");
  run->add_option("--k", k_list, "Comma-separated top-k values for the similarity sweep");
  run->add_option("--output", output, "Output directory (overrides output_dir)");
  run->add_option("--threads", threads, "Worker threads (0 = auto)");

  std::string bundle_a, bundle_b;
  int k = 20;
  bool strict = false;
  auto* compare = app.add_subcommand("compare", "Rank and distribution agreement between two bundles");
  compare->add_option("bundleA", bundle_a)->required()->check(CLI::ExistingDirectory);
  compare->add_option("bundleB", bundle_b)->required()->check(CLI::ExistingDirectory);
  compare->add_option("--k", k, "Similarity matrix to compare");
  compare->add_flag("--strict", strict, "Exit 1 when a threshold is missed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  if (*validate) return cmd_validate(config_path);
  if (*run) return cmd_run(config_path, stage, window, k_list, output, threads);
  return cmd_compare(bundle_a, bundle_b, k, strict);
}
