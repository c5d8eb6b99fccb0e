#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "echoscope/config.hpp"
#include "echoscope/pipeline.hpp"

using namespace echoscope;
namespace fs = std::filesystem;

namespace {

const std::string kConfig = ECHOSCOPE_FIXTURE_DIR "/synthetic/config.json";

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("echoscope_test_" + name);
  fs::remove_all(dir);
  fs::remove_all(dir.string() + ".cache");
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_field(const std::vector<Violation>& vs, const std::string& field) {
  for (const auto& v : vs)
    if (v.field.find(field) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("config round-trips through its canonical form") {
  auto c = load_config(kConfig);
  auto again = parse_config(serialize_config(c), c.base_dir);
  CHECK(again == c);
  CHECK(serialize_config(again) == serialize_config(c));
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"platforms": [], "surprise": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"platforms": "Gab"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("validation") {
  auto good = load_config(kConfig);
  CHECK(validate(good).empty());

  auto no_catalog = good;
  no_catalog.catalog = "does/not/exist.csv";
  auto vs = validate(no_catalog);
  CHECK(vs.size() == 1);
  CHECK(has_field(vs, "catalog"));

  auto zero = good;
  zero.analysis.min_urls = 0;
  auto vz = validate(zero);
  CHECK(vz.size() == 1);
  CHECK(has_field(vz, "min_urls"));

  auto bad = load_config(ECHOSCOPE_FIXTURE_DIR "/bad_config.json");
  auto vb = validate(bad);
  CHECK(vb.size() >= 3);
  CHECK(has_field(vb, "catalog"));
  CHECK(has_field(vb, "min_urls"));
  CHECK(has_field(vb, "adapter"));
}

TEST_CASE("full run emits a complete, reproducible bundle") {
  auto out = scratch("full");
  RunOverrides o;
  o.output_dir = out;
  o.threads = 2;
  auto config = load_config(kConfig);
  auto first = run_pipeline(config, o);
  CHECK(first.manifest.size() >= 12);
  for (const char* name : {"table1.csv", "matrix_W.csv", "matrix_R.csv", "heatmap_R.svg", "pagerank.csv",
                           "bias_shares.csv", "top_domains.csv", "similarity_k20.csv", "variance_summary.csv",
                           "data_quality.csv", "run_manifest.json"})
    CHECK_MESSAGE(fs::exists(out / name), name);
  CHECK(slurp(out / "table1.csv") == slurp(ECHOSCOPE_FIXTURE_DIR "/synthetic/golden/table1.csv"));
  for (const auto& f : first.manifest) CHECK(sha256_hex(slurp(out / f.name)) == f.sha256);

  auto manifest = nlohmann::json::parse(slurp(out / "run_manifest.json"));
  CHECK(manifest.contains("config"));

  o.threads = 4;
  auto second = run_pipeline(config, o);
  REQUIRE(second.manifest.size() == first.manifest.size());
  for (std::size_t i = 0; i < first.manifest.size(); ++i) {
    CHECK(first.manifest[i].name == second.manifest[i].name);
    CHECK(first.manifest[i].sha256 == second.manifest[i].sha256);
  }
  CHECK_FALSE(fs::exists(out / "FAILED"));
  fs::remove_all(out);
  fs::remove_all(out.string() + ".cache");
}

TEST_CASE("emit refuses empty bundles and unwritable targets") {
  ReportBundle empty;
  CHECK_THROWS_AS(emit(empty, scratch("empty")), ArgumentError);

  auto config = load_config(kConfig);
  auto bundle = analyze(config, run_ingest(config, 2));
  CHECK_THROWS_AS(emit(bundle, "/proc/echoscope_out"), IoError);
}

TEST_CASE("stages restart from the ingest cache") {
  auto out = scratch("stages");
  RunOverrides o;
  o.output_dir = out;
  auto config = load_config(kConfig);

  CHECK_THROWS_AS(run_pipeline(config, o, Stage::Graph), StageError);
  CHECK(fs::exists(out / "FAILED"));
  CHECK(slurp(out / "FAILED").find("stage: ingest") != std::string::npos);

  run_pipeline(config, o, Stage::Ingest);
  CHECK(fs::exists(out.string() + ".cache"));
  auto g = run_pipeline(config, o, Stage::Graph);
  CHECK(g.bundle.graph);
  CHECK_FALSE(g.bundle.diet);
  CHECK(fs::exists(out / "matrix_R.csv"));
  CHECK_FALSE(fs::exists(out / "FAILED"));

  run_pipeline(config, o, Stage::Diet);
  CHECK(fs::exists(out / "matrix_R.csv"));  // carried over
  CHECK(fs::exists(out / "bias_shares.csv"));
  fs::remove_all(out);
  fs::remove_all(out.string() + ".cache");
}

TEST_CASE("stage names") {
  for (Stage s : {Stage::Ingest, Stage::Graph, Stage::Diet, Stage::Users, Stage::Report})
    CHECK(parse_stage(to_string(s)) == s);
  CHECK_THROWS(parse_stage("bogus"));
}
