#include <doctest.h>

#include "echoscope/error.hpp"
#include "echoscope/sourcedb.hpp"

using namespace echoscope;

namespace {

const PublicSuffixList& psl() {
  static const auto list = PublicSuffixList::load(ECHOSCOPE_DATA_DIR "/public_suffix_list.dat");
  return list;
}

SourceCatalog fixture_catalog() {
  return load_catalog(ECHOSCOPE_FIXTURE_DIR "/synthetic/catalog.csv", psl(),
                      std::filesystem::path(ECHOSCOPE_FIXTURE_DIR "/synthetic/overrides.csv"), "fixture");
}

}  // namespace

TEST_CASE("bias scores and names") {
  CHECK(bias_score(Bias::ExtremeLeft) == -1.0);
  CHECK(bias_score(Bias::Left) == -0.66);
  CHECK(bias_score(Bias::LeftCenter) == -0.33);
  CHECK(bias_score(Bias::LeastBiased) == 0.0);
  CHECK(bias_score(Bias::RightCenter) == 0.33);
  CHECK(bias_score(Bias::Right) == 0.66);
  CHECK(bias_score(Bias::ExtremeRight) == 1.0);
  CHECK_THROWS_AS(bias_score(Bias::Unreported), NoScoreError);

  for (Bias b : kAllBiases) {
    CHECK(parse_bias(to_string(b)) == b);
    CHECK(mirror(mirror(b)) == b);
    if (b != Bias::Unreported) CHECK(bias_score(mirror(b)) == -bias_score(b));
  }
  CHECK(parse_bias("Center") == Bias::LeastBiased);
  CHECK(parse_bias("RIGHT-CENTER") == Bias::RightCenter);
  CHECK_FALSE(parse_bias("centrist"));
}

TEST_CASE("fixture catalog labels") {
  auto cat = fixture_catalog();
  auto gp = cat.lookup("thegatewaypundit.com");
  CHECK(gp.bias == Bias::ExtremeRight);
  CHECK(gp.questionable);
  CHECK(cat.lookup("cnn.com").bias == Bias::LeftCenter);
  CHECK_FALSE(cat.lookup("cnn.com").questionable);
  CHECK(cat.lookup("foxnews.com").bias == Bias::Right);
  CHECK(cat.lookup("foxnews.com").questionable);
  CHECK(cat.lookup("zerohedge.com").questionable);  // promoted by factuality
  CHECK(cat.lookup("infowars.com").questionable);

  auto unknown = cat.lookup("no-such-outlet.example");
  CHECK(unknown.bias == Bias::Unreported);
  CHECK_FALSE(unknown.questionable);
  CHECK(cat.find("no-such-outlet.example") == nullptr);

  auto pw = cat.lookup("patriots.win");
  CHECK(pw.provenance == Provenance::ManualOverride);
  CHECK_FALSE(pw.note.empty());
  CHECK(cat.version() == "fixture");
}

TEST_CASE("domains are normalized to registrable form") {
  CatalogBuilder b(psl());
  b.add_catalog_table("domain,bias,questionable,factuality\nhttps://WWW.Example.co.uk/path,left,0,high\n");
  auto cat = b.finish();
  CHECK(cat.lookup("example.co.uk").bias == Bias::Left);
}

TEST_CASE("empty and malformed tables") {
  CatalogBuilder empty(psl());
  empty.add_catalog_table("domain,bias,questionable,factuality\n");
  CHECK_THROWS_AS(empty.finish(), EmptyCatalogError);

  CatalogBuilder missing(psl());
  CHECK_THROWS_AS(missing.add_catalog_table("domain,bias,questionable\ncnn.com,left,0\n"), SchemaError);

  CatalogBuilder no_note(psl());
  CHECK_THROWS_AS(no_note.add_override_table("domain,bias,questionable,factuality\nx.com,left,0,high\n"),
                  SchemaError);
}

TEST_CASE("overrides win and duplicates warn") {
  CatalogBuilder b(psl());
  b.add_catalog_table(
      "domain,bias,questionable,factuality\n"
      "a.com,left,0,high\n"
      "a.com,right,1,low\n"
      "b.com,nonsense,0,high\n"
      "c.com,least-biased,0,high\n");
  b.add_override_table("domain,bias,questionable,factuality,note\nc.com,right,1,low,checked by hand\n");
  auto cat = b.finish();
  CHECK(cat.lookup("a.com").bias == Bias::Left);
  CHECK(cat.lookup("c.com").bias == Bias::Right);
  CHECK(cat.lookup("c.com").provenance == Provenance::ManualOverride);
  CHECK(cat.find("b.com") == nullptr);
  CHECK(cat.warnings().size() >= 2);
}

TEST_CASE("fixture duplicates are reported") {
  auto cat = fixture_catalog();
  bool reuters = false;
  for (const auto& w : cat.warnings()) reuters = reuters || w.find("reuters.com") != std::string::npos;
  CHECK(reuters);
}

TEST_CASE("serialization is canonical") {
  auto a = fixture_catalog();
  auto b = fixture_catalog();
  CHECK(a.serialize() == b.serialize());
  std::size_t total = 0;
  for (const auto& [bias, n] : a.counts()) total += n;
  CHECK(total == a.size());
}
