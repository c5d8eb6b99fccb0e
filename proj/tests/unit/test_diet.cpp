#include <doctest.h>

#include <cmath>
#include <random>

#include "echoscope/config.hpp"
#include "echoscope/diet.hpp"
#include "echoscope/error.hpp"
#include "echoscope/pipeline.hpp"

using namespace echoscope;

namespace {

const PublicSuffixList& psl() {
  static const auto list = PublicSuffixList::load(ECHOSCOPE_DATA_DIR "/public_suffix_list.dat");
  return list;
}

const SourceCatalog& catalog() {
  static const SourceCatalog cat = [] {
    CatalogBuilder b(psl());
    b.add_catalog_table(
        "domain,bias,questionable,factuality\n"
        "lc.com,left-center,0,high\n"
        "lc2.com,left-center,1,low\n"
        "r.com,right,1,low\n"
        "el.com,extreme-left,0,mixed\n"
        "c.com,least-biased,0,high\n");
    return b.finish("test");
  }();
  return cat;
}

std::vector<LinkRecord> links_to(const std::string& platform, const std::vector<std::pair<std::string, int>>& spec) {
  std::vector<LinkRecord> out;
  for (const auto& [domain, n] : spec)
    for (int i = 0; i < n; ++i) {
      LinkRecord l;
      l.platform = PlatformId(platform);
      l.user_id = "u" + std::to_string(i % 3);
      l.domain = domain;
      out.push_back(l);
    }
  return out;
}

DietProfile profile(const std::string& platform, const std::vector<std::pair<std::string, int>>& spec) {
  return diet_distribution(PlatformId(platform), links_to(platform, spec), catalog());
}

}  // namespace

TEST_CASE("bias shares") {
  auto all_lc = profile("A", {{"lc.com", 7}});
  CHECK(all_lc.bias_shares.at(Bias::LeftCenter) == 1.0);
  CHECK(all_lc.bias_shares.at(Bias::Right) == 0.0);

  auto half = profile("A", {{"lc.com", 5}, {"unknown.org", 5}});
  CHECK(half.bias_shares.at(Bias::Unreported) == 0.5);
  CHECK(half.labeled_urls == 5);

  double sum = 0;
  for (const auto& [b, s] : profile("A", {{"lc.com", 3}, {"r.com", 2}, {"x.net", 4}}).bias_shares) sum += s;
  CHECK(sum == doctest::Approx(1.0));

  auto with_el = profile("A", {{"lc.com", 3}, {"el.com", 2}});
  CHECK(with_el.total_urls == 3);
  CHECK(with_el.excluded_extreme_left == 2);
  auto kept = diet_distribution(PlatformId("A"), links_to("A", {{"lc.com", 3}, {"el.com", 2}}), catalog(),
                                DietOptions{false});
  CHECK(kept.total_urls == 5);
  CHECK(kept.bias_shares.at(Bias::ExtremeLeft) == doctest::Approx(0.4));
}

TEST_CASE("platform links and empty profiles") {
  auto links = links_to("A", {{"lc.com", 2}});
  LinkRecord to_platform = links.front();
  to_platform.target_platform = PlatformId("B");
  links.push_back(to_platform);
  auto p = diet_distribution(PlatformId("A"), links, catalog());
  CHECK(p.total_urls == 2);

  DietAccumulator acc(PlatformId("A"));
  CHECK_THROWS_AS(acc.finish(), EmptyProfileError);
  CHECK(acc.snapshot().empty());
  CHECK_THROWS_AS(acc.add(links_to("B", {{"lc.com", 1}}).front(), catalog()), ArgumentError);
}

TEST_CASE("shards merge to the serial profile") {
  auto links = links_to("A", {{"lc.com", 4}, {"r.com", 3}, {"z.io", 5}});
  DietAccumulator a(PlatformId("A")), b(PlatformId("A"));
  for (std::size_t i = 0; i < links.size(); ++i) (i % 2 ? a : b).add(links[i], catalog());
  auto merged = b.merge(a).finish();
  auto serial = diet_distribution(PlatformId("A"), links, catalog());
  CHECK(merged.bias_counts == serial.bias_counts);
  CHECK(merged.domain_counts == serial.domain_counts);
}

TEST_CASE("top domains") {
  auto p = profile("A", {{"c.com", 1}, {"b.com", 3}, {"a.com", 3}});
  auto top = top_domains(p, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].domain == "a.com");
  CHECK(top[1].domain == "b.com");
  CHECK(top[0].percent == doctest::Approx(300.0 / 7));
  CHECK(top_domains(p, 10).size() == 3);
  CHECK_THROWS_AS(top_domains(p, 0), ArgumentError);
}

TEST_CASE("fixture Scored diet is dominated by patriots.win") {
  auto config = load_config(ECHOSCOPE_FIXTURE_DIR "/synthetic/config.json");
  auto snap = run_ingest(config, 2);
  auto cat = load_catalog(config.resolve(config.catalog), psl(),
                          std::filesystem::path(config.resolve(*config.overrides)));
  std::vector<LinkRecord> scored;
  for (const auto& l : snap.links)
    if (l.platform == PlatformId("Scored")) scored.push_back(l);
  auto top = top_domains(diet_distribution(PlatformId("Scored"), scored, cat), 10);
  REQUIRE_FALSE(top.empty());
  CHECK(top[0].domain == "patriots.win");
  CHECK(top[0].percent == doctest::Approx(58.74).epsilon(0.01));
}

TEST_CASE("questionable fraction") {
  auto p = profile("A", {{"r.com", 65}, {"lc.com", 35}});
  CHECK(questionable_fraction(p) == doctest::Approx(0.65));
  auto p10 = profile("A", {{"r.com", 650}, {"lc.com", 350}});
  CHECK(questionable_fraction(p10) == questionable_fraction(p));

  auto mixed = profile("A", {{"r.com", 1}, {"lc.com", 1}, {"x.org", 2}});
  CHECK(questionable_fraction(mixed, QDenominator::Labeled) == 0.5);
  CHECK(questionable_fraction(mixed, QDenominator::All) == 0.25);

  auto none = profile("A", {{"x.org", 4}});
  CHECK_THROWS_AS(questionable_fraction(none), UndefinedMetricError);
}

TEST_CASE("cosine similarity") {
  auto a = profile("A", {{"d1.com", 4}, {"d2.com", 3}});
  auto b = profile("B", {{"d1.com", 5}});
  std::vector<std::string> support{"d1.com", "d2.com"};
  CHECK(std::abs(cosine_similarity(diet_vector(a, support), diet_vector(b, support)) - 0.8) < 1e-12);
  CHECK(cosine_similarity(diet_vector(a, support), diet_vector(a, support)) == doctest::Approx(1.0));

  auto c = profile("C", {{"d3.com", 2}});
  std::vector<std::string> wide{"d1.com", "d3.com"};
  CHECK(cosine_similarity(diet_vector(b, wide), diet_vector(c, wide)) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(diet_vector(a, support), diet_vector(b, wide)), ArgumentError);
  CHECK_THROWS_AS(cosine_similarity(diet_vector(c, support), diet_vector(a, support)), UndefinedMetricError);

  auto shuffled = diet_vector(a, {"d2.com", "d1.com", "d2.com"});
  CHECK(shuffled.support == support);
}

TEST_CASE("similarity network on three hand-built platforms") {
  std::vector<DietProfile> ps = {profile("A", {{"x.com", 1}, {"y.com", 1}}), profile("B", {{"x.com", 1}}),
                                 profile("C", {{"y.com", 2}, {"z.com", 2}})};
  auto net = similarity_network(ps, 20);
  CHECK(net.similarity(0, 0) == 1.0);
  CHECK(net.similarity(0, 1) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(net.similarity(1, 0) == net.similarity(0, 1));
  CHECK(net.similarity(0, 2) == doctest::Approx(0.5));
  CHECK(net.similarity(1, 2) == 0.0);

  auto k1 = similarity_network(ps, 1);
  // top-1 of A is x.com (name tie-break), of C is y.com.
  CHECK(k1.similarity(0, 2) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(similarity_network({ps[0]}, 20), ArgumentError);
}

TEST_CASE("Kendall tau-b") {
  CHECK(kendall_tau_b({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(kendall_tau_b({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(kendall_tau_b({1, 2, 3, 4, 5, 6}, {2, 1, 4, 3, 6, 5}) == doctest::Approx(0.6));
  CHECK(kendall_tau_b({1, 2, 2, 3, 4}, {1, 3, 2, 2, 5}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(kendall_tau_b({1, 2}, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(kendall_tau_b({1, 1, 1}, {1, 2, 3}), UndefinedMetricError);

  std::mt19937 rng(2);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng() % 10;
    y[i] = rng() % 10;
  }
  CHECK(kendall_tau_b(x, y) == doctest::Approx(kendall_tau_b(y, x)));
  auto t = kendall_tau_b(x, y);
  CHECK((t >= -1 && t <= 1));

  Matrix m(3);
  m(0, 1) = 1;
  m(0, 2) = 2;
  m(1, 2) = 3;
  CHECK(upper_triangle(m) == std::vector<double>{1, 2, 3});
}
