#include <doctest.h>

#include <cmath>
#include <random>

#include "echoscope/config.hpp"
#include "echoscope/error.hpp"
#include "echoscope/leaning.hpp"
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
        "el.com,extreme-left,0,mixed\n"
        "l.com,left,0,high\n"
        "c.com,least-biased,0,high\n"
        "r.com,right,1,low\n"
        "er.com,extreme-right,1,low\n");
    return b.finish();
  }();
  return cat;
}

void add(std::vector<LinkRecord>& out, const std::string& user, const std::string& domain, int n,
         const std::string& platform = "P") {
  for (int i = 0; i < n; ++i) {
    LinkRecord l;
    l.platform = PlatformId(platform);
    l.user_id = user;
    l.domain = domain;
    out.push_back(l);
  }
}

UserProfile at(double x) {
  UserProfile u;
  u.platform = PlatformId("P");
  u.x = x;
  return u;
}

}  // namespace

TEST_CASE("user mean and variance") {
  std::vector<LinkRecord> links;
  add(links, "right", "r.com", 10);
  add(links, "split", "l.com", 5);
  add(links, "split", "r.com", 5);
  add(links, "short", "r.com", 9);
  add(links, "short", "unlabeled.org", 5);
  auto users = user_scores(links, catalog());
  REQUIRE(users.size() == 2);
  CHECK(users[0].user_id == "right");
  CHECK(users[0].x == doctest::Approx(0.66));
  CHECK(users[0].v == doctest::Approx(0.0));
  CHECK(users[0].questionable_count == 10);
  CHECK(users[1].user_id == "split");
  CHECK(users[1].x == doctest::Approx(0.0));
  CHECK(users[1].v == doctest::Approx(0.4356));
}

TEST_CASE("platform links do not score") {
  std::vector<LinkRecord> links;
  add(links, "u", "r.com", 10);
  links.back().target_platform = PlatformId("Q");
  CHECK(user_scores(links, catalog()).empty());
}

TEST_CASE("extreme-left handling") {
  std::vector<LinkRecord> links;
  add(links, "all_el", "el.com", 10);
  add(links, "mostly_r", "r.com", 9);
  add(links, "mostly_r", "el.com", 1);

  auto excluded = user_scores(links, catalog(), LeaningOptions{10, true});
  CHECK(excluded.empty());

  auto included = user_scores(links, catalog(), LeaningOptions{10, false});
  REQUIRE(included.size() == 2);
  CHECK(included[0].user_id == "all_el");
  CHECK(included[0].x == doctest::Approx(-1.0));
  CHECK(included[1].x == doctest::Approx((9 * 0.66 - 1.0) / 10));

  auto low = user_scores(links, catalog(), LeaningOptions{9, true});
  REQUIRE(low.size() == 1);
  CHECK(low[0].n == 9);
}

TEST_CASE("sharded accumulation matches serial") {
  std::vector<LinkRecord> links;
  std::mt19937 rng(4);
  const char* domains[] = {"el.com", "l.com", "c.com", "r.com", "er.com", "x.org"};
  for (int i = 0; i < 3000; ++i) add(links, "u" + std::to_string(rng() % 50), domains[rng() % 6], 1);
  LeaningAccumulator a, b, serial;
  for (std::size_t i = 0; i < links.size(); ++i) {
    (i % 3 ? a : b).add(links[i], catalog());
    serial.add(links[i], catalog());
  }
  auto merged = a.merge(b).profiles();
  auto expect = serial.profiles();
  REQUIRE(merged.size() == expect.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    CHECK(merged[i].user_id == expect[i].user_id);
    CHECK(merged[i].n == expect[i].n);
    CHECK(merged[i].x == expect[i].x);
    CHECK(merged[i].v == expect[i].v);
  }
}

TEST_CASE("histogram and population spread") {
  std::vector<UserProfile> same(5, at(0.33));
  auto h = leaning_histogram(same, 40);
  CHECK(h.sigma2 == doctest::Approx(0.0));
  CHECK(h.n_users == 5);
  CHECK(h.bin_edges.size() == 41);

  std::vector<UserProfile> poles = {at(-1), at(-1), at(1), at(1)};
  auto hp = leaning_histogram(poles, 40);
  CHECK(hp.sigma2 == doctest::Approx(1.0));
  CHECK(hp.users.front() == 2);
  CHECK(hp.users.back() == 2);  // last bin is closed

  CHECK_THROWS_AS(leaning_histogram({}, 40), EmptyProfileError);
  CHECK_THROWS_AS(leaning_histogram(poles, 0), ArgumentError);
}

TEST_CASE("population variance is numerically stable") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> d(1e6, 0.5);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = d(rng);
  // Welford as an independent reference.
  double mean = 0, m2 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double delta = xs[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (xs[i] - mean);
  }
  CHECK(population_variance(xs) == doctest::Approx(m2 / static_cast<double>(xs.size())).epsilon(1e-9));
  CHECK_THROWS_AS(population_variance({}), EmptyProfileError);
}

TEST_CASE("variance distribution and quantiles") {
  std::vector<UserProfile> users;
  for (double v : {0.1, 0.4, 0.2, 0.9}) {
    auto u = at(0);
    u.v = v;
    users.push_back(u);
  }
  auto s = per_user_variance_distribution(users, 20);
  double mass = 0;
  for (std::size_t i = 0; i < s.density.size(); ++i) mass += s.density[i] * (s.bin_edges[i + 1] - s.bin_edges[i]);
  CHECK(mass == doctest::Approx(1.0));
  CHECK(s.q1 == doctest::Approx(0.175));
  CHECK(s.median == doctest::Approx(0.3));
  CHECK(s.q3 == doctest::Approx(0.525));
  CHECK(s.iqr() == doctest::Approx(0.35));
  CHECK(quantile({5}, 0.3) == 5);
}

TEST_CASE("Jensen-Shannon divergence") {
  CHECK(jensen_shannon({1, 2, 3}, {2, 4, 6}) == doctest::Approx(0.0));
  CHECK(jensen_shannon({1, 0}, {0, 1}) == doctest::Approx(1.0));
  const double h = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(jensen_shannon({0.5, 0.5}, {1, 0}) == doctest::Approx(h - 0.5));
  CHECK(jensen_shannon({0.5, 0.5}, {1, 0}) == doctest::Approx(jensen_shannon({1, 0}, {0.5, 0.5})));
  CHECK_THROWS_AS(jensen_shannon({1, 2}, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(jensen_shannon({0, 0}, {1, 2}), ArgumentError);
}

TEST_CASE("raising min_urls never admits more users") {
  auto config = load_config(ECHOSCOPE_FIXTURE_DIR "/synthetic/config.json");
  auto snap = run_ingest(config, 2);
  auto cat = load_catalog(config.resolve(config.catalog), psl(), std::filesystem::path(config.resolve(*config.overrides)));
  std::size_t prev = SIZE_MAX;
  for (std::size_t m : {1, 5, 10, 15, 25, 40}) {
    auto n = user_scores(snap.links, cat, LeaningOptions{m, true}).size();
    CHECK(n <= prev);
    prev = n;
  }
  CHECK(prev < user_scores(snap.links, cat, LeaningOptions{1, true}).size());
}
