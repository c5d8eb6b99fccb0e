#include "echoscope/leaning.hpp"

#include <algorithm>
#include <cmath>

#include "echoscope/error.hpp"

namespace echoscope {

namespace {

constexpr std::array<Bias, 7> kScored = {Bias::ExtremeLeft, Bias::Left,  Bias::LeftCenter,  Bias::LeastBiased,
                                         Bias::RightCenter, Bias::Right, Bias::ExtremeRight};

std::size_t bin_of(double x, double lo, double hi, std::size_t bins) {
  if (x >= hi) return bins - 1;
  if (x <= lo) return 0;
  auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
  return std::min(k, bins - 1);
}

std::vector<double> edges(double lo, double hi, std::size_t bins) {
  std::vector<double> e(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  return e;
}

}  // namespace

void LeaningAccumulator::add(const LinkRecord& link, const SourceCatalog& catalog) {
  if (link.target_platform) return;
  const DomainLabel* label = catalog.find(link.domain);
  if (!label || label->bias == Bias::Unreported) return;
  if (label->bias == Bias::ExtremeLeft && options_.exclude_extreme_left) return;
  auto& t = tallies_[{link.platform, link.user_id}];
  ++t.by_bias[static_cast<std::size_t>(label->bias)];
  if (label->questionable) ++t.questionable;
}

LeaningAccumulator& LeaningAccumulator::merge(const LeaningAccumulator& other) {
  for (const auto& [key, t] : other.tallies_) {
    auto& mine = tallies_[key];
    for (std::size_t k = 0; k < mine.by_bias.size(); ++k) mine.by_bias[k] += t.by_bias[k];
    mine.questionable += t.questionable;
  }
  return *this;
}

UserProfile LeaningAccumulator::summarize(const PlatformId& p, const std::string& user, const Tally& t) {
  UserProfile u{p, user, 0, 0, 0, static_cast<std::size_t>(t.questionable)};
  double sum = 0;
  for (std::size_t k = 0; k < kScored.size(); ++k) {
    u.n += t.by_bias[k];
    sum += static_cast<double>(t.by_bias[k]) * bias_score(kScored[k]);
  }
  if (u.n == 0) return u;
  u.x = sum / static_cast<double>(u.n);
  double ss = 0;
  for (std::size_t k = 0; k < kScored.size(); ++k) {
    const double d = bias_score(kScored[k]) - u.x;
    ss += static_cast<double>(t.by_bias[k]) * d * d;
  }
  u.v = ss / static_cast<double>(u.n);
  return u;
}

std::vector<UserProfile> LeaningAccumulator::profiles() const {
  std::vector<UserProfile> out;
  for (const auto& [key, t] : tallies_) {
    auto u = summarize(key.first, key.second, t);
    if (u.n >= options_.min_urls && u.n > 0) out.push_back(std::move(u));
  }
  return out;
}

std::vector<UserProfile> LeaningAccumulator::profiles(const PlatformId& platform) const {
  auto all = profiles();
  std::erase_if(all, [&](const UserProfile& u) { return u.platform != platform; });
  return all;
}

std::vector<UserProfile> user_scores(const std::vector<LinkRecord>& links, const SourceCatalog& catalog,
                                     LeaningOptions options) {
  LeaningAccumulator acc(options);
  for (const auto& l : links) acc.add(l, catalog);
  return acc.profiles();
}

double population_variance(const std::vector<double>& xs) {
  if (xs.empty()) throw EmptyProfileError("variance of an empty sample");
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size());
}

LeaningDistribution leaning_histogram(const std::vector<UserProfile>& profiles, std::size_t bins) {
  if (bins < 1) throw ArgumentError("histogram needs at least one bin");
  if (profiles.empty()) throw EmptyProfileError("no qualifying users for a leaning histogram");
  LeaningDistribution d;
  d.platform = profiles.front().platform;
  d.bin_edges = edges(-1.0, 1.0, bins);
  d.users.assign(bins, 0);
  d.questionable.assign(bins, 0);
  std::vector<double> xs;
  xs.reserve(profiles.size());
  for (const auto& u : profiles) {
    const auto k = bin_of(u.x, -1.0, 1.0, bins);
    ++d.users[k];
    d.questionable[k] += u.questionable_count;
    xs.push_back(u.x);
  }
  d.n_users = profiles.size();
  d.sigma2 = population_variance(xs);
  return d;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw EmptyProfileError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

VarianceSummary per_user_variance_distribution(const std::vector<UserProfile>& profiles, std::size_t bins) {
  if (bins < 1) throw ArgumentError("density needs at least one bin");
  if (profiles.empty()) throw EmptyProfileError("no profiles for a variance summary");
  VarianceSummary s;
  s.platform = profiles.front().platform;
  s.bin_edges = edges(0.0, 1.0, bins);
  s.density.assign(bins, 0.0);
  std::vector<double> vs;
  for (const auto& u : profiles) {
    ++s.density[bin_of(u.v, 0.0, 1.0, bins)];
    vs.push_back(u.v);
  }
  const double width = 1.0 / static_cast<double>(bins);
  for (double& c : s.density) c /= static_cast<double>(profiles.size()) * width;
  s.median = quantile(vs, 0.5);
  s.q1 = quantile(vs, 0.25);
  s.q3 = quantile(vs, 0.75);
  return s;
}

double jensen_shannon(const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.size() != h2.size() || h1.empty()) throw ArgumentError("histograms use different binning");
  auto normalize = [](const std::vector<double>& h) {
    double total = 0;
    for (double v : h) {
      if (v < 0 || !std::isfinite(v)) throw ArgumentError("histogram entries must be nonnegative");
      total += v;
    }
    if (total == 0) throw ArgumentError("histogram has no mass");
    std::vector<double> p(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) p[k] = h[k] / total;
    return p;
  };
  const auto p = normalize(h1), q = normalize(h2);
  double js = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    if (p[k] > 0) js += 0.5 * p[k] * std::log2(p[k] / m);
    if (q[k] > 0) js += 0.5 * q[k] * std::log2(q[k] / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

}  // namespace echoscope
