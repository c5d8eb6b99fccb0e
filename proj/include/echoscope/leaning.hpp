#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "echoscope/platform.hpp"
#include "echoscope/sourcedb.hpp"
#include "echoscope/urlkit.hpp"

namespace echoscope {

struct LeaningOptions {
  std::size_t min_urls = 10;
  bool exclude_extreme_left = true;
};

struct UserProfile {
  PlatformId platform;
  std::string user_id;
  std::size_t n = 0;  // bias-scored URLs
  double x = 0;       // mean score
  double v = 0;       // population variance of the scores
  std::size_t questionable_count = 0;
};

/// Per-(platform, user) score tallies. Scores take seven discrete values,
/// so counting per category keeps merges exact and order-free.
class LeaningAccumulator {
 public:
  explicit LeaningAccumulator(LeaningOptions options = {}) : options_(options) {}

  /// External links to labeled domains only; others are ignored.
  void add(const LinkRecord& link, const SourceCatalog& catalog);
  LeaningAccumulator& merge(const LeaningAccumulator& other);

  /// Users meeting min_urls, ordered by platform then user id.
  std::vector<UserProfile> profiles() const;
  std::vector<UserProfile> profiles(const PlatformId& platform) const;

 private:
  struct Tally {
    std::array<std::uint64_t, 7> by_bias{};
    std::uint64_t questionable = 0;
  };
  static UserProfile summarize(const PlatformId& p, const std::string& user, const Tally& t);

  LeaningOptions options_;
  std::map<std::pair<PlatformId, std::string>, Tally> tallies_;
};

std::vector<UserProfile> user_scores(const std::vector<LinkRecord>& links, const SourceCatalog& catalog,
                                     LeaningOptions options = {});

/// Population variance, two-pass. Throws EmptyProfileError on no data.
double population_variance(const std::vector<double>& xs);

struct LeaningDistribution {
  PlatformId platform;
  std::vector<double> bin_edges;  // bins + 1 edges over [-1, 1]
  std::vector<std::size_t> users;
  std::vector<std::size_t> questionable;
  std::size_t n_users = 0;
  double sigma2 = 0;
};

/// Uniform bins over [-1, 1], last bin closed. Throws EmptyProfileError
/// without profiles and ArgumentError for bins < 1.
LeaningDistribution leaning_histogram(const std::vector<UserProfile>& profiles, std::size_t bins = 40);

struct VarianceSummary {
  PlatformId platform;
  std::vector<double> bin_edges;  // over [0, 1]
  std::vector<double> density;    // integrates to 1
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double iqr() const noexcept { return q3 - q1; }
};

VarianceSummary per_user_variance_distribution(const std::vector<UserProfile>& profiles, std::size_t bins = 20);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> xs, double q);

/// Jensen-Shannon divergence (log base 2) of two histograms over the same
/// bins; each is normalized first.
double jensen_shannon(const std::vector<double>& h1, const std::vector<double>& h2);

}  // namespace echoscope
