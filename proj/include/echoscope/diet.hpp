#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "echoscope/matrix.hpp"
#include "echoscope/platform.hpp"
#include "echoscope/sourcedb.hpp"
#include "echoscope/urlkit.hpp"

namespace echoscope {

struct DietOptions {
  bool exclude_extreme_left = true;
};

/// News-consumption profile of one platform, built from its links to
/// external (non-platform) domains.
struct DietProfile {
  PlatformId platform;
  std::map<Bias, std::size_t> bias_counts;  // every category, unreported included
  std::map<Bias, double> bias_shares;
  std::map<std::string, std::size_t> domain_counts;
  std::size_t total_urls = 0;
  std::size_t labeled_urls = 0;
  std::size_t questionable_urls = 0;
  std::size_t excluded_extreme_left = 0;  // side count, not part of total_urls

  bool empty() const noexcept { return total_urls == 0; }
};

/// Mergeable tally; merging shards in any order yields the same profile.
class DietAccumulator {
 public:
  DietAccumulator(PlatformId platform, DietOptions options = {});

  /// Links pointing at a platform are ignored. Throws ArgumentError for a
  /// link of another platform.
  void add(const LinkRecord& link, const SourceCatalog& catalog);
  DietAccumulator& merge(const DietAccumulator& other);

  /// Throws EmptyProfileError when nothing was counted.
  DietProfile finish() const;
  /// Same, but an empty profile is returned rather than raised.
  DietProfile snapshot() const;

 private:
  DietProfile p_;
  DietOptions options_;
};

DietProfile diet_distribution(const PlatformId& platform, const std::vector<LinkRecord>& links,
                              const SourceCatalog& catalog, DietOptions options = {});

struct RankedDomain {
  std::string domain;
  std::size_t count = 0;
  double percent = 0;
};

/// Count descending, ties by domain name. Throws ArgumentError for k < 1.
std::vector<RankedDomain> top_domains(const DietProfile& profile, std::size_t k);

enum class QDenominator { Labeled, All };

/// Questionable URLs over catalog-labeled URLs (or over all URLs).
/// Throws UndefinedMetricError when the denominator is zero.
double questionable_fraction(const DietProfile& profile, QDenominator mode = QDenominator::Labeled);

struct DietVector {
  PlatformId platform;
  std::vector<std::string> support;  // sorted, unique
  std::vector<double> weights;
};

DietVector diet_vector(const DietProfile& profile, std::vector<std::string> support);

/// Throws ArgumentError on mismatched supports and UndefinedMetricError
/// when either vector is all zero.
double cosine_similarity(const DietVector& a, const DietVector& b);

enum class SupportMode { PairUnion, GlobalUnion };

struct SimilarityNetwork {
  std::vector<PlatformId> nodes;
  Matrix similarity;
  SquareMatrix<char> undefined;       // 1 where a vector was all zero
  std::vector<PlatformId> skipped;    // platforms with empty profiles
};

/// Cosine similarity of top-k diet vectors for every pair of platforms.
/// Requires at least two nonempty profiles.
SimilarityNetwork similarity_network(const std::vector<DietProfile>& profiles, std::size_t k = 20,
                                     SupportMode mode = SupportMode::PairUnion);

/// Tie-corrected Kendall rank correlation. Throws ArgumentError on length
/// mismatch and UndefinedMetricError when either input is constant.
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

/// Strict upper triangle, row by row.
std::vector<double> upper_triangle(const Matrix& m);

}  // namespace echoscope
