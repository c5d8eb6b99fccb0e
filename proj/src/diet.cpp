#include "echoscope/diet.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "echoscope/error.hpp"

namespace echoscope {

DietAccumulator::DietAccumulator(PlatformId platform, DietOptions options) : options_(options) {
  p_.platform = std::move(platform);
}

void DietAccumulator::add(const LinkRecord& link, const SourceCatalog& catalog) {
  if (link.platform != p_.platform)
    throw ArgumentError("link from " + link.platform.str() + " fed to profile of " + p_.platform.str());
  if (link.target_platform) return;
  const DomainLabel* label = catalog.find(link.domain);
  Bias bias = label ? label->bias : Bias::Unreported;
  if (bias == Bias::ExtremeLeft && options_.exclude_extreme_left) {
    ++p_.excluded_extreme_left;
    return;
  }
  ++p_.total_urls;
  ++p_.bias_counts[bias];
  ++p_.domain_counts[link.domain];
  if (label) {
    ++p_.labeled_urls;
    if (label->questionable) ++p_.questionable_urls;
  }
}

DietAccumulator& DietAccumulator::merge(const DietAccumulator& other) {
  if (other.p_.platform != p_.platform) throw ArgumentError("cannot merge profiles of different platforms");
  p_.total_urls += other.p_.total_urls;
  p_.labeled_urls += other.p_.labeled_urls;
  p_.questionable_urls += other.p_.questionable_urls;
  p_.excluded_extreme_left += other.p_.excluded_extreme_left;
  for (const auto& [b, c] : other.p_.bias_counts) p_.bias_counts[b] += c;
  for (const auto& [d, c] : other.p_.domain_counts) p_.domain_counts[d] += c;
  return *this;
}

DietProfile DietAccumulator::snapshot() const {
  DietProfile out = p_;
  for (Bias b : kAllBiases) {
    out.bias_counts[b];  // materialize every category
    out.bias_shares[b] = out.total_urls == 0 ? 0.0
                                             : static_cast<double>(out.bias_counts[b]) /
                                                   static_cast<double>(out.total_urls);
  }
  return out;
}

DietProfile DietAccumulator::finish() const {
  if (p_.total_urls == 0) throw EmptyProfileError("no external links for " + p_.platform.str());
  return snapshot();
}

DietProfile diet_distribution(const PlatformId& platform, const std::vector<LinkRecord>& links,
                              const SourceCatalog& catalog, DietOptions options) {
  DietAccumulator acc(platform, options);
  for (const auto& l : links) acc.add(l, catalog);
  return acc.finish();
}

std::vector<RankedDomain> top_domains(const DietProfile& profile, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  std::vector<RankedDomain> ranked;
  ranked.reserve(profile.domain_counts.size());
  for (const auto& [d, c] : profile.domain_counts) ranked.push_back({d, c, 0.0});
  // domain_counts is already sorted by name, so a stable sort by count keeps
  // the lexicographic tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedDomain& a, const RankedDomain& b) { return a.count > b.count; });
  if (ranked.size() > k) ranked.resize(k);
  for (auto& r : ranked)
    r.percent = profile.total_urls == 0 ? 0.0
                                        : 100.0 * static_cast<double>(r.count) / static_cast<double>(profile.total_urls);
  return ranked;
}

double questionable_fraction(const DietProfile& profile, QDenominator mode) {
  const std::size_t denom = mode == QDenominator::Labeled ? profile.labeled_urls : profile.total_urls;
  if (denom == 0) throw UndefinedMetricError("q undefined for " + profile.platform.str() + ": no labeled URLs");
  return static_cast<double>(profile.questionable_urls) / static_cast<double>(denom);
}

DietVector diet_vector(const DietProfile& profile, std::vector<std::string> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  DietVector v{profile.platform, std::move(support), {}};
  v.weights.reserve(v.support.size());
  for (const auto& d : v.support) {
    auto it = profile.domain_counts.find(d);
    v.weights.push_back(it == profile.domain_counts.end() ? 0.0 : static_cast<double>(it->second));
  }
  return v;
}

double cosine_similarity(const DietVector& a, const DietVector& b) {
  if (a.support != b.support || a.weights.size() != b.weights.size())
    throw ArgumentError("diet vectors have different supports");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.weights.size(); ++k) {
    dot += a.weights[k] * b.weights[k];
    na += a.weights[k] * a.weights[k];
    nb += b.weights[k] * b.weights[k];
  }
  if (na == 0 || nb == 0) throw UndefinedMetricError("cosine similarity of an all-zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

SimilarityNetwork similarity_network(const std::vector<DietProfile>& profiles, std::size_t k, SupportMode mode) {
  SimilarityNetwork net;
  std::vector<const DietProfile*> used;
  std::vector<std::vector<std::string>> tops;
  for (const auto& p : profiles) {
    if (p.empty()) {
      net.skipped.push_back(p.platform);
      continue;
    }
    used.push_back(&p);
    net.nodes.push_back(p.platform);
    std::vector<std::string> names;
    for (const auto& r : top_domains(p, k)) names.push_back(r.domain);
    tops.push_back(std::move(names));
  }
  if (used.size() < 2) throw ArgumentError("similarity network needs at least two nonempty profiles");

  std::vector<std::string> global;
  if (mode == SupportMode::GlobalUnion) {
    std::set<std::string> all;
    for (const auto& t : tops) all.insert(t.begin(), t.end());
    global.assign(all.begin(), all.end());
  }

  const std::size_t n = used.size();
  net.similarity = Matrix(n);
  net.undefined = SquareMatrix<char>(n);
  for (std::size_t a = 0; a < n; ++a) {
    net.similarity(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<std::string> support = global;
      if (mode == SupportMode::PairUnion) {
        support = tops[a];
        support.insert(support.end(), tops[b].begin(), tops[b].end());
      }
      double s = 0;
      try {
        s = cosine_similarity(diet_vector(*used[a], support), diet_vector(*used[b], support));
      } catch (const UndefinedMetricError&) {
        net.undefined(a, b) = net.undefined(b, a) = 1;
      }
      net.similarity(a, b) = net.similarity(b, a) = s;
    }
  }
  return net;
}

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("Kendall tau inputs differ in length");
  const std::size_t n = x.size();
  // O(n^2) pair scan; inputs are matrix cells, never more than a few thousand.
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0x = static_cast<double>(concordant + discordant + tie_y);
  const double n0y = static_cast<double>(concordant + discordant + tie_x);
  if (n0x == 0 || n0y == 0) throw UndefinedMetricError("Kendall tau undefined for constant input");
  return static_cast<double>(concordant - discordant) / std::sqrt(n0x * n0y);
}

std::vector<double> upper_triangle(const Matrix& m) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace echoscope
