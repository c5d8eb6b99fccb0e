#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echoscope/matrix.hpp"
#include "echoscope/platform.hpp"
#include "echoscope/urlkit.hpp"

namespace echoscope {

/// Weighted directed platform graph: W(i, j) counts URLs posted on platform
/// i that point at platform j.
struct PlatformGraph {
  std::vector<PlatformId> nodes;
  CountMatrix W;
  std::vector<std::uint64_t> s_out;
  std::vector<std::uint64_t> s_in;
  std::uint64_t S = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t index_of(const PlatformId& id) const;  // throws ArgumentError
};

/// Mergeable per-shard edge counter.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::vector<PlatformId> nodes);

  /// Counts a link that has a target platform; links without one are ignored.
  /// Throws ConsistencyError on self-links or unregistered platforms.
  void add(const LinkRecord& link);
  void add(std::size_t from, std::size_t to, std::uint64_t count = 1);
  GraphBuilder& merge(const GraphBuilder& other);

  PlatformGraph build() const;

 private:
  std::vector<PlatformId> nodes_;
  CountMatrix counts_;
};

PlatformGraph build_graph(const std::vector<PlatformId>& nodes, const std::vector<LinkRecord>& links);

/// Builds the strengths of a graph from an explicit weight matrix (diagonal
/// must be zero).
PlatformGraph graph_from_matrix(std::vector<PlatformId> nodes, const CountMatrix& W);

/// Configuration-model expectation s_out[i] * s_in[j] / S.
double expected_weight(const PlatformGraph& g, std::size_t i, std::size_t j);
Matrix expected_matrix(const PlatformGraph& g);

struct RescaledMatrix {
  std::vector<PlatformId> nodes;
  Matrix R;
  SquareMatrix<char> zero_flag;  // 1 where no URLs were observed
};

/// Observed over expected weights. Throws EmptyGraphError when S = 0.
RescaledMatrix rescale(const PlatformGraph& g);

struct MonteCarloResult {
  Matrix mean;
  Matrix std_error;
  std::uint64_t samples = 0;
};

/// Seed of realization `index`, derived from the master seed.
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index);

/// Strength-preserving null: each realization scatters S link units with
/// source drawn from s_out / S and target from s_in / S independently.
/// Results are identical for any thread count.
MonteCarloResult monte_carlo_expected(const PlatformGraph& g, std::uint64_t samples, std::uint64_t seed,
                                      unsigned threads = 1);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-12;
  int max_iter = 10000;
};

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  double residual = 0;
};

/// Power iteration on the row-normalized matrix with uniform teleport and
/// uniform redistribution from all-zero rows. Throws ConvergenceError.
PageRankResult pagerank_detailed(const Matrix& m, const PageRankOptions& options = {});
std::vector<double> pagerank(const RescaledMatrix& m, const PageRankOptions& options = {});

/// Labeled CSV matrices (platform ids on the header row and first column).
std::string matrix_csv(const std::vector<PlatformId>& nodes, const CountMatrix& m);
std::string matrix_csv(const std::vector<PlatformId>& nodes, const Matrix& m, int digits = 6);

/// Heatmap of R: green above 1, red below, hatched grey for unobserved cells.
std::string heatmap_svg(const RescaledMatrix& m);

}  // namespace echoscope
