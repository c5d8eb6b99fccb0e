#include "echoscope/graph.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include <boost/random/binomial_distribution.hpp>
#include <fmt/format.h>

#include "echoscope/error.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

std::size_t PlatformGraph::index_of(const PlatformId& id) const {
  auto it = std::find(nodes.begin(), nodes.end(), id);
  if (it == nodes.end()) throw ArgumentError("platform not in graph: " + id.str());
  return static_cast<std::size_t>(it - nodes.begin());
}

GraphBuilder::GraphBuilder(std::vector<PlatformId> nodes)
    : nodes_(std::move(nodes)), counts_(nodes_.size()) {}

void GraphBuilder::add(const LinkRecord& link) {
  if (!link.target_platform) return;
  auto find = [this](const PlatformId& id) {
    auto it = std::find(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end()) throw ConsistencyError("link references unregistered platform " + id.str());
    return static_cast<std::size_t>(it - nodes_.begin());
  };
  add(find(link.platform), find(*link.target_platform));
}

void GraphBuilder::add(std::size_t from, std::size_t to, std::uint64_t count) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw ArgumentError("node index out of range");
  if (from == to) throw ConsistencyError("self-link on " + nodes_[from].str() + " reached the graph");
  counts_(from, to) += count;
}

GraphBuilder& GraphBuilder::merge(const GraphBuilder& other) {
  if (other.nodes_ != nodes_) throw ArgumentError("cannot merge graphs over different node sets");
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t j = 0; j < nodes_.size(); ++j) counts_(i, j) += other.counts_(i, j);
  return *this;
}

PlatformGraph GraphBuilder::build() const { return graph_from_matrix(nodes_, counts_); }

PlatformGraph graph_from_matrix(std::vector<PlatformId> nodes, const CountMatrix& W) {
  const std::size_t n = nodes.size();
  if (W.size() != n) throw ArgumentError("weight matrix size does not match node count");
  PlatformGraph g;
  g.nodes = std::move(nodes);
  g.W = W;
  g.s_out.assign(n, 0);
  g.s_in.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (W(i, i) != 0) throw ConsistencyError("nonzero diagonal in weight matrix");
    for (std::size_t j = 0; j < n; ++j) {
      g.s_out[i] += W(i, j);
      g.s_in[j] += W(i, j);
      g.S += W(i, j);
    }
  }
  return g;
}

PlatformGraph build_graph(const std::vector<PlatformId>& nodes, const std::vector<LinkRecord>& links) {
  GraphBuilder b(nodes);
  for (const auto& l : links) b.add(l);
  return b.build();
}

double expected_weight(const PlatformGraph& g, std::size_t i, std::size_t j) {
  if (g.S == 0) throw EmptyGraphError("graph has no weight");
  return static_cast<double>(g.s_out.at(i)) * static_cast<double>(g.s_in.at(j)) / static_cast<double>(g.S);
}

Matrix expected_matrix(const PlatformGraph& g) {
  if (g.S == 0) throw EmptyGraphError("graph has no weight");
  Matrix e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) e(i, j) = expected_weight(g, i, j);
  return e;
}

RescaledMatrix rescale(const PlatformGraph& g) {
  if (g.S == 0) throw EmptyGraphError("graph has no weight");
  const std::size_t n = g.size();
  RescaledMatrix r{g.nodes, Matrix(n), SquareMatrix<char>(n)};
  const double S = static_cast<double>(g.S);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.W(i, j) == 0) {
        r.zero_flag(i, j) = 1;
        continue;
      }
      // W > 0 implies both strengths are positive.
      const double denom = static_cast<double>(g.s_out[i]) * static_cast<double>(g.s_in[j]);
      r.R(i, j) = static_cast<double>(g.W(i, j)) * S / denom;
    }
  }
  return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) {
  // Hashing the master seed first keeps nearby seeds from sharing
  // realizations (seed s, index i+1 would otherwise equal seed s+1, index i).
  return splitmix64(splitmix64(master_seed) + index * 0x9e3779b97f4a7c15ULL);
}

namespace {

using u128 = unsigned __int128;

struct McAccumulator {
  std::vector<std::uint64_t> sum;
  std::vector<u128> sumsq;
};

// One multinomial draw of S units over all cells, as a chain of
// conditional binomials in row-major cell order.
void draw_realization(const std::vector<u128>& cell_mass, u128 total_mass, std::uint64_t S,
                      std::mt19937_64& rng, McAccumulator& acc) {
  std::uint64_t remaining = S;
  u128 mass_left = total_mass;
  for (std::size_t k = 0; k < cell_mass.size() && remaining > 0; ++k) {
    std::uint64_t x;
    if (cell_mass[k] == 0) {
      x = 0;
    } else if (cell_mass[k] >= mass_left) {
      x = remaining;
    } else {
      double p = static_cast<double>(cell_mass[k]) / static_cast<double>(mass_left);
      // libstdc++'s binomial sampler is biased for large n with small n*p;
      // Boost's BTRD implementation is exact.
      boost::random::binomial_distribution<std::int64_t, double> bin(static_cast<std::int64_t>(remaining), p);
      x = static_cast<std::uint64_t>(bin(rng));
    }
    remaining -= x;
    mass_left -= cell_mass[k];
    acc.sum[k] += x;
    acc.sumsq[k] += static_cast<u128>(x) * x;
  }
}

}  // namespace

MonteCarloResult monte_carlo_expected(const PlatformGraph& g, std::uint64_t samples, std::uint64_t seed,
                                      unsigned threads) {
  if (samples == 0) throw ArgumentError("Monte-Carlo needs at least one sample");
  if (g.S == 0) throw EmptyGraphError("graph has no weight");
  const std::size_t n = g.size();
  std::vector<u128> mass(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mass[i * n + j] = static_cast<u128>(g.s_out[i]) * g.s_in[j];
  const u128 total = static_cast<u128>(g.S) * g.S;

  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    McAccumulator acc{std::vector<std::uint64_t>(n * n), std::vector<u128>(n * n)};
    for (std::uint64_t s = begin; s < end; ++s) {
      std::mt19937_64 rng(sample_seed(seed, s));
      draw_realization(mass, total, g.S, rng, acc);
    }
    return acc;
  };

  threads = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(threads, samples)));
  McAccumulator total_acc{std::vector<std::uint64_t>(n * n), std::vector<u128>(n * n)};
  std::vector<std::future<McAccumulator>> parts;
  for (unsigned t = 0; t < threads; ++t) {
    std::uint64_t begin = samples * t / threads, end = samples * (t + 1) / threads;
    parts.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, run, begin, end));
  }
  for (auto& f : parts) {
    auto acc = f.get();
    for (std::size_t k = 0; k < n * n; ++k) {
      total_acc.sum[k] += acc.sum[k];
      total_acc.sumsq[k] += acc.sumsq[k];
    }
  }

  MonteCarloResult out{Matrix(n), Matrix(n), samples};
  const long double m = static_cast<long double>(samples);
  for (std::size_t k = 0; k < n * n; ++k) {
    const long double sum = static_cast<long double>(total_acc.sum[k]);
    const long double mean = sum / m;
    out.mean(k / n, k % n) = static_cast<double>(mean);
    if (samples > 1) {
      long double var = (static_cast<long double>(total_acc.sumsq[k]) - sum * mean) / (m - 1);
      out.std_error(k / n, k % n) = static_cast<double>(std::sqrt(std::max(var, 0.0L) / m));
    }
  }
  return out;
}

PageRankResult pagerank_detailed(const Matrix& m, const PageRankOptions& opt) {
  const std::size_t n = m.size();
  if (n == 0) throw ArgumentError("PageRank needs at least one node");
  if (!(opt.damping > 0 && opt.damping < 1)) throw ArgumentError("damping must lie in (0, 1)");
  if (!(opt.tol > 0)) throw ArgumentError("tolerance must be positive");
  if (opt.max_iter < 1) throw ArgumentError("max_iter must be positive");

  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m(i, j) < 0 || !std::isfinite(m(i, j))) throw ArgumentError("PageRank input must be nonnegative");
      row_sum[i] += m(i, j);
    }
  }

  const double dn = static_cast<double>(n);
  std::vector<double> x(n, 1.0 / dn), next(n);
  PageRankResult res;
  for (int it = 1; it <= opt.max_iter; ++it) {
    double dangling = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (row_sum[i] == 0) dangling += x[i];
    std::fill(next.begin(), next.end(), (1.0 - opt.damping) / dn + opt.damping * dangling / dn);
    for (std::size_t i = 0; i < n; ++i) {
      if (row_sum[i] == 0) continue;
      const double share = opt.damping * x[i] / row_sum[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += share * m(i, j);
    }
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - x[i]);
    x.swap(next);
    res.iterations = it;
    res.residual = delta;
    if (delta < opt.tol) {
      double total = 0;
      for (double v : x) total += v;
      for (double& v : x) v /= total;
      res.scores = std::move(x);
      return res;
    }
  }
  throw ConvergenceError("PageRank did not converge in " + std::to_string(opt.max_iter) + " iterations",
                         res.residual);
}

std::vector<double> pagerank(const RescaledMatrix& m, const PageRankOptions& options) {
  return pagerank_detailed(m.R, options).scores;
}

namespace {

template <typename Cell>
std::string labeled_csv(const std::vector<PlatformId>& nodes, std::size_t n, Cell&& cell) {
  if (nodes.size() != n) throw ArgumentError("label count does not match matrix size");
  std::string out = "platform";
  for (const auto& id : nodes) out += "," + text::csv_escape(id.str());
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += text::csv_escape(nodes[i].str());
    for (std::size_t j = 0; j < n; ++j) out += "," + cell(i, j);
    out += '\n';
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string matrix_csv(const std::vector<PlatformId>& nodes, const CountMatrix& m) {
  return labeled_csv(nodes, m.size(), [&](std::size_t i, std::size_t j) { return std::to_string(m(i, j)); });
}

std::string matrix_csv(const std::vector<PlatformId>& nodes, const Matrix& m, int digits) {
  return labeled_csv(nodes, m.size(), [&](std::size_t i, std::size_t j) { return text::fixed(m(i, j), digits); });
}

std::string heatmap_svg(const RescaledMatrix& m) {
  const std::size_t n = m.R.size();
  const int cell = 56, margin = 96;
  const int side = margin + static_cast<int>(n) * cell + 8;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      side);
  out += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
         "<path d=\"M0,6 L6,0\" stroke=\"#999\" stroke-width=\"1\"/></pattern></defs>\n";
  for (std::size_t k = 0; k < n; ++k) {
    const int pos = margin + static_cast<int>(k) * cell + cell / 2;
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", margin - 6, pos + 4,
                       xml_escape(m.nodes[k].str()));
    out += fmt::format("<text x=\"{0}\" y=\"{1}\" text-anchor=\"start\" transform=\"rotate(-45 {0} {1})\">{2}</text>\n",
                       pos, margin - 6, xml_escape(m.nodes[k].str()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int x = margin + static_cast<int>(j) * cell, y = margin + static_cast<int>(i) * cell;
      const double v = m.R(i, j);
      std::string fill;
      if (m.zero_flag(i, j)) {
        fill = "url(#hatch)";
      } else {
        // Shade by |log2 R|, saturating at a factor of 8.
        double t = std::min(std::abs(std::log2(v)) / 3.0, 1.0);
        int fade = static_cast<int>(std::lround(255 * (1 - t)));
        fill = v >= 1 ? fmt::format("rgb({0},{1},{0})", fade, 160 + (255 - 160) * fade / 255)
                      : fmt::format("rgb({0},{1},{1})", 200 + 55 * fade / 255, fade);
      }
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#fff\"/>\n", x, y,
                         cell, cell, fill);
      if (i != j)
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x + cell / 2, y + cell / 2 + 4,
                           m.zero_flag(i, j) ? std::string("0") : text::fixed(v, 2));
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace echoscope
