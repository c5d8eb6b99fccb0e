#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace echoscope {

struct CompareLine {
  std::string metric;   // kendall_tau or jensen_shannon
  std::string subject;  // matrix name or platform
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

struct CompareOptions {
  double min_tau = 0.9;
  double max_js = 0.05;
  int similarity_k = 20;
};

/// Compares two emitted bundles: Kendall's tau-b on the off-diagonal
/// rescaled matrix, the bias-share matrix and the similarity upper
/// triangle; Jensen-Shannon divergence per platform leaning histogram.
std::vector<CompareLine> compare_bundles(const std::filesystem::path& a, const std::filesystem::path& b,
                                         const CompareOptions& options = {});

std::string compare_csv(const std::vector<CompareLine>& lines);

}  // namespace echoscope
