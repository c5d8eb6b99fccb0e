#pragma once

#include <cstddef>
#include <vector>

namespace echoscope {

/// Dense square row-major matrix. Platform counts stay in the dozens, so
/// nothing fancier is needed.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Matrix = SquareMatrix<double>;
using CountMatrix = SquareMatrix<unsigned long long>;

}  // namespace echoscope
