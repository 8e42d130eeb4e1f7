#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <sstream>
#include <string>

namespace abreu {

inline constexpr int kMaxDim = 3;

// Small fixed-capacity storage: no heap traffic in per-node evaluation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using IVec = Eigen::Matrix<long long, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// Recursive pairwise summation; the result depends only on the order of `values`.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename Derived>
std::string format_vec(const Eigen::MatrixBase<Derived>& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v(i);
  }
  os << ')';
  return os.str();
}

}  // namespace abreu
