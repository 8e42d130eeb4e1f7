#pragma once

// Numerical Legendre transform of gridded convex samples:
// u(x) = sup_y <x, y> - psi(y), maximized per target point on a C^2 spline
// interpolant of the samples (natural cubic in 1D, tensor-product in 2D).

#include "abreu/error.hpp"
#include "abreu/potentials.hpp"
#include "abreu/types.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace abreu {

/// Rectangular grid, one strictly increasing axis per dimension (1 or 2 axes).
struct Grid {
  std::vector<std::vector<double>> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }
  /// Row-major point; the last axis varies fastest.
  Vec point(std::size_t flat) const {
    Vec y(dim());
    for (int d = dim() - 1; d >= 0; --d) {
      const std::size_t n = axes[d].size();
      y(d) = axes[d][flat % n];
      flat /= n;
    }
    return y;
  }
  bool on_edge(std::size_t flat) const {
    for (int d = dim() - 1; d >= 0; --d) {
      const std::size_t n = axes[d].size();
      const std::size_t i = flat % n;
      if (i == 0 || i + 1 == n) return true;
      flat /= n;
    }
    return false;
  }

  static std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
  }
};

struct GridSamples {
  Grid grid;
  std::vector<double> values;
};

class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(const std::vector<double>& x, std::vector<double> y) : x_(x), y_(std::move(y)), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 3) return;
    // Second derivatives M from the continuity equations; not-a-knot ends when
    // n >= 4 (third derivative continuous at x_1 and x_{n-2}), natural otherwise.
    std::vector<Eigen::Triplet<double>> t;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    auto at = [](std::size_t i) { return static_cast<int>(i); };
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      t.emplace_back(at(i), at(i - 1), h0 / 6.0);
      t.emplace_back(at(i), at(i), (h0 + h1) / 3.0);
      t.emplace_back(at(i), at(i + 1), h1 / 6.0);
      rhs(at(i)) = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    if (n >= 4) {
      const double a0 = x_[1] - x_[0], a1 = x_[2] - x_[1];
      t.emplace_back(0, 0, a1);
      t.emplace_back(0, 1, -(a0 + a1));
      t.emplace_back(0, 2, a0);
      const double b0 = x_[n - 2] - x_[n - 3], b1 = x_[n - 1] - x_[n - 2];
      t.emplace_back(at(n - 1), at(n - 3), b1);
      t.emplace_back(at(n - 1), at(n - 2), -(b0 + b1));
      t.emplace_back(at(n - 1), at(n - 1), b0);
    } else {
      t.emplace_back(0, 0, 1.0);
      t.emplace_back(at(n - 1), at(n - 1), 1.0);
    }
    Eigen::SparseMatrix<double> a(at(n), at(n));
    a.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    const Eigen::VectorXd m = lu.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) m_[i] = m(at(i));
  }

  /// Value, first and second derivative at t (clamped to the knot range).
  std::array<double, 3> eval(double t) const {
    const std::size_t n = x_.size();
    t = std::clamp(t, x_.front(), x_.back());
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    const double v = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double d1 = (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] + (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
    const double d2 = a * m_[i] + b * m_[i + 1];
    return {v, d1, d2};
  }

 private:
  std::vector<double> x_, y_, m_;
};

/// C^2 interpolant of gridded samples with exact derivatives.
class SplineSurface {
 public:
  explicit SplineSurface(const GridSamples& s) : grid_(s.grid) {
    if (grid_.dim() == 1) {
      line_ = CubicSpline(grid_.axes[0], s.values);
    } else {
      const std::size_t n0 = grid_.axes[0].size(), n1 = grid_.axes[1].size();
      for (std::size_t j = 0; j < n1; ++j) {
        std::vector<double> col(n0);
        for (std::size_t i = 0; i < n0; ++i) col[i] = s.values[i * n1 + j];
        rows_.emplace_back(grid_.axes[0], std::move(col));
      }
    }
  }

  Jet eval(const Vec& y) const {
    const int n = grid_.dim();
    Jet j{0.0, Vec::Zero(n), Mat::Zero(n, n)};
    if (n == 1) {
      const auto r = line_.eval(y(0));
      j.value = r[0];
      j.gradient(0) = r[1];
      j.hessian(0, 0) = r[2];
      return j;
    }
    const std::size_t n1 = grid_.axes[1].size();
    std::vector<double> v(n1), d(n1), dd(n1);
    for (std::size_t k = 0; k < n1; ++k) {
      const auto r = rows_[k].eval(y(0));
      v[k] = r[0], d[k] = r[1], dd[k] = r[2];
    }
    const auto sv = CubicSpline(grid_.axes[1], std::move(v)).eval(y(1));
    const auto sd = CubicSpline(grid_.axes[1], std::move(d)).eval(y(1));
    const auto sdd = CubicSpline(grid_.axes[1], std::move(dd)).eval(y(1));
    j.value = sv[0];
    j.gradient << sd[0], sv[1];
    j.hessian << sdd[0], sd[1], sd[1], sv[2];
    return j;
  }

 private:
  Grid grid_;
  CubicSpline line_;
  std::vector<CubicSpline> rows_;
};

namespace detail {

inline void require_convex_samples(const GridSamples& s) {
  const Grid& g = s.grid;
  if (g.dim() < 1 || g.dim() > 2) throw Error(ErrorKind::NonConvexInput, "grid must be 1D or 2D");
  if (s.values.size() != g.size()) throw Error(ErrorKind::NonConvexInput, "sample count does not match grid");
  auto check_line = [&](const std::vector<double>& ax, auto value_at) {
    if (ax.size() < 3) throw Error(ErrorKind::NonConvexInput, "need at least 3 samples per axis");
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
      const double slope = (value_at(i + 1) - value_at(i)) / (ax[i + 1] - ax[i]);
      if (!(slope > prev))
        throw Error(ErrorKind::NonConvexInput, "sampled gradient is not increasing at index " + std::to_string(i));
      prev = slope;
    }
  };
  if (g.dim() == 1) {
    check_line(g.axes[0], [&](std::size_t i) { return s.values[i]; });
    return;
  }
  const std::size_t n0 = g.axes[0].size(), n1 = g.axes[1].size();
  for (std::size_t j = 0; j < n1; ++j) check_line(g.axes[0], [&](std::size_t i) { return s.values[i * n1 + j]; });
  for (std::size_t i = 0; i < n0; ++i) check_line(g.axes[1], [&](std::size_t k) { return s.values[i * n1 + k]; });
}

}  // namespace detail

/// sup_y <x, y> - psi(y) for one target x. Throws OutOfGradientRange when the
/// supremum is not attained inside the sampled box.
inline double legendre_at(const SplineSurface& psi, const GridSamples& samples, const Vec& x) {
  const Grid& g = samples.grid;
  const int n = g.dim();
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = x.dot(g.point(k)) - samples.values[k];
    if (v > best_val) best_val = v, best = k;
  }
  Vec lo(n), hi(n);
  for (int d = 0; d < n; ++d) lo(d) = g.axes[d].front(), hi(d) = g.axes[d].back();
  Vec y = g.point(best);
  auto objective = [&](const Vec& z) { return x.dot(z) - psi.eval(z).value; };
  double f = objective(y);
  for (int it = 0; it < 100; ++it) {
    const Jet j = psi.eval(y);
    const Vec r = x - j.gradient;
    Eigen::LLT<Mat> llt(j.hessian);
    Vec step = llt.info() == Eigen::Success ? Vec(llt.solve(r)) : Vec(1e-3 * r);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-12) {
      Vec z = (y + t * step).cwiseMax(lo).cwiseMin(hi);
      const double fz = objective(z);
      if (fz >= f) {
        moved = (z - y).norm() > 0.0;
        y = z;
        f = fz;
        break;
      }
      t *= 0.5;
    }
    if (!moved || (t * step).norm() < 1e-14 * (1.0 + y.norm())) break;
  }
  const Vec r = x - psi.eval(y).gradient;
  for (int d = 0; d < n; ++d) {
    const bool at_edge = y(d) <= lo(d) || y(d) >= hi(d);
    if (at_edge && std::abs(r(d)) > 1e-8)
      throw Error(ErrorKind::OutOfGradientRange, "target " + format_vec(x) + " is outside the sampled gradient range");
  }
  return f;
}

/// Legendre transform of convex samples, evaluated on `target`.
inline GridSamples legendre(const GridSamples& psi, const Grid& target) {
  detail::require_convex_samples(psi);
  if (target.dim() != psi.grid.dim()) throw Error(ErrorKind::NonConvexInput, "target grid dimension mismatch");
  const SplineSurface s(psi);
  GridSamples out{target, std::vector<double>(target.size())};
  for (std::size_t k = 0; k < target.size(); ++k) out.values[k] = legendre_at(s, psi, target.point(k));
  return out;
}

struct RoundTrip {
  double max_abs_error = 0.0;
  std::size_t points_checked = 0;
};

/// Transforms psi to `dual`, transforms back, and compares on interior psi samples
/// whose back-transform stays inside the dual gradient range.
inline RoundTrip legendre_roundtrip(const GridSamples& psi, const Grid& dual) {
  const GridSamples u = legendre(psi, dual);
  detail::require_convex_samples(u);
  const SplineSurface su(u);
  RoundTrip rt;
  for (std::size_t k = 0; k < psi.grid.size(); ++k) {
    if (psi.grid.on_edge(k)) continue;
    double back = 0.0;
    try {
      back = legendre_at(su, u, psi.grid.point(k));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OutOfGradientRange) continue;
      throw;
    }
    rt.max_abs_error = std::max(rt.max_abs_error, std::abs(back - psi.values[k]));
    ++rt.points_checked;
  }
  return rt;
}

}  // namespace abreu
