#pragma once

// Abreu operator -sum_ij d^2 u^{ij} / dx_i dx_j, u^{ij} the inverse Hessian.
// Inverse Hessians are exact from the representation; only the outer second
// derivatives are central differences with step h0, so the error is O(h0^2).

#include "abreu/error.hpp"
#include "abreu/extremal.hpp"
#include "abreu/parallel.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"
#include "abreu/quadrature.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace abreu {

/// Default differencing step: 1e-4 diam(P).
inline double default_step(const DelzantPolytope& p) { return 1e-4 * p.diameter(); }

namespace detail {

template <typename U>
Mat inverse_hessian(const U& u, const Vec& x) {
  const Mat h = u.hessian(x);
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::DegenerateHessian, "Hessian is not positive definite at " + format_vec(x));
  return llt.solve(Mat::Identity(h.rows(), h.cols()));
}

}  // namespace detail

template <typename U>
double abreu_operator(const U& u, const DelzantPolytope& p, const Vec& x, double h0) {
  if (p.boundary_distance(x) < 2.0 * h0)
    throw Error(ErrorKind::TooCloseToBoundary,
                "point " + format_vec(x) + " is closer than 2*h0 = " + std::to_string(2.0 * h0) + " to the boundary");
  const int n = p.dim();
  auto at = [&](int i, double si, int j, double sj) {
    Vec y = x;
    y(i) += si * h0;
    y(j) += sj * h0;
    return detail::inverse_hessian(u, y);
  };
  const Mat u0 = detail::inverse_hessian(u, x);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec yp = x, ym = x;
    yp(i) += h0;
    ym(i) -= h0;
    const double d2 = (detail::inverse_hessian(u, yp)(i, i) - 2.0 * u0(i, i) + detail::inverse_hessian(u, ym)(i, i)) /
                      (h0 * h0);
    total += d2;
    for (int j = i + 1; j < n; ++j) {
      const double mixed = (at(i, 1, j, 1)(i, j) - at(i, 1, j, -1)(i, j) - at(i, -1, j, 1)(i, j) +
                            at(i, -1, j, -1)(i, j)) /
                           (4.0 * h0 * h0);
      total += 2.0 * mixed;
    }
  }
  return -total;
}

template <typename U>
double abreu_operator(const U& u, const DelzantPolytope& p, const Vec& x) {
  return abreu_operator(u, p, x, default_step(p));
}

struct AbreuResidual {
  std::vector<Vec> points;
  std::vector<double> operator_values;  // -u^{ij}_{ij}(x)
  std::vector<double> s_values;         // s(x)
  std::vector<double> residuals;        // operator - s
  double sup_norm = 0.0;
  double l2_norm = 0.0;  // root mean square over the sample
};

template <typename U>
AbreuResidual residual_report(const U& u, const DelzantPolytope& p, const ExtremalAffine& ext,
                              const std::vector<Vec>& sample, double h0) {
  AbreuResidual r;
  r.points = sample;
  r.operator_values = parallel::map_indexed<double>(sample.size(), [&](std::size_t k) {
    return abreu_operator(u, p, sample[k], h0);
  });
  std::vector<double> sq;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double sv = ext.s.value(sample[k]);
    r.s_values.push_back(sv);
    r.residuals.push_back(r.operator_values[k] - sv);
    r.sup_norm = std::max(r.sup_norm, std::abs(r.residuals.back()));
    sq.push_back(r.residuals.back() * r.residuals.back());
  }
  if (!sq.empty()) r.l2_norm = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
  return r;
}

template <typename U>
AbreuResidual residual_report(const U& u, const DelzantPolytope& p, const ExtremalAffine& ext,
                              const std::vector<Vec>& sample) {
  return residual_report(u, p, ext, sample, default_step(p));
}

/// Interior quadrature nodes at distance >= margin from dP, thinned to at most max_points.
inline std::vector<Vec> sample_points(const QuadratureScheme& q, const DelzantPolytope& p, double margin,
                                      std::size_t max_points = 400) {
  std::vector<Vec> eligible;
  for (const Vec& x : q.interior_points)
    if (p.boundary_distance(x) >= margin) eligible.push_back(x);
  if (eligible.size() <= max_points) return eligible;
  std::vector<Vec> out;
  const double stride = static_cast<double>(eligible.size()) / static_cast<double>(max_points);
  for (std::size_t k = 0; k < max_points; ++k) out.push_back(eligible[static_cast<std::size_t>(k * stride)]);
  return out;
}

}  // namespace abreu
