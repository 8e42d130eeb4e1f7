#pragma once

// F(u) = -int_P log det D^2u dx + int_dP u dsigma - int_P s u dx, with s the
// extremal affine function. Values are in F-units: the factor 2^n n! (2 pi)^n / V
// that converts to the modified K-energy on the manifold is never applied.

#include "abreu/error.hpp"
#include "abreu/extremal.hpp"
#include "abreu/pl_exact.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"
#include "abreu/quadrature.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace abreu {

/// Polytope with its quadrature scheme and extremal affine function.
struct Problem {
  DelzantPolytope polytope;
  QuadratureScheme scheme;
  ExtremalAffine extremal;

  Problem(DelzantPolytope p, int level)
      : polytope(std::move(p)), scheme(build_scheme(polytope, level)), extremal(solve_extremal_affine(polytope)) {}

  int dim() const { return polytope.dim(); }
};

struct FunctionalReport {
  double entropy = 0.0;   // -int_P log det D^2u dx
  double boundary = 0.0;  // int_dP u dsigma
  double interior = 0.0;  // int_P s u dx
  double L = 0.0;         // boundary - interior
  double F = 0.0;         // entropy + L
  std::optional<double> optimal_scaling;  // n Vol(P) / L when L > 0
};

namespace detail {

inline void require_dim(const Potential& u, const Problem& pr) {
  const int d = std::visit([](const auto& f) { return f.dim(); }, u);
  if (d != pr.dim())
    throw Error(ErrorKind::InvalidPolytope, "potential dimension " + std::to_string(d) + " does not match polytope");
}

inline PLIntegrals quadrature_integrals(const ParametrizedPotential& u, const Problem& pr) {
  PLIntegrals out;
  const auto& s = pr.extremal.s;
  out.boundary = integrate_boundary(pr.scheme, [&](const Vec& x) { return u.value(x); });
  auto values = parallel::map_indexed<double>(pr.scheme.interior_size(), [&](std::size_t i) {
    return u.value(pr.scheme.interior_points[i]);
  });
  std::vector<double> a(values.size()), b(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw Error(ErrorKind::NonFiniteIntegrand, "interior node " + std::to_string(i));
    const double w = pr.scheme.interior_weights[i];
    a[i] = w * values[i];
    b[i] = w * s.value(pr.scheme.interior_points[i]) * values[i];
  }
  out.interior = pairwise_sum(a);
  out.weighted_interior = pairwise_sum(b);
  return out;
}

inline PLIntegrals integrals(const Potential& u, const Problem& pr) {
  require_dim(u, pr);
  return std::visit(
      [&](const auto& f) -> PLIntegrals {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ParametrizedPotential>)
          return quadrature_integrals(f, pr);
        else if constexpr (std::is_same_v<T, PLFunction>)
          return pl_integrals(f, pr.polytope, pr.extremal);
        else
          return affine_integrals(f, pr.polytope, pr.extremal);
      },
      u);
}

/// -log det of a symmetric matrix that must be positive definite.
inline double neg_log_det(const Mat& h, std::size_t node, const Vec& x) {
  Eigen::LLT<Mat> llt(h);
  const double det = h.determinant();
  if (llt.info() != Eigen::Success || !(det > 0.0))
    throw Error(ErrorKind::NonConvexAtNode,
                "node " + std::to_string(node) + " at " + format_vec(x) + " has det D^2u = " + std::to_string(det));
  return -std::log(det);
}

}  // namespace detail

/// L(u) = int_dP u dsigma - int_P s u dx. Exact for PL and affine inputs.
inline double eval_L(const Potential& u, const Problem& pr) { return detail::integrals(u, pr).linear_part(); }

inline double integral_of(const Potential& u, const Problem& pr) { return detail::integrals(u, pr).interior; }

/// -int_P log det D^2u over the interior nodes.
inline double entropy_term(const ParametrizedPotential& u, const Problem& pr) {
  const auto& q = pr.scheme;
  auto terms = parallel::map_indexed<double>(q.interior_size(), [&](std::size_t i) {
    const Vec& x = q.interior_points[i];
    return q.interior_weights[i] * detail::neg_log_det(u.hessian(x), i, x);
  });
  return pairwise_sum(terms);
}

inline FunctionalReport eval_F(const Potential& u, const Problem& pr) {
  detail::require_dim(u, pr);
  const auto* pp = std::get_if<ParametrizedPotential>(&u);
  if (pp == nullptr)
    throw Error(ErrorKind::NonConvexAtNode, "node 0 at " + format_vec(pr.scheme.interior_points.at(0)) +
                                                " has det D^2u = 0 (piecewise-linear or affine input)");
  FunctionalReport r;
  r.entropy = entropy_term(*pp, pr);
  const PLIntegrals li = detail::integrals(u, pr);
  r.boundary = li.boundary;
  r.interior = li.weighted_interior;
  r.L = r.boundary - r.interior;
  r.F = r.entropy + r.L;
  if (r.L > 0.0) r.optimal_scaling = pr.dim() * pr.polytope.moments().volume / r.L;
  return r;
}

/// L(v) for a polynomial by quadrature.
inline double eval_L(const Polynomial& v, const Problem& pr) {
  const auto& q = pr.scheme;
  const double b = integrate_boundary(q, [&](const Vec& x) { return v.value(x); });
  const double i = integrate_interior(q, [&](const Vec& x) { return pr.extremal.s.value(x) * v.value(x); });
  return b - i;
}

/// d/dt F(u + t v) at t = 0: -int_P tr((D^2u)^{-1} D^2v) dx + L(v).
inline double first_variation(const ParametrizedPotential& u, const Polynomial& v, const Problem& pr) {
  const auto& q = pr.scheme;
  auto terms = parallel::map_indexed<double>(q.interior_size(), [&](std::size_t i) {
    const Vec& x = q.interior_points[i];
    const Mat h = u.hessian(x);
    detail::neg_log_det(h, i, x);
    const Mat hv = v.jet(x).hessian;
    return -q.interior_weights[i] * (h.llt().solve(hv)).trace();
  });
  return pairwise_sum(terms) + eval_L(v, pr);
}

/// lambda* = n Vol(P) / L(u), the minimizer of lambda -> F(lambda u).
inline double optimal_scaling(const Potential& u, const Problem& pr) {
  const PLIntegrals li = detail::integrals(u, pr);
  const double L = li.linear_part();
  const double scale = std::abs(li.boundary) + std::abs(li.weighted_interior);
  if (!(L > 1e-12 * scale))
    throw Error(ErrorKind::NonpositiveLinearPart,
                "L(u) = " + std::to_string(L) + "; F is unbounded below along the scaling ray");
  return pr.dim() * pr.polytope.moments().volume / L;
}

struct ProbeRow {
  double integral = 0.0;  // int_P u dx
  double F = 0.0;
};

/// (int_P u dx, F(u)) for each member of the family, in order.
inline std::vector<ProbeRow> coercivity_probe(const std::vector<Potential>& family, const Problem& pr) {
  std::vector<ProbeRow> rows;
  rows.reserve(family.size());
  for (const auto& u : family) rows.push_back({integral_of(u, pr), eval_F(u, pr).F});
  return rows;
}

}  // namespace abreu
