#pragma once

// Minimization of F over u = s_G u_P + sum_a c_a m_a (monomials of degree <= D)
// by quasi-Newton descent. Every trial point must keep the smallest Hessian
// eigenvalue >= min_eigenvalue at all interior nodes (the log det barrier is
// enforced before evaluation) and is re-normalized at p before acceptance.

#include "abreu/abreu_operator.hpp"
#include "abreu/error.hpp"
#include "abreu/functional.hpp"
#include "abreu/parallel.hpp"
#include "abreu/potentials.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace abreu {

struct MinimizeConfig {
  int degree = 6;
  int level = 4;
  double grad_tol = 1e-7;
  int max_iterations = 500;
  double backtrack = 0.5;
  double min_eigenvalue = 1e-9;
  std::optional<Vec> normalization_point;  // barycenter when unset
};

struct TraceRow {
  int iteration = 0;
  double F = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double boundary_integral = 0.0;  // int_dP u dsigma
  double interior_integral = 0.0;  // int_P u dx
};

struct MinimizeResult {
  ParametrizedPotential minimizer;
  std::vector<TraceRow> trace;
  bool converged = false;
  std::vector<std::string> diagnostics;
};

/// Per-node tables for fast evaluation of F and its coefficient gradient on a
/// fixed monomial basis and fixed Guillemin scale.
class CoefficientModel {
 public:
  CoefficientModel(const Problem& pr, const Polynomial& basis, double guillemin_scale)
      : pr_(pr), basis_(basis), scale_(guillemin_scale), n_(pr.dim()), m_(basis.size()) {
    const auto& q = pr.scheme;
    const GuilleminPotential g(pr.polytope);
    const std::size_t ni = q.interior_size();
    g_hess_.resize(ni);
    basis_hess_.assign(ni, std::vector<Mat>(m_));
    std::vector<std::vector<double>> bvals(m_, std::vector<double>(ni)), svals(m_, std::vector<double>(ni));
    std::vector<double> gi(ni), gsi(ni);
    for (std::size_t i = 0; i < ni; ++i) {
      const Vec& x = q.interior_points[i];
      const double w = q.interior_weights[i];
      const double sx = pr.extremal.s.value(x);
      if (scale_ != 0.0) {
        const Jet j = g.jet(x);
        g_hess_[i] = scale_ * j.hessian;
        gi[i] = w * scale_ * j.value;
        gsi[i] = w * sx * scale_ * j.value;
      } else {
        g_hess_[i] = Mat::Zero(n_, n_);
      }
      for (std::size_t a = 0; a < m_; ++a) {
        const Jet mj = basis_.monomial_jet(a, x);
        basis_hess_[i][a] = mj.hessian;
        bvals[a][i] = w * mj.value;
        svals[a][i] = w * sx * mj.value;
      }
    }
    const std::size_t nb = q.boundary_size();
    std::vector<std::vector<double>> bd(m_, std::vector<double>(nb));
    std::vector<double> gb(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      const Vec& x = q.boundary_points[k];
      const double w = q.boundary_weights[k];
      gb[k] = scale_ != 0.0 ? w * scale_ * g.value(x) : 0.0;
      for (std::size_t a = 0; a < m_; ++a) bd[a][k] = w * basis_.monomial_jet(a, x).value;
    }
    g_boundary_ = pairwise_sum(gb);
    g_interior_ = pairwise_sum(gi);
    g_weighted_ = pairwise_sum(gsi);
    basis_boundary_.resize(static_cast<Eigen::Index>(m_));
    basis_interior_.resize(static_cast<Eigen::Index>(m_));
    basis_weighted_.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t a = 0; a < m_; ++a) {
      basis_boundary_(a) = pairwise_sum(bd[a]);
      basis_interior_(a) = pairwise_sum(bvals[a]);
      basis_weighted_(a) = pairwise_sum(svals[a]);
    }
  }

  std::size_t size() const { return m_; }
  const Polynomial& basis() const { return basis_; }

  Mat hessian_at(std::size_t i, const Eigen::VectorXd& c) const {
    Mat h = g_hess_[i];
    for (std::size_t a = 0; a < m_; ++a)
      if (c(a) != 0.0) h += c(a) * basis_hess_[i][a];
    return h;
  }

  /// Smallest Hessian eigenvalue over interior nodes.
  double min_eigenvalue(const Eigen::VectorXd& c) const {
    auto mins = parallel::map_indexed<double>(pr_.scheme.interior_size(), [&](std::size_t i) {
      const Mat h = hessian_at(i, c);
      if (n_ == 1) return h(0, 0);
      if (n_ == 2) {
        const double tr = h(0, 0) + h(1, 1);
        const double disc = std::sqrt(std::max(0.0, 0.25 * (h(0, 0) - h(1, 1)) * (h(0, 0) - h(1, 1)) + h(0, 1) * h(0, 1)));
        return 0.5 * tr - disc;
      }
      return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
    });
    double m = std::numeric_limits<double>::infinity();
    for (double v : mins) m = std::min(m, v);
    return m;
  }

  double boundary_integral(const Eigen::VectorXd& c) const { return g_boundary_ + basis_boundary_.dot(c); }
  double interior_integral(const Eigen::VectorXd& c) const { return g_interior_ + basis_interior_.dot(c); }
  double linear_part(const Eigen::VectorXd& c) const {
    return (g_boundary_ - g_weighted_) + (basis_boundary_ - basis_weighted_).dot(c);
  }

  struct Eval {
    double F = 0.0;
    Eigen::VectorXd gradient;
  };

  /// F and dF/dc. Assumes the Hessians are positive definite at every node.
  Eval evaluate(const Eigen::VectorXd& c) const {
    const auto& q = pr_.scheme;
    const std::size_t ni = q.interior_size();
    struct NodeTerm {
      double entropy = 0.0;
      Eigen::VectorXd grad;
    };
    auto terms = parallel::map_indexed<NodeTerm>(ni, [&](std::size_t i) {
      const Mat h = hessian_at(i, c);
      const double w = q.interior_weights[i];
      NodeTerm t;
      t.entropy = w * detail::neg_log_det(h, i, q.interior_points[i]);
      const Mat hinv = h.llt().solve(Mat::Identity(n_, n_));
      t.grad.resize(static_cast<Eigen::Index>(m_));
      for (std::size_t a = 0; a < m_; ++a) t.grad(a) = -w * hinv.cwiseProduct(basis_hess_[i][a]).sum();
      return t;
    });
    std::vector<double> ent(ni);
    for (std::size_t i = 0; i < ni; ++i) ent[i] = terms[i].entropy;
    Eval e;
    e.F = pairwise_sum(ent) + linear_part(c);
    e.gradient = basis_boundary_ - basis_weighted_;
    std::vector<double> col(ni);
    for (std::size_t a = 0; a < m_; ++a) {
      for (std::size_t i = 0; i < ni; ++i) col[i] = terms[i].grad(a);
      e.gradient(a) += pairwise_sum(col);
    }
    return e;
  }

  ParametrizedPotential potential(const Eigen::VectorXd& c) const {
    Polynomial v = basis_;
    v.coeffs() = c;
    ParametrizedPotential u(pr_.polytope, v, scale_);
    return u;
  }

 private:
  const Problem& pr_;
  Polynomial basis_;
  double scale_;
  int n_;
  std::size_t m_;
  std::vector<Mat> g_hess_;
  std::vector<std::vector<Mat>> basis_hess_;
  double g_boundary_ = 0.0, g_interior_ = 0.0, g_weighted_ = 0.0;
  Eigen::VectorXd basis_boundary_, basis_interior_, basis_weighted_;
};

/// Coefficient-space gradient g_a = first_variation(u, m_a) over the degree-D monomial basis.
inline Eigen::VectorXd gradient_F(const ParametrizedPotential& u, const Problem& pr, int degree) {
  Polynomial basis = Polynomial::basis(pr.dim(), std::max(degree, u.smooth.degree()));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < u.smooth.size(); ++k) c(basis.find(u.smooth.exponents()[k])) += u.smooth.coeffs()(k);
  const CoefficientModel model(pr, basis, u.guillemin_scale);
  return model.evaluate(c).gradient;
}

namespace detail {

/// Subtracts the supporting plane at p by adjusting degree-0/1 coefficients.
inline void renormalize(const CoefficientModel& model, Eigen::VectorXd& c, const Vec& p) {
  const ParametrizedPotential u = model.potential(c);
  const AffineFunction plane = supporting_plane(Potential(u), p);
  const Polynomial& b = model.basis();
  c(b.find({0, 0, 0})) -= plane.a0;
  for (int j = 0; j < plane.dim(); ++j) {
    Exponent e{0, 0, 0};
    e[j] = 1;
    c(b.find(e)) -= plane.a(j);
  }
}

}  // namespace detail

inline MinimizeResult minimize(const ParametrizedPotential& start, const Problem& pr, const MinimizeConfig& cfg) {
  if (!(cfg.grad_tol > 0.0 && cfg.min_eigenvalue > 0.0 && cfg.backtrack > 0.0 && cfg.backtrack < 1.0))
    throw Error(ErrorKind::StartInadmissible, "tolerances must be positive and the backtracking factor in (0, 1)");
  const Vec p = cfg.normalization_point.value_or(pr.polytope.moments().barycenter());
  if (!pr.polytope.contains_strictly(p))
    throw Error(ErrorKind::NonInteriorPoint, "normalization point " + format_vec(p) + " is not interior");

  const Polynomial basis = Polynomial::basis(pr.dim(), std::max(cfg.degree, start.smooth.degree()));
  const CoefficientModel model(pr, basis, start.guillemin_scale);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < start.smooth.size(); ++k) c(basis.find(start.smooth.exponents()[k])) += start.smooth.coeffs()(k);

  const double eig0 = model.min_eigenvalue(c);
  if (!(eig0 >= cfg.min_eigenvalue))
    throw Error(ErrorKind::StartInadmissible,
                "smallest Hessian eigenvalue at the nodes is " + std::to_string(eig0));
  detail::renormalize(model, c, p);

  // Free coordinates: monomials of degree >= 2. Affine ones are fixed by normalization.
  std::vector<Eigen::Index> free;
  for (std::size_t a = 0; a < basis.size(); ++a)
    if (Polynomial::degree_of(basis.exponents()[a]) >= 2) free.push_back(static_cast<Eigen::Index>(a));
  const Eigen::Index nf = static_cast<Eigen::Index>(free.size());
  auto restrict = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r(nf);
    for (Eigen::Index k = 0; k < nf; ++k) r(k) = v(free[k]);
    return r;
  };

  MinimizeResult result;
  auto ev = model.evaluate(c);
  Eigen::VectorXd g = restrict(ev.gradient);
  double F = ev.F;
  result.trace.push_back({0, F, g.norm(), 0.0, model.boundary_integral(c), model.interior_integral(c)});
  const double start_mass = std::abs(model.interior_integral(c));
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(nf, nf);
  bool fresh = true;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (g.norm() < cfg.grad_tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd d = -hinv * g;
    if (d.dot(g) >= 0.0) {
      hinv.setIdentity();
      fresh = true;
      d = -g;
    }
    double t = fresh ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    bool accepted = false;
    Eigen::VectorXd c_new;
    CoefficientModel::Eval ev_new;
    while (true) {
      c_new = c;
      for (Eigen::Index k = 0; k < nf; ++k) c_new(free[k]) += t * d(k);
      if (model.min_eigenvalue(c_new) >= cfg.min_eigenvalue) {
        detail::renormalize(model, c_new, p);
        ev_new = model.evaluate(c_new);
        if (ev_new.F < F + 1e-4 * t * d.dot(g) || (ev_new.F < F && t * d.norm() < 1e-10)) {
          accepted = true;
          break;
        }
      }
      t *= cfg.backtrack;
      if (t * d.norm() < 1e-16 * (1.0 + c.norm())) break;
    }
    if (!accepted) {
      if (!fresh) {
        hinv.setIdentity();
        fresh = true;
        --it;
        continue;
      }
      throw Error(ErrorKind::StalledLineSearch, "no admissible decreasing step at iteration " + std::to_string(it) +
                                                    ", |g| = " + std::to_string(g.norm()));
    }
    const Eigen::VectorXd g_new = restrict(ev_new.gradient);
    const Eigen::VectorXd s = t * d;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (fresh) hinv *= sy / y.dot(y);
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(nf, nf);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    c = c_new;
    g = g_new;
    F = ev_new.F;
    result.trace.push_back({it, F, g.norm(), s.norm(), model.boundary_integral(c), model.interior_integral(c)});

    const double mass = model.interior_integral(c);
    const double bnd = model.boundary_integral(c);
    if (std::abs(mass) > 10.0 * std::max(start_mass, 1e-300) && model.linear_part(c) < 1e-6 * std::abs(bnd))
      result.diagnostics.push_back("UnstableDirection: L(u) -> 0 while int u dx grows (iteration " +
                                   std::to_string(it) + ")");
  }
  if (!result.converged && g.norm() < cfg.grad_tol) result.converged = true;
  result.minimizer = model.potential(c);
  return result;
}

}  // namespace abreu
