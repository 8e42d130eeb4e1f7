#pragma once

#include "abreu/error.hpp"
#include "abreu/polytope.hpp"
#include "abreu/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace abreu {

/// Value, gradient and Hessian at one point.
struct Jet {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

struct AffineFunction {
  double a0 = 0.0;
  Vec a;

  AffineFunction() = default;
  AffineFunction(double c, Vec g) : a0(c), a(std::move(g)) {}
  static AffineFunction zero(int dim) { return {0.0, Vec::Zero(dim)}; }

  int dim() const { return static_cast<int>(a.size()); }
  double value(const Vec& x) const { return a0 + a.dot(x); }
  Jet jet(const Vec& x) const { return {value(x), a, Mat::Zero(dim(), dim())}; }
  /// Largest value over a finite point set (the sup over a polytope sits at a vertex).
  double max_over(const std::vector<Vec>& pts) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const Vec& p : pts) m = std::max(m, value(p));
    return m;
  }
  AffineFunction operator+(const AffineFunction& o) const { return {a0 + o.a0, a + o.a}; }
  AffineFunction operator-(const AffineFunction& o) const { return {a0 - o.a0, a - o.a}; }
  AffineFunction operator*(double t) const { return {t * a0, t * a}; }
};

/// Max of affine pieces. Nonsmooth points use the lowest-index maximizer.
struct PLFunction {
  std::vector<AffineFunction> pieces;

  int dim() const { return pieces.empty() ? 0 : pieces.front().dim(); }

  std::size_t active_piece(const Vec& x) const {
    std::size_t best = 0;
    double v = pieces[0].value(x);
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      const double w = pieces[k].value(x);
      if (w > v) v = w, best = k;
    }
    return best;
  }
  double value(const Vec& x) const { return pieces[active_piece(x)].value(x); }
  Jet jet(const Vec& x) const { return pieces[active_piece(x)].jet(x); }

  /// Two pieces, one of them identically zero.
  bool is_simple() const {
    if (pieces.size() != 2) return false;
    auto is_zero = [](const AffineFunction& f) { return f.a0 == 0.0 && f.a.isZero(0.0); };
    return is_zero(pieces[0]) || is_zero(pieces[1]);
  }

  /// max{a0 + <a, x>, 0}.
  static PLFunction simple(const AffineFunction& crease) {
    return {{crease, AffineFunction::zero(crease.dim())}};
  }
};

using Exponent = std::array<int, kMaxDim>;

/// Polynomial in monomial form, sum_k c_k x^{e_k}.
namespace detail {

/// Table of x_a^p for small p; larger powers fall back to std::pow.
class Powers {
 public:
  static constexpr int kCached = 17;

  Powers(const Vec& x, int dim) : x_(x) {
    for (int a = 0; a < dim; ++a) {
      t_[a][0] = 1.0;
      for (int p = 1; p < kCached; ++p) t_[a][p] = t_[a][p - 1] * x(a);
    }
  }

  double operator()(int a, int p) const { return p < kCached ? t_[a][p] : std::pow(x_(a), p); }

 private:
  const Vec& x_;
  double t_[kMaxDim][kCached];
};

}  // namespace detail

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}
  Polynomial(int dim, std::vector<Exponent> exps, Eigen::VectorXd coeffs)
      : dim_(dim), exponents_(std::move(exps)), coeffs_(std::move(coeffs)) {}

  /// All monomials of total degree <= degree, graded, lexicographically descending within a degree.
  static Polynomial basis(int dim, int degree) {
    std::vector<Exponent> exps;
    for (int d = 0; d <= degree; ++d) {
      if (dim == 1) {
        exps.push_back({d, 0, 0});
      } else if (dim == 2) {
        for (int i = d; i >= 0; --i) exps.push_back({i, d - i, 0});
      } else {
        for (int i = d; i >= 0; --i)
          for (int j = d - i; j >= 0; --j) exps.push_back({i, j, d - i - j});
      }
    }
    return Polynomial(dim, exps, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(exps.size())));
  }

  int dim() const { return dim_; }
  std::size_t size() const { return exponents_.size(); }
  const std::vector<Exponent>& exponents() const { return exponents_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  static int degree_of(const Exponent& e) { return e[0] + e[1] + e[2]; }
  int degree() const {
    int d = 0;
    for (const auto& e : exponents_) d = std::max(d, degree_of(e));
    return d;
  }

  /// Index of monomial e, or -1.
  int find(const Exponent& e) const {
    for (std::size_t k = 0; k < exponents_.size(); ++k)
      if (exponents_[k] == e) return static_cast<int>(k);
    return -1;
  }

  void add_term(const Exponent& e, double c) {
    const int k = find(e);
    if (k >= 0) {
      coeffs_(k) += c;
      return;
    }
    exponents_.push_back(e);
    coeffs_.conservativeResize(static_cast<Eigen::Index>(exponents_.size()));
    coeffs_(coeffs_.size() - 1) = c;
  }

  void add_affine(const AffineFunction& f) {
    add_term({0, 0, 0}, f.a0);
    for (int j = 0; j < dim_; ++j) {
      Exponent e{0, 0, 0};
      e[j] = 1;
      add_term(e, f.a(j));
    }
  }

  /// Value, gradient and Hessian of monomial k.
  Jet monomial_jet(std::size_t k, const Vec& x) const {
    Jet j{0.0, Vec::Zero(dim_), Mat::Zero(dim_, dim_)};
    const Exponent& e = exponents_[k];
    auto pw = [&](int axis, int p) { return p < 0 ? 0.0 : std::pow(x(axis), p); };
    auto factor = [&](int axis, int order) {
      // d^order/dx^order of x^e[axis]
      const int p = e[axis];
      if (order > p) return 0.0;
      double c = 1.0;
      for (int i = 0; i < order; ++i) c *= (p - i);
      return c * pw(axis, p - order);
    };
    std::array<double, kMaxDim> f0{}, f1{}, f2{};
    for (int a = 0; a < dim_; ++a) f0[a] = factor(a, 0), f1[a] = factor(a, 1), f2[a] = factor(a, 2);
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= f0[a];
    j.value = v;
    for (int a = 0; a < dim_; ++a) {
      double g = f1[a], h = f2[a];
      for (int b = 0; b < dim_; ++b)
        if (b != a) g *= f0[b], h *= f0[b];
      j.gradient(a) = g;
      j.hessian(a, a) = h;
      for (int b = a + 1; b < dim_; ++b) {
        double m = f1[a] * f1[b];
        for (int c = 0; c < dim_; ++c)
          if (c != a && c != b) m *= f0[c];
        j.hessian(a, b) = j.hessian(b, a) = m;
      }
    }
    return j;
  }

  double value(const Vec& x) const {
    const detail::Powers pw(x, dim_);
    double v = 0.0;
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      if (coeffs_(k) == 0.0) continue;
      double m = 1.0;
      for (int a = 0; a < dim_; ++a) m *= pw(a, exponents_[k][a]);
      v += coeffs_(k) * m;
    }
    return v;
  }

  Jet jet(const Vec& x) const {
    const detail::Powers pw(x, dim_);
    double v = 0.0;
    double g[kMaxDim] = {};
    double h[kMaxDim][kMaxDim] = {};
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      const double c = coeffs_(k);
      if (c == 0.0) continue;
      const Exponent& e = exponents_[k];
      double f0[kMaxDim], f1[kMaxDim], f2[kMaxDim];
      for (int a = 0; a < dim_; ++a) {
        const int q = e[a];
        f0[a] = pw(a, q);
        f1[a] = q >= 1 ? q * pw(a, q - 1) : 0.0;
        f2[a] = q >= 2 ? q * (q - 1) * pw(a, q - 2) : 0.0;
      }
      double m = c;
      for (int a = 0; a < dim_; ++a) m *= f0[a];
      v += m;
      for (int a = 0; a < dim_; ++a) {
        double ga = c * f1[a], ha = c * f2[a];
        for (int b = 0; b < dim_; ++b)
          if (b != a) ga *= f0[b], ha *= f0[b];
        g[a] += ga;
        h[a][a] += ha;
        for (int b = a + 1; b < dim_; ++b) {
          double hab = c * f1[a] * f1[b];
          for (int d = 0; d < dim_; ++d)
            if (d != a && d != b) hab *= f0[d];
          h[a][b] += hab;
        }
      }
    }
    Jet j{v, Vec(dim_), Mat(dim_, dim_)};
    for (int a = 0; a < dim_; ++a) {
      j.gradient(a) = g[a];
      for (int b = a; b < dim_; ++b) j.hessian(a, b) = j.hessian(b, a) = h[a][b];
    }
    return j;
  }

  Polynomial scaled(double t) const { return Polynomial(dim_, exponents_, t * coeffs_); }

 private:
  int dim_ = 0;
  std::vector<Exponent> exponents_;
  Eigen::VectorXd coeffs_;
};

/// u_P(x) = sum_i l_i(x) log l_i(x), l_i(x) = lambda_i - <l_i, x>, with 0 log 0 = 0.
class GuilleminPotential {
 public:
  GuilleminPotential() = default;
  explicit GuilleminPotential(const DelzantPolytope& p) : dim_(p.dim()) {
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
      normals_.push_back(p.normal(i));
      supports_.push_back(p.support(i));
    }
  }

  int dim() const { return dim_; }
  std::size_t facet_count() const { return normals_.size(); }

  double slack(std::size_t i, const Vec& x) const { return supports_[i] - normals_[i].dot(x); }

  /// Continuous extension to the closure; throws NonInteriorPoint outside P.
  double value(const Vec& x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < normals_.size(); ++i) {
      const double l = slack(i, x);
      const double tol = 1e-12 * (1.0 + std::abs(supports_[i]));
      if (l > tol)
        v += l * std::log(l);
      else if (l < -tol)
        throw Error(ErrorKind::NonInteriorPoint, "point " + format_vec(x) + " is outside the polytope");
    }
    return v;
  }

  Jet jet(const Vec& x) const {
    Jet j{0.0, Vec::Zero(dim_), Mat::Zero(dim_, dim_)};
    for (std::size_t i = 0; i < normals_.size(); ++i) {
      const Vec& n = normals_[i];
      const double l = slack(i, x);
      if (!(l > 0.0))
        throw Error(ErrorKind::BoundaryEvaluation,
                    "derivatives of u_P requested at " + format_vec(x) + " on or outside facet " + std::to_string(i));
      const double lg = std::log(l);
      j.value += l * lg;
      for (int a = 0; a < dim_; ++a) {
        j.gradient(a) -= (lg + 1.0) * n(a);
        for (int b = 0; b < dim_; ++b) j.hessian(a, b) += n(a) * n(b) / l;
      }
    }
    return j;
  }

  Mat hessian(const Vec& x) const { return jet(x).hessian; }

 private:
  int dim_ = 0;
  std::vector<Vec> normals_;
  std::vector<double> supports_;
};

/// u = scale * u_P + v with v a polynomial. scale = 1 is the search family u_P + v.
struct ParametrizedPotential {
  GuilleminPotential base;
  double guillemin_scale = 1.0;
  Polynomial smooth;

  ParametrizedPotential() = default;
  explicit ParametrizedPotential(const DelzantPolytope& p, Polynomial v = {}, double scale = 1.0)
      : base(p), guillemin_scale(scale), smooth(v.dim() == 0 ? Polynomial(p.dim()) : std::move(v)) {}

  int dim() const { return base.dim(); }

  double value(const Vec& x) const {
    const double g = guillemin_scale == 0.0 ? 0.0 : guillemin_scale * base.value(x);
    return g + smooth.value(x);
  }

  Jet jet(const Vec& x) const {
    Jet j = smooth.jet(x);
    if (guillemin_scale != 0.0) {
      const Jet g = base.jet(x);
      j.value += guillemin_scale * g.value;
      j.gradient += guillemin_scale * g.gradient;
      j.hessian += guillemin_scale * g.hessian;
    }
    return j;
  }

  Mat hessian(const Vec& x) const { return jet(x).hessian; }

  ParametrizedPotential scaled(double t) const {
    ParametrizedPotential u = *this;
    u.guillemin_scale *= t;
    u.smooth = smooth.scaled(t);
    return u;
  }

  ParametrizedPotential plus(const AffineFunction& f) const {
    ParametrizedPotential u = *this;
    u.smooth.add_affine(f);
    return u;
  }

  ParametrizedPotential plus(const Polynomial& v) const {
    ParametrizedPotential u = *this;
    for (std::size_t k = 0; k < v.size(); ++k) u.smooth.add_term(v.exponents()[k], v.coeffs()(k));
    return u;
  }
};

using Potential = std::variant<ParametrizedPotential, PLFunction, AffineFunction>;

inline double eval_value(const Potential& u, const Vec& x) {
  return std::visit([&](const auto& f) { return f.value(x); }, u);
}

/// Full jet; PL functions return the lowest-index active piece (zero Hessian).
inline Jet eval_potential(const Potential& u, const Vec& x) {
  return std::visit([&](const auto& f) { return f.jet(x); }, u);
}

inline Jet eval_guillemin(const GuilleminPotential& u, const Vec& x) { return u.jet(x); }

inline Potential scale_potential(const Potential& u, double t) {
  return std::visit(
      [&](const auto& f) -> Potential {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ParametrizedPotential>) {
          return f.scaled(t);
        } else if constexpr (std::is_same_v<T, PLFunction>) {
          PLFunction g = f;
          for (auto& piece : g.pieces) piece = piece * t;
          return g;
        } else {
          return f * t;
        }
      },
      u);
}

inline Potential add_affine(const Potential& u, const AffineFunction& a) {
  return std::visit(
      [&](const auto& f) -> Potential {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ParametrizedPotential>) {
          return f.plus(a);
        } else if constexpr (std::is_same_v<T, PLFunction>) {
          PLFunction g = f;
          for (auto& piece : g.pieces) piece = piece + a;
          return g;
        } else {
          return f + a;
        }
      },
      u);
}

/// Supporting plane of u at p: u(p) + <Du(p), x - p>.
inline AffineFunction supporting_plane(const Potential& u, const Vec& p) {
  const Jet j = eval_potential(u, p);
  return {j.value - j.gradient.dot(p), j.gradient};
}

/// u minus its supporting plane at p: value and gradient vanish at p.
inline Potential normalize(const Potential& u, const DelzantPolytope& poly, const Vec& p) {
  if (p.size() != poly.dim() || !poly.contains_strictly(p))
    throw Error(ErrorKind::NonInteriorPoint, "normalization point " + format_vec(p) + " is not interior");
  return add_affine(u, supporting_plane(u, p) * -1.0);
}

inline ParametrizedPotential normalize(const ParametrizedPotential& u, const DelzantPolytope& poly, const Vec& p) {
  return std::get<ParametrizedPotential>(normalize(Potential(u), poly, p));
}

}  // namespace abreu
