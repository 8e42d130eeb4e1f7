#pragma once

// Boundary-graded quadrature on Delzant polytopes.
//
// P is fanned from its barycenter c over a triangulation of each facet. On a
// cone x = c + t (y - c), y in the facet simplex, the radial variable t is
// integrated on a geometric mesh toward t = 1 (ratio 1/2, level + 4 layers)
// whose innermost layer [1 - 2^-m, 1] is pulled in with a cubic map; the base
// variables are graded the same way toward both of their ends, which handles
// log(dist) blowups along facets and at corners.

#include "abreu/error.hpp"
#include "abreu/parallel.hpp"
#include "abreu/polytope.hpp"
#include "abreu/types.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace abreu {

/// Gauss points per graded layer.
inline constexpr int kGaussPerLayer = 8;
inline constexpr int kExtraLayers = 4;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with q points on [0, 1].
inline Rule1D gauss_legendre(int q) {
  Rule1D r;
  r.nodes.resize(q);
  r.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= q; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = q * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[q - 1 - i] = 0.5 * (x + 1.0);
    r.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

/// Rule on (0, 1) graded toward 1.
inline Rule1D graded_rule(int level) {
  const int layers = level + kExtraLayers;
  const Rule1D g = gauss_legendre(kGaussPerLayer);
  Rule1D r;
  double a = 0.0;
  for (int k = 1; k <= layers; ++k) {
    const double b = 1.0 - std::ldexp(1.0, -k);
    for (int i = 0; i < kGaussPerLayer; ++i) {
      r.nodes.push_back(a + (b - a) * g.nodes[i]);
      r.weights.push_back((b - a) * g.weights[i]);
    }
    a = b;
  }
  const double h = 1.0 - a;
  for (int i = kGaussPerLayer - 1; i >= 0; --i) {
    const double s = 1.0 - g.nodes[i];
    r.nodes.push_back(1.0 - h * s * s * s);
    r.weights.push_back(3.0 * h * s * s * g.weights[i]);
  }
  return r;
}

/// Rule on (0, 1) graded toward both endpoints.
inline Rule1D symmetric_graded_rule(int level) {
  const Rule1D half = graded_rule(level);
  Rule1D r;
  for (std::size_t i = half.nodes.size(); i-- > 0;) {
    r.nodes.push_back(0.5 * (1.0 - half.nodes[i]));
    r.weights.push_back(0.5 * half.weights[i]);
  }
  for (std::size_t i = 0; i < half.nodes.size(); ++i) {
    r.nodes.push_back(0.5 * (1.0 + half.nodes[i]));
    r.weights.push_back(0.5 * half.weights[i]);
  }
  return r;
}

struct QuadratureScheme {
  int dim = 0;
  int level = 0;
  std::vector<Vec> interior_points;
  std::vector<double> interior_weights;
  std::vector<Vec> boundary_points;
  std::vector<double> boundary_weights;  // dsigma density included
  std::vector<int> boundary_facets;

  std::size_t interior_size() const { return interior_points.size(); }
  std::size_t boundary_size() const { return boundary_points.size(); }
};

inline QuadratureScheme build_scheme(const DelzantPolytope& p, int level) {
  if (level < 1) throw Error(ErrorKind::InvalidLevel, "level must be >= 1, got " + std::to_string(level));
  const int n = p.dim();
  const Vec c = p.moments().barycenter();
  const Rule1D radial = graded_rule(level);
  const Rule1D base = symmetric_graded_rule(level);

  QuadratureScheme q;
  q.dim = n;
  q.level = level;
  auto add_interior = [&](const Vec& x, double w) {
    q.interior_points.push_back(x);
    q.interior_weights.push_back(w);
  };
  auto add_boundary = [&](const Vec& x, double w, int facet) {
    q.boundary_points.push_back(x);
    q.boundary_weights.push_back(w);
    q.boundary_facets.push_back(facet);
  };

  const auto& region = p.region();
  for (std::size_t f = 0; f < p.facet_count(); ++f) {
    const double rho = p.density(f);
    for (const auto& simplex : region.triangulate_facet(f)) {
      const auto y = region.points(simplex);
      if (n == 1) {
        const double len = (y[0] - c).norm();
        for (std::size_t i = 0; i < radial.nodes.size(); ++i)
          add_interior(c + radial.nodes[i] * (y[0] - c), radial.weights[i] * len);
        add_boundary(y[0], rho, static_cast<int>(f));
      } else if (n == 2) {
        Mat m(2, 2);
        m.col(0) = y[0] - c;
        m.col(1) = y[1] - c;
        const double det = std::abs(m.determinant());
        for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
          const double t = radial.nodes[i];
          for (std::size_t j = 0; j < base.nodes.size(); ++j) {
            const double s = base.nodes[j];
            const Vec yb = (1.0 - s) * y[0] + s * y[1];
            add_interior(c + t * (yb - c), radial.weights[i] * base.weights[j] * t * det);
          }
        }
        const double len = (y[1] - y[0]).norm();
        for (std::size_t j = 0; j < base.nodes.size(); ++j) {
          const double s = base.nodes[j];
          add_boundary((1.0 - s) * y[0] + s * y[1], rho * len * base.weights[j], static_cast<int>(f));
        }
      } else {
        const Vec e0 = y[0] - c, e1 = y[1] - y[0], e2 = y[2] - y[1];
        Mat m(3, 3);
        m.col(0) = e0;
        m.col(1) = e1;
        m.col(2) = e2;
        const double det = std::abs(m.determinant());
        const double area2 = Eigen::Vector3d(e1(0), e1(1), e1(2)).cross(Eigen::Vector3d(e2(0), e2(1), e2(2))).norm();
        for (std::size_t a = 0; a < base.nodes.size(); ++a) {
          const double s1 = base.nodes[a];
          for (std::size_t b = 0; b < base.nodes.size(); ++b) {
            const double s2 = base.nodes[b];
            const Vec yb = y[0] + s1 * e1 + s1 * s2 * e2;
            const double wb = base.weights[a] * base.weights[b] * s1;
            for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
              const double t = radial.nodes[i];
              add_interior(c + t * (yb - c), radial.weights[i] * wb * t * t * det);
            }
            add_boundary(yb, rho * area2 * wb, static_cast<int>(f));
          }
        }
      }
    }
  }
  return q;
}

namespace detail {

template <typename F>
double integrate_nodes(const std::vector<Vec>& pts, const std::vector<double>& w, F&& f, const char* where) {
  auto terms = parallel::map_indexed<double>(pts.size(), [&](std::size_t i) {
    const double v = f(pts[i]);
    if (!std::isfinite(v))
      throw Error(ErrorKind::NonFiniteIntegrand,
                  std::string(where) + " node " + std::to_string(i) + " at " + format_vec(pts[i]) + " gives " +
                      std::to_string(v));
    return w[i] * v;
  });
  return pairwise_sum(terms);
}

}  // namespace detail

/// Sum of w_i f(x_i) over interior nodes (pairwise summation, fixed order).
template <typename F>
double integrate_interior(const QuadratureScheme& q, F&& f) {
  return detail::integrate_nodes(q.interior_points, q.interior_weights, std::forward<F>(f), "interior");
}

/// Sum of w_i f(x_i) over boundary nodes; weights carry the dsigma density.
template <typename F>
double integrate_boundary(const QuadratureScheme& q, F&& f) {
  return detail::integrate_nodes(q.boundary_points, q.boundary_weights, std::forward<F>(f), "boundary");
}

/// Discrete probability measure on the unit ball with density proportional to
/// exp(-1/(1-|z|^2)); the normalizing constant is fixed by the rule itself.
struct BallRule {
  std::vector<Vec> points;
  std::vector<double> weights;
};

inline double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

inline BallRule mollifier_rule(int dim, int order = 24) {
  BallRule b;
  const Rule1D g = gauss_legendre(order);
  if (dim == 1) {
    for (int i = 0; i < order; ++i) {
      const double z = 2.0 * g.nodes[i] - 1.0;
      b.points.push_back(Vec::Constant(1, z));
      b.weights.push_back(2.0 * g.weights[i] * bump(z * z));
    }
  } else if (dim == 2) {
    const int na = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double r = g.nodes[i];
      for (int k = 0; k < na; ++k) {
        const double th = 2.0 * std::numbers::pi * k / na;
        Vec z(2);
        z << r * std::cos(th), r * std::sin(th);
        b.points.push_back(z);
        b.weights.push_back(g.weights[i] * r * (2.0 * std::numbers::pi / na) * bump(r * r));
      }
    }
  } else {
    const int na = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double r = g.nodes[i];
      for (int j = 0; j < order; ++j) {
        const double ct = 2.0 * g.nodes[j] - 1.0;
        const double st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < na; ++k) {
          const double ph = 2.0 * std::numbers::pi * k / na;
          Vec z(3);
          z << r * st * std::cos(ph), r * st * std::sin(ph), r * ct;
          b.points.push_back(z);
          b.weights.push_back(g.weights[i] * r * r * 2.0 * g.weights[j] * (2.0 * std::numbers::pi / na) *
                              bump(r * r));
        }
      }
    }
  }
  const double z = pairwise_sum(b.weights);
  for (double& w : b.weights) w /= z;
  return b;
}

}  // namespace abreu
