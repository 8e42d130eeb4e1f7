#pragma once

#include "abreu/error.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"
#include "abreu/quadrature.hpp"

#include <string>

namespace abreu {

/// u_h(x) = h^{-n} int rho((x - y)/h) u(y) dy = int rho(z) u(x - h z) dz, defined on P_h.
class MollifiedPotential {
 public:
  MollifiedPotential(Potential u, const DelzantPolytope& p, double h, int order = 24)
      : u_(std::move(u)), h_(h), rule_(mollifier_rule(p.dim(), order)) {
    if (!(h > 0.0)) throw Error(ErrorKind::MollifierTooWide, "width must be positive");
    std::vector<Halfspace> hs;
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
      normals_.push_back(p.normal(i));
      shrunk_.push_back(p.support(i) - p.facet(i).norm() * h);
      hs.push_back({normals_.back(), shrunk_.back(), 0.0});
    }
    if (!ConvexRegion(p.dim(), hs).full_dimensional())
      throw Error(ErrorKind::MollifierTooWide, "width " + std::to_string(h) + " exceeds the inradius");
  }

  double width() const { return h_; }

  /// Closed P_h: every ball x + hB lies in the closure of P.
  bool in_domain(const Vec& x) const {
    for (std::size_t i = 0; i < normals_.size(); ++i)
      if (normals_[i].dot(x) > shrunk_[i] + 1e-12) return false;
    return true;
  }

  double value(const Vec& x) const {
    if (!in_domain(x)) throw Error(ErrorKind::NonInteriorPoint, "point " + format_vec(x) + " is outside P_h");
    std::vector<double> terms(rule_.points.size());
    for (std::size_t k = 0; k < terms.size(); ++k)
      terms[k] = rule_.weights[k] * eval_value(u_, x - h_ * rule_.points[k]);
    return pairwise_sum(terms);
  }

 private:
  Potential u_;
  double h_;
  BallRule rule_;
  std::vector<Vec> normals_;
  std::vector<double> shrunk_;
};

inline MollifiedPotential mollify(const Potential& u, const DelzantPolytope& p, double h) {
  return MollifiedPotential(u, p, h);
}

}  // namespace abreu
