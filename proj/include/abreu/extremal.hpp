#pragma once

#include "abreu/error.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"

namespace abreu {

/// s = Rbar + theta_X, the affine function that makes L vanish on all affine functions.
struct ExtremalAffine {
  AffineFunction s;
  double rbar = 0.0;
  AffineFunction theta;  // int_P theta dx = 0

  double operator()(const Vec& x) const { return s.value(x); }
};

/// Solves int_dP f dsigma = int_P s f dx for f in {1, x_1, ..., x_n}.
/// In coordinates centred at the barycenter c the system splits:
/// s = Rbar + <a, x - c> with C a = int_dP (x - c) dsigma, C the central second moment.
inline ExtremalAffine solve_extremal_affine(const MomentTable& m) {
  if (!(m.volume > 0.0)) throw Error(ErrorKind::SingularMomentSystem, "volume is not positive");
  const Vec c = m.first / m.volume;
  const Mat central = m.second - m.volume * c * c.transpose();
  const Vec rhs = m.boundary_first - m.boundary_mass * c;
  Eigen::LLT<Mat> llt(central);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularMomentSystem, "moment matrix is not positive definite");
  const Vec diag = Mat(llt.matrixL()).diagonal();
  if (diag.minCoeff() <= 1e-12 * std::sqrt(m.second.diagonal().maxCoeff()))
    throw Error(ErrorKind::SingularMomentSystem, "moment matrix is numerically singular");
  const Vec a = llt.solve(rhs);

  ExtremalAffine e;
  e.rbar = m.boundary_mass / m.volume;
  e.s = AffineFunction(e.rbar - a.dot(c), a);
  e.theta = AffineFunction(-a.dot(c), a);
  return e;
}

inline ExtremalAffine solve_extremal_affine(const DelzantPolytope& p) { return solve_extremal_affine(p.moments()); }

}  // namespace abreu
