#pragma once

// Exact integrals of piecewise-linear functions over P and dP: each piece is
// integrated over its cell {x in P : piece k attains the max}, obtained by
// clipping P with the crease halfspaces, using closed-form simplex moments.

#include "abreu/error.hpp"
#include "abreu/extremal.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"
#include "abreu/region.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace abreu {

struct PLIntegrals {
  double interior = 0.0;           // int_P f dx
  double boundary = 0.0;           // int_dP f dsigma
  double weighted_interior = 0.0;  // int_P s f dx

  double linear_part() const { return boundary - weighted_interior; }
};

namespace detail {

/// Cell of piece k; ties go to the lowest index.
inline std::vector<Halfspace> pl_cell(const PLFunction& f, std::size_t k, const DelzantPolytope& p, bool& empty) {
  empty = false;
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < p.facet_count(); ++i) hs.push_back({p.normal(i), p.support(i), p.density(i)});
  const double scale = 1.0 + p.diameter();
  const AffineFunction& gk = f.pieces[k];
  for (std::size_t j = 0; j < f.pieces.size(); ++j) {
    if (j == k) continue;
    const AffineFunction& gj = f.pieces[j];
    // g_j <= g_k  <=>  <a_j - a_k, x> <= a0_k - a0_j
    const Vec nrm = gj.a - gk.a;
    const double off = gk.a0 - gj.a0;
    const double nn = nrm.norm();
    if (nn <= 1e-14 * (1.0 + gj.a.norm() + gk.a.norm())) {
      if (j < k ? !(off > 0.0) : off < 0.0) {
        empty = true;
        return hs;
      }
      continue;
    }
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
      const Vec l = p.normal(i);
      const double ln = l.norm();
      const double cosang = nrm.dot(l) / (nn * ln);
      if (std::abs(std::abs(cosang) - 1.0) > 1e-12) continue;
      const double ratio = nn / ln * (cosang > 0 ? 1.0 : -1.0);
      if (std::abs(off - ratio * p.support(i)) <= 1e-12 * nn * scale)
        throw Error(ErrorKind::ClipFailure, "crease between pieces " + std::to_string(k) + " and " +
                                                std::to_string(j) + " lies along facet " + std::to_string(i) +
                                                "; perturb the offset");
    }
    hs.push_back({nrm, off, 0.0});
  }
  return hs;
}

}  // namespace detail

inline PLIntegrals pl_integrals(const PLFunction& f, const DelzantPolytope& p, const ExtremalAffine& ext) {
  if (f.pieces.empty()) throw Error(ErrorKind::ClipFailure, "PL function has no pieces");
  PLIntegrals out;
  const AffineFunction& s = ext.s;
  for (std::size_t k = 0; k < f.pieces.size(); ++k) {
    bool empty = false;
    auto hs = detail::pl_cell(f, k, p, empty);
    if (empty) continue;
    const ConvexRegion cell(p.dim(), std::move(hs));
    if (cell.empty()) continue;
    const Moments in = cell.interior_moments();
    const Moments bd = cell.boundary_moments();
    const AffineFunction& g = f.pieces[k];
    out.interior += g.a0 * in.mass + g.a.dot(in.first);
    out.boundary += g.a0 * bd.mass + g.a.dot(bd.first);
    out.weighted_interior += s.a0 * g.a0 * in.mass + s.a0 * g.a.dot(in.first) + g.a0 * s.a.dot(in.first) +
                             s.a.dot(in.second * g.a);
  }
  return out;
}

inline PLIntegrals affine_integrals(const AffineFunction& f, const DelzantPolytope& p, const ExtremalAffine& ext) {
  const MomentTable& m = p.moments();
  const AffineFunction& s = ext.s;
  PLIntegrals out;
  out.interior = f.a0 * m.volume + f.a.dot(m.first);
  out.boundary = f.a0 * m.boundary_mass + f.a.dot(m.boundary_first);
  out.weighted_interior = s.a0 * f.a0 * m.volume + s.a0 * f.a.dot(m.first) + f.a0 * s.a.dot(m.first) +
                          s.a.dot(m.second * f.a);
  return out;
}

/// L(f) for a PL function by exact clipping.
inline double eval_L_pl(const PLFunction& f, const DelzantPolytope& p, const ExtremalAffine& ext) {
  return pl_integrals(f, p, ext).linear_part();
}

}  // namespace abreu
