#pragma once

#include "abreu/error.hpp"
#include "abreu/extremal.hpp"
#include "abreu/parallel.hpp"
#include "abreu/pl_exact.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace abreu {

/// Tolerance below which L(f) counts as a violation.
inline constexpr double kViolationTolerance = 1e-9;

/// Simple PL test function max{<a, x> - c, 0} with unit crease direction a.
struct Crease {
  Vec direction;
  double offset = 0.0;
  int angle_index = 0;
  int offset_index = 0;

  PLFunction function() const { return PLFunction::simple(AffineFunction(-offset, direction)); }
};

/// Creases with directions on an angular grid (2D: `angles` equally spaced; 1D: +/-1;
/// 3D: a latitude-longitude grid) and `offsets` levels strictly between min_P <a,x> and max_P <a,x>.
inline std::vector<Crease> crease_grid(const DelzantPolytope& p, int angles, int offsets) {
  std::vector<Vec> dirs;
  const int n = p.dim();
  if (offsets <= 0) return {};
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (n == 2) {
    for (int k = 0; k < angles; ++k) {
      const double th = 2.0 * std::numbers::pi * k / angles;
      Vec a(2);
      a << std::cos(th), std::sin(th);
      dirs.push_back(a);
    }
  } else {
    const int lat = std::max(1, angles / 2);
    for (int i = 0; i < lat; ++i) {
      const double ph = std::numbers::pi * (i + 0.5) / lat;
      for (int k = 0; k < angles; ++k) {
        const double th = 2.0 * std::numbers::pi * k / angles;
        Vec a(3);
        a << std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph);
        dirs.push_back(a);
      }
    }
  }
  std::vector<Crease> grid;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& v : p.vertices()) {
      lo = std::min(lo, dirs[d].dot(v));
      hi = std::max(hi, dirs[d].dot(v));
    }
    for (int k = 0; k < offsets; ++k) {
      const double c = lo + (hi - lo) * (k + 1) / (offsets + 1);
      grid.push_back({dirs[d], c, static_cast<int>(d), k});
    }
  }
  return grid;
}

struct Condition46 {
  std::vector<double> margins;  // (n+1)/lambda_i - max_P s, per facet
  double sup_s = 0.0;
  bool pass = false;
};

/// Sufficient properness condition Rbar + theta_X < (n+1)/lambda_i for all i.
/// Needs the origin strictly inside P; the caller picks the translation.
inline Condition46 check_condition_46(const DelzantPolytope& p, const ExtremalAffine& ext) {
  for (std::size_t i = 0; i < p.facet_count(); ++i)
    if (!(p.support(i) > 0.0))
      throw Error(ErrorKind::OriginNotInterior,
                  "support of facet " + std::to_string(i) + " is not positive; translate P (e.g. barycentric_translate)");
  Condition46 c;
  c.sup_s = ext.s.max_over(p.vertices());
  c.pass = true;
  for (std::size_t i = 0; i < p.facet_count(); ++i) {
    c.margins.push_back((p.dim() + 1) / p.support(i) - c.sup_s);
    if (!(c.margins.back() > 0.0)) c.pass = false;
  }
  return c;
}

struct StabilityEntry {
  Crease crease;
  double L = 0.0;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;
  double min_L = std::numeric_limits<double>::infinity();  // +inf for an empty scan
  std::vector<std::size_t> violations;                     // indices with L <= tolerance
  std::optional<Condition46> condition46;                  // unset when the origin is not interior
};

inline StabilityReport scan_creases(const DelzantPolytope& p, const ExtremalAffine& ext, int angles, int offsets,
                                    double tolerance = kViolationTolerance) {
  StabilityReport r;
  const auto grid = crease_grid(p, angles, offsets);
  const auto values = parallel::map_indexed<double>(grid.size(), [&](std::size_t k) {
    return eval_L_pl(grid[k].function(), p, ext);
  });
  for (std::size_t k = 0; k < grid.size(); ++k) {
    r.entries.push_back({grid[k], values[k]});
    r.min_L = std::min(r.min_L, values[k]);
    if (values[k] <= tolerance) r.violations.push_back(k);
  }
  try {
    r.condition46 = check_condition_46(p, ext);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OriginNotInterior) throw;
  }
  return r;
}

}  // namespace abreu
