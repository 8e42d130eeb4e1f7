#pragma once

#include "abreu/error.hpp"
#include "abreu/region.hpp"
#include "abreu/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace abreu {

struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

/// Facet inequality <normal, x> < support with an integer (primitive) normal.
struct Facet {
  IVec normal;
  double support = 0.0;
  std::optional<Rational> exact_support;

  Facet() = default;
  Facet(IVec l, double lambda) : normal(std::move(l)), support(lambda) {}
  Facet(IVec l, Rational lambda) : normal(std::move(l)), support(lambda.value()), exact_support(lambda) {}

  Vec normal_real() const { return normal.cast<double>(); }
  double norm() const { return normal_real().norm(); }
};

struct ValidationReport {
  std::vector<Vec> vertices;
  std::vector<std::vector<int>> vertex_facets;  // the n facets meeting at each vertex
  std::vector<long long> determinants;          // det of those normals (rows, facet order)
};

/// Exact low-order moments of P and of the boundary measure dsigma.
struct MomentTable {
  double volume = 0.0;
  Vec first;    // int_P x dx
  Mat second;   // int_P x x^T dx
  double boundary_mass = 0.0;
  Vec boundary_first;  // int_dP x dsigma

  Vec barycenter() const { return first / volume; }
};

namespace detail {

inline long long integer_det(const std::vector<IVec>& rows) {
  const std::size_t n = rows.size();
  if (n == 1) return rows[0](0);
  if (n == 2) return rows[0](0) * rows[1](1) - rows[0](1) * rows[1](0);
  const auto& a = rows[0];
  const auto& b = rows[1];
  const auto& c = rows[2];
  return a(0) * (b(1) * c(2) - b(2) * c(1)) - a(1) * (b(0) * c(2) - b(2) * c(0)) +
         a(2) * (b(0) * c(1) - b(1) * c(0));
}

inline std::vector<Halfspace> facet_halfspaces(const std::vector<Facet>& facets) {
  std::vector<Halfspace> hs;
  hs.reserve(facets.size());
  for (const auto& f : facets) hs.push_back({f.normal_real(), f.support, 1.0 / f.norm()});
  return hs;
}

}  // namespace detail

/// Runs every Delzant check on a raw facet list. Throws abreu::Error on the first failure.
inline ValidationReport validate_delzant(int dim, const std::vector<Facet>& facets) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorKind::InvalidPolytope, "dimension must be in [1, 3], got " + std::to_string(dim));
  if (facets.empty()) throw Error(ErrorKind::InvalidPolytope, "facet list is empty");
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (facets[i].normal.size() != dim)
      throw Error(ErrorKind::InvalidPolytope, "facet " + std::to_string(i) + " normal has wrong length");
    if (facets[i].normal.isZero())
      throw Error(ErrorKind::InvalidPolytope, "facet " + std::to_string(i) + " has zero normal");
    if (!std::isfinite(facets[i].support))
      throw Error(ErrorKind::InvalidPolytope, "facet " + std::to_string(i) + " has non-finite support");
  }

  // A large box detects unboundedness: any vertex on it means a recession direction.
  auto hs = detail::facet_halfspaces(facets);
  double box = 1.0;
  for (const auto& f : facets) box = std::max(box, std::abs(f.support));
  box *= 1e6;
  const std::size_t nf = hs.size();
  for (int j = 0; j < dim; ++j) {
    Vec e = Vec::Zero(dim);
    e(j) = 1.0;
    hs.push_back({e, box, 0.0});
    hs.push_back({-e, box, 0.0});
  }
  ConvexRegion boxed(dim, hs);
  if (boxed.empty()) throw Error(ErrorKind::EmptyInterior, "the facet inequalities have no common solution");
  for (std::size_t v = 0; v < boxed.vertices().size(); ++v)
    for (int h : boxed.tight_at(v))
      if (static_cast<std::size_t>(h) >= nf)
        throw Error(ErrorKind::UnboundedPolytope, "facet normals do not positively span R^" + std::to_string(dim));

  ConvexRegion region(dim, detail::facet_halfspaces(facets));
  if (!region.full_dimensional())
    throw Error(ErrorKind::EmptyInterior, "polytope has no interior");

  for (std::size_t i = 0; i < nf; ++i) {
    if (region.affine_rank(region.face_vertices(i)) != dim - 1)
      throw Error(ErrorKind::RedundantFacet, "facet " + std::to_string(i) + " does not support a face of dimension " +
                                                 std::to_string(dim - 1));
    for (std::size_t j = 0; j < i; ++j)
      if (region.face_vertices(i) == region.face_vertices(j))
        throw Error(ErrorKind::RedundantFacet,
                    "facets " + std::to_string(j) + " and " + std::to_string(i) + " define the same face");
  }

  ValidationReport report;
  for (std::size_t v = 0; v < region.vertices().size(); ++v) {
    const Vec& x = region.vertices()[v];
    const auto& tight = region.tight_at(v);
    if (static_cast<int>(tight.size()) != dim)
      throw Error(ErrorKind::NonDelzantVertex, "vertex " + format_vec(x) + " lies on " + std::to_string(tight.size()) +
                                                   " facets (not simple), determinant 0");
    std::vector<IVec> rows;
    for (int h : tight) rows.push_back(facets[h].normal);
    const long long det = detail::integer_det(rows);
    if (std::llabs(det) != 1)
      throw Error(ErrorKind::NonDelzantVertex,
                  "vertex " + format_vec(x) + " has determinant " + std::to_string(det));
    report.vertices.push_back(x);
    report.vertex_facets.push_back(tight);
    report.determinants.push_back(det);
  }
  return report;
}

class DelzantPolytope {
 public:
  /// Validates; throws abreu::Error when the facet list is not a Delzant polytope.
  DelzantPolytope(int dim, std::vector<Facet> facets)
      : dim_(dim), facets_(std::move(facets)), report_(validate_delzant(dim_, facets_)),
        region_(dim_, detail::facet_halfspaces(facets_)) {
    const Moments in = region_.interior_moments();
    const Moments bd = region_.boundary_moments();
    moments_.volume = in.mass;
    moments_.first = in.first;
    moments_.second = in.second;
    moments_.boundary_mass = bd.mass;
    moments_.boundary_first = bd.first;
    diameter_ = 0.0;
    for (const Vec& a : report_.vertices)
      for (const Vec& b : report_.vertices) diameter_ = std::max(diameter_, (a - b).norm());
  }

  int dim() const { return dim_; }
  std::size_t facet_count() const { return facets_.size(); }
  const std::vector<Facet>& facets() const { return facets_; }
  const Facet& facet(std::size_t i) const { return facets_[i]; }
  const std::vector<Vec>& vertices() const { return report_.vertices; }
  const ValidationReport& validation() const { return report_; }
  const ConvexRegion& region() const { return region_; }
  const MomentTable& moments() const { return moments_; }
  double diameter() const { return diameter_; }

  Vec normal(std::size_t i) const { return facets_[i].normal_real(); }
  double support(std::size_t i) const { return facets_[i].support; }
  /// Boundary-measure density on facet i: 1/|l_i|.
  double density(std::size_t i) const { return 1.0 / facets_[i].norm(); }

  /// l_i(x) = lambda_i - <l_i, x>.
  double slack(std::size_t i, const Vec& x) const {
    double s = facets_[i].support;
    for (int j = 0; j < dim_; ++j) s -= static_cast<double>(facets_[i].normal(j)) * x(j);
    return s;
  }

  /// Euclidean distance to the boundary (negative outside).
  double boundary_distance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < facets_.size(); ++i) d = std::min(d, slack(i, x) / facets_[i].norm());
    return d;
  }

  bool contains_strictly(const Vec& x) const { return boundary_distance(x) > 0.0; }

  /// Pointwise form lambda_i^{-1} <nu, x> of the boundary density at a point of facet i.
  double pointwise_density(std::size_t i, const Vec& x) const {
    const Vec nu = normal(i) / facets_[i].norm();
    return nu.dot(x) / facets_[i].support;
  }

 private:
  int dim_;
  std::vector<Facet> facets_;
  ValidationReport report_;
  ConvexRegion region_;
  MomentTable moments_;
  double diameter_ = 0.0;
};

inline ValidationReport validate_delzant(const DelzantPolytope& p) { return p.validation(); }

inline const MomentTable& moments(const DelzantPolytope& p) { return p.moments(); }

/// Moves every facet inward by Euclidean distance delta: supports become lambda_i - |l_i| delta.
inline DelzantPolytope shrink(const DelzantPolytope& p, double delta) {
  if (delta == 0.0) return p;
  std::vector<Facet> fs;
  for (const auto& f : p.facets()) fs.emplace_back(f.normal, f.support - f.norm() * delta);
  return DelzantPolytope(p.dim(), std::move(fs));
}

struct Translation {
  DelzantPolytope polytope;
  Vec offset;
};

/// Translates P so its barycenter sits at the origin; returns the barycenter used as offset.
inline Translation barycentric_translate(const DelzantPolytope& p) {
  const Vec c = p.moments().barycenter();
  std::vector<Facet> fs;
  for (std::size_t i = 0; i < p.facet_count(); ++i) {
    const auto& f = p.facet(i);
    const double shift = p.normal(i).dot(c);
    if (shift == 0.0)
      fs.push_back(f);
    else
      fs.emplace_back(f.normal, f.support - shift);
  }
  return {DelzantPolytope(p.dim(), std::move(fs)), c};
}

namespace presets {

inline IVec ivec(std::initializer_list<long long> xs) {
  IVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (long long x : xs) v(i++) = x;
  return v;
}

inline DelzantPolytope interval() {
  return DelzantPolytope(1, {Facet(ivec({1}), Rational{1, 1}), Facet(ivec({-1}), Rational{1, 1})});
}

inline DelzantPolytope square() {
  return DelzantPolytope(2, {Facet(ivec({1, 0}), Rational{1, 1}), Facet(ivec({0, 1}), Rational{1, 1}),
                             Facet(ivec({-1, 0}), Rational{1, 1}), Facet(ivec({0, -1}), Rational{1, 1})});
}

/// Standard simplex translated so its barycenter is the origin.
inline DelzantPolytope cp2_simplex() {
  return DelzantPolytope(2, {Facet(ivec({-1, 0}), Rational{1, 3}), Facet(ivec({0, -1}), Rational{1, 3}),
                             Facet(ivec({1, 1}), Rational{1, 3})});
}

/// Trapezoid of the first Hirzebruch surface with the origin inside.
inline DelzantPolytope hirzebruch1() {
  return DelzantPolytope(2, {Facet(ivec({-1, 0}), Rational{1, 1}), Facet(ivec({0, -1}), Rational{1, 1}),
                             Facet(ivec({0, 1}), Rational{1, 1}), Facet(ivec({1, 1}), Rational{1, 1})});
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames = {"interval", "square", "cp2-simplex", "hirzebruch-1"};
  return kNames;
}

inline std::optional<DelzantPolytope> by_name(const std::string& name) {
  if (name == "interval") return interval();
  if (name == "square") return square();
  if (name == "cp2-simplex") return cp2_simplex();
  if (name == "hirzebruch-1") return hirzebruch1();
  return std::nullopt;
}

}  // namespace presets

}  // namespace abreu
