#pragma once

// Convex regions given by halfspaces in dimension <= 3: vertex enumeration,
// face incidence, pulling triangulations and exact low-order moments.
// Shared by the Delzant polytope and by the crease-clipping used for exact
// evaluation of piecewise-linear functions.

#include "abreu/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

namespace abreu {

/// { x : <normal, x> <= offset }. `density` weights the face in boundary integrals
/// (0 for cuts that are not part of the polytope boundary).
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  double density = 0.0;
};

/// Mass, first and second moments of a (possibly lower-dimensional) measure.
struct Moments {
  double mass = 0.0;
  Vec first;
  Mat second;

  explicit Moments(int dim = 0) : first(Vec::Zero(dim)), second(Mat::Zero(dim, dim)) {}

  Moments& operator+=(const Moments& o) {
    mass += o.mass;
    first += o.first;
    second += o.second;
    return *this;
  }
  Moments scaled(double w) const {
    Moments m = *this;
    m.mass *= w;
    m.first *= w;
    m.second *= w;
    return m;
  }
};

namespace detail {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// k-dimensional measure of the simplex spanned by `pts` (k = pts.size() - 1).
inline double simplex_measure(const std::vector<Vec>& pts) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k <= 0) return 1.0;
  const int n = static_cast<int>(pts[0].size());
  Eigen::MatrixXd e(n, k);
  for (int j = 0; j < k; ++j) e.col(j) = pts[j + 1] - pts[0];
  if (k == n) return std::abs(e.determinant()) / detail::factorial(k);
  const double g = (e.transpose() * e).determinant();
  return std::sqrt(std::max(g, 0.0)) / detail::factorial(k);
}

/// Exact moments of the uniform (Lebesgue) measure on a simplex.
inline Moments simplex_moments(const std::vector<Vec>& pts) {
  const int n = static_cast<int>(pts[0].size());
  const int k = static_cast<int>(pts.size()) - 1;
  Moments m(n);
  m.mass = simplex_measure(pts);
  Vec sum = Vec::Zero(n);
  Mat outer = Mat::Zero(n, n);
  for (const Vec& p : pts) {
    sum += p;
    outer += p * p.transpose();
  }
  m.first = m.mass * sum / static_cast<double>(k + 1);
  m.second = m.mass / static_cast<double>((k + 1) * (k + 2)) * (outer + sum * sum.transpose());
  return m;
}

class ConvexRegion {
 public:
  ConvexRegion() = default;

  ConvexRegion(int dim, std::vector<Halfspace> halfspaces)
      : dim_(dim), halfspaces_(std::move(halfspaces)) {
    scale_ = 1.0;
    for (const auto& h : halfspaces_) {
      const double nn = h.normal.norm();
      if (nn > 0) scale_ = std::max(scale_, 1.0 + std::abs(h.offset) / nn);
    }
    tol_ = 1e-10 * scale_;
    enumerate_vertices();
  }

  int dim() const { return dim_; }
  double tolerance() const { return tol_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  /// Vertex ids lying on the hyperplane of halfspace `h` (sorted).
  const std::vector<int>& face_vertices(std::size_t h) const { return face_vertices_[h]; }
  /// Halfspace ids tight at vertex `v` (sorted).
  const std::vector<int>& tight_at(std::size_t v) const { return tight_at_[v]; }

  double slack(std::size_t h, const Vec& x) const {
    return halfspaces_[h].offset - halfspaces_[h].normal.dot(x);
  }

  bool empty() const { return vertices_.empty(); }

  /// Affine dimension of a vertex subset (-1 when empty).
  int affine_rank(const std::vector<int>& ids) const {
    if (ids.empty()) return -1;
    if (ids.size() == 1) return 0;
    Eigen::MatrixXd d(dim_, static_cast<Eigen::Index>(ids.size()) - 1);
    for (std::size_t j = 1; j < ids.size(); ++j) d.col(j - 1) = vertices_[ids[j]] - vertices_[ids[0]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-9 * scale_) ++r;
    return r;
  }

  bool full_dimensional() const {
    std::vector<int> all(vertices_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return affine_rank(all) == dim_;
  }

  /// Pulling triangulation of the whole region into dim-simplices (vertex ids).
  std::vector<std::vector<int>> triangulate() const {
    std::vector<int> all(vertices_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    if (affine_rank(all) != dim_) return {};
    return triangulate_face(all, dim_);
  }

  /// Triangulation of the face cut out by halfspace `h`; empty unless the face is (dim-1)-dimensional.
  std::vector<std::vector<int>> triangulate_facet(std::size_t h) const {
    const auto& ids = face_vertices_[h];
    if (affine_rank(ids) != dim_ - 1) return {};
    return triangulate_face(ids, dim_ - 1);
  }

  Moments interior_moments() const {
    Moments total(dim_);
    for (const auto& s : triangulate()) total += simplex_moments(points(s));
    return total;
  }

  /// Lebesgue (dim-1)-measure moments of one face, without density.
  Moments facet_moments(std::size_t h) const {
    Moments total(dim_);
    for (const auto& s : triangulate_facet(h)) total += simplex_moments(points(s));
    return total;
  }

  /// Density-weighted moments of the boundary faces.
  Moments boundary_moments() const {
    Moments total(dim_);
    for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
      if (halfspaces_[h].density == 0.0) continue;
      total += facet_moments(h).scaled(halfspaces_[h].density);
    }
    return total;
  }

  std::vector<Vec> points(const std::vector<int>& ids) const {
    std::vector<Vec> pts;
    pts.reserve(ids.size());
    for (int i : ids) pts.push_back(vertices_[i]);
    return pts;
  }

 private:
  void enumerate_vertices() {
    const int m = static_cast<int>(halfspaces_.size());
    if (m < dim_) return;
    std::vector<int> pick(dim_);
    for (int i = 0; i < dim_; ++i) pick[i] = i;
    while (true) {
      Eigen::MatrixXd a(dim_, dim_);
      Eigen::VectorXd b(dim_);
      for (int r = 0; r < dim_; ++r) {
        a.row(r) = halfspaces_[pick[r]].normal.transpose();
        b(r) = halfspaces_[pick[r]].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.isInvertible() && std::abs(a.determinant()) > 1e-12 * std::pow(a.norm(), dim_)) {
        Vec x = lu.solve(b);
        if (feasible(x)) add_vertex(x);
      }
      int i = dim_ - 1;
      while (i >= 0 && pick[i] == m - dim_ + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < dim_; ++j) pick[j] = pick[j - 1] + 1;
    }
    face_vertices_.assign(halfspaces_.size(), {});
    tight_at_.assign(vertices_.size(), {});
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
        if (std::abs(slack(h, vertices_[v])) <= tol_ * halfspaces_[h].normal.norm()) {
          face_vertices_[h].push_back(static_cast<int>(v));
          tight_at_[v].push_back(static_cast<int>(h));
        }
      }
    }
  }

  bool feasible(const Vec& x) const {
    for (std::size_t h = 0; h < halfspaces_.size(); ++h)
      if (slack(h, x) < -tol_ * halfspaces_[h].normal.norm()) return false;
    return true;
  }

  void add_vertex(const Vec& x) {
    for (const Vec& v : vertices_)
      if ((v - x).norm() <= 10 * tol_) return;
    vertices_.push_back(x);
  }

  std::vector<std::vector<int>> triangulate_face(const std::vector<int>& face, int k) const {
    if (k == 0) return {{face.front()}};
    const int apex = face.front();
    std::vector<std::vector<int>> out;
    std::set<std::vector<int>> seen;
    for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
      auto sub = detail::sorted_intersection(face, face_vertices_[h]);
      if (static_cast<int>(sub.size()) < k) continue;
      if (std::binary_search(sub.begin(), sub.end(), apex)) continue;
      if (affine_rank(sub) != k - 1) continue;
      if (!seen.insert(sub).second) continue;
      for (auto s : triangulate_face(sub, k - 1)) {
        s.push_back(apex);
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  double scale_ = 1.0;
  double tol_ = 1e-10;
  std::vector<Vec> vertices_;
  std::vector<std::vector<int>> face_vertices_;
  std::vector<std::vector<int>> tight_at_;
};

}  // namespace abreu
