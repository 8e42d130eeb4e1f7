#include "test_support.hpp"

using namespace abreu;
using namespace abreu::testing;

namespace {

struct MonteCarlo {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Independent estimate of L(f) = int_dP f dsigma - int_P s f dx for a 2D polytope:
// interior by rejection sampling in the bounding box, boundary by sampling facet
// segments in proportion to their dsigma mass.
MonteCarlo monte_carlo_L(const DelzantPolytope& p, const ExtremalAffine& ext, const PLFunction& f, std::size_t n,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec lo = p.vertices()[0], hi = p.vertices()[0];
  for (const Vec& v : p.vertices()) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
  const double box = (hi - lo).prod();

  // Interior: E[box * 1_P * s f] over uniform box points.
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Vec x(2);
    x << lo(0) + (hi(0) - lo(0)) * u(rng), lo(1) + (hi(1) - lo(1)) * u(rng);
    double y = 0.0;
    if (p.contains_strictly(x)) y = box * ext.s.value(x) * f.value(x);
    s1 += y;
    s2 += y * y;
  }
  const double mi = s1 / n, vi = (s2 / n - mi * mi) / n;

  // Boundary: pick a facet by dsigma mass, then a uniform point on it.
  std::vector<std::pair<Vec, Vec>> edges;
  std::vector<double> mass;
  for (std::size_t i = 0; i < p.facet_count(); ++i) {
    const auto& ids = p.region().face_vertices(i);
    const Vec a = p.vertices()[ids[0]], b = p.vertices()[ids[1]];
    edges.emplace_back(a, b);
    mass.push_back((b - a).norm() * p.density(i));
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& [a, b] = edges[pick(rng)];
    const double y = total * f.value(a + u(rng) * (b - a));
    b1 += y;
    b2 += y * y;
  }
  const double mb = b1 / n, vb = (b2 / n - mb * mb) / n;
  return {mb - mi, std::sqrt(vi + vb)};
}

}  // namespace

TEST(EvalLPL, SimpleCreaseOnInterval) {
  const auto p = presets::interval();
  EXPECT_NEAR(eval_L_pl(PLFunction::simple(AffineFunction(0.0, vec({1.0}))), p, solve_extremal_affine(p)), 0.5, 1e-15);
}

TEST(EvalLPL, ClosedFormOnInterval) {
  const auto p = presets::interval();
  const auto ext = solve_extremal_affine(p);
  for (int k = -9; k <= 9; ++k) {
    const double c = 0.1 * k;
    const double expected = (1 - c) - (1 - c) * (1 - c) / 2;
    const double got = eval_L_pl(PLFunction::simple(AffineFunction(-c, vec({1.0}))), p, ext);
    EXPECT_NEAR(got, expected, 1e-14) << c;
    EXPECT_GT(got, 0.0);
  }
}

TEST(EvalLPL, AffineIsZero) {
  std::mt19937_64 rng(89);
  for (const auto& p : all_presets()) {
    const auto ext = solve_extremal_affine(p);
    for (int k = 0; k < 10; ++k) {
      const auto a = random_affine(p.dim(), rng);
      EXPECT_NEAR(eval_L_pl(PLFunction{{a}}, p, ext), 0.0, 1e-12);
      // A crease that misses P is affine on P.
      const double far = a.max_over(p.vertices()) + 1.0;
      EXPECT_NEAR(eval_L_pl(PLFunction::simple(AffineFunction(a.a0 - far, a.a)), p, ext), 0.0, 1e-12);
    }
  }
}

TEST(EvalLPL, PositivelyHomogeneous) {
  std::mt19937_64 rng(97);
  for (const auto& p : all_presets()) {
    const auto ext = solve_extremal_affine(p);
    const auto grid = crease_grid(p, 8, 5);
    for (const auto& c : grid) {
      const PLFunction f = c.function();
      const double l = eval_L_pl(f, p, ext);
      for (double t : {0.5, 3.0}) {
        PLFunction g = f;
        for (auto& piece : g.pieces) piece = piece * t;
        EXPECT_NEAR(eval_L_pl(g, p, ext), t * l, 1e-13 * (1 + std::abs(t * l)));
      }
    }
  }
}

TEST(EvalLPL, SquareDiagonalCreaseMonteCarlo) {
  const auto p = presets::square();
  const auto ext = solve_extremal_affine(p);
  const auto f = PLFunction::simple(AffineFunction(0.0, vec({1.0, 1.0})));
  const double exact = eval_L_pl(f, p, ext);
  EXPECT_NEAR(exact, 4.0 / 3.0, 1e-14);
  const auto mc = monte_carlo_L(p, ext, f, 10'000'000, 2024);
  EXPECT_LT(std::abs(mc.mean - exact), 3.0 * mc.stderr_) << mc.mean << " +- " << mc.stderr_;
}

TEST(EvalLPL, MonteCarloOnTwoDimensionalPresets) {
  std::mt19937_64 rng(101);
  std::uint64_t seed = 7;
  for (const std::string name : {"square", "cp2-simplex", "hirzebruch-1"}) {
    const auto p = *presets::by_name(name);
    const auto ext = solve_extremal_affine(p);
    for (int k = 0; k < 3; ++k) {
      const Vec x = random_interior(p, rng, 0.05);
      const double th = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
      const Vec d = vec({std::cos(th), std::sin(th)});
      const auto f = PLFunction::simple(AffineFunction(-d.dot(x), d));
      const double exact = eval_L_pl(f, p, ext);
      const auto mc = monte_carlo_L(p, ext, f, 1'000'000, seed++);
      EXPECT_LT(std::abs(mc.mean - exact), 3.5 * mc.stderr_) << name << ": " << exact << " vs " << mc.mean;
    }
  }
}

TEST(EvalLPL, ThreePieceMonteCarlo) {
  const auto p = presets::hirzebruch1();
  const auto ext = solve_extremal_affine(p);
  const PLFunction f{{AffineFunction(0.1, vec({1.0, 0.3})), AffineFunction(-0.2, vec({-0.5, 1.0})), AffineFunction::zero(2)}};
  const double exact = eval_L_pl(f, p, ext);
  const auto mc = monte_carlo_L(p, ext, f, 2'000'000, 11);
  EXPECT_LT(std::abs(mc.mean - exact), 3.5 * mc.stderr_) << exact << " vs " << mc.mean;
}

TEST(EvalLPL, CreaseAlongFacetIsClipFailure) {
  const auto p = presets::interval();
  try {
    eval_L_pl(PLFunction::simple(AffineFunction(-1.0, vec({1.0}))), p, solve_extremal_affine(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClipFailure);
  }
}

TEST(ScanCreases, IntervalBothOrientations) {
  const auto p = presets::interval();
  const auto r = scan_creases(p, solve_extremal_affine(p), 2, 19);
  ASSERT_EQ(r.entries.size(), 38u);
  for (const auto& e : r.entries) EXPECT_GT(e.L, 0.0);
  EXPECT_NEAR(r.min_L, 0.095, 1e-14);
  EXPECT_TRUE(r.violations.empty());
  ASSERT_TRUE(r.condition46.has_value());
  EXPECT_TRUE(r.condition46->pass);
}

TEST(ScanCreases, SquareAndSimplexPositive) {
  for (const std::string name : {"square", "cp2-simplex"}) {
    const auto p = *presets::by_name(name);
    const auto r = scan_creases(p, solve_extremal_affine(p), 16, 9);
    EXPECT_EQ(r.entries.size(), 144u);
    EXPECT_GT(r.min_L, 0.0) << name;
    EXPECT_TRUE(r.violations.empty());
  }
}

TEST(ScanCreases, DefaultGridsPositiveOnAllPresets) {
  for (const auto& p : all_presets()) {
    const auto r = p.dim() == 1 ? scan_creases(p, solve_extremal_affine(p), 2, 33)
                                : scan_creases(p, solve_extremal_affine(p), 32, 17);
    EXPECT_GT(r.min_L, 0.0);
  }
}

TEST(ScanCreases, EmptyResolution) {
  const auto p = presets::square();
  const auto r = scan_creases(p, solve_extremal_affine(p), 16, 0);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_TRUE(std::isinf(r.min_L));
  EXPECT_TRUE(r.violations.empty());
}

TEST(ScanCreases, ViolationsAreExactlyEntriesBelowTolerance) {
  const auto p = presets::hirzebruch1();
  const auto ext = solve_extremal_affine(p);
  const auto r = scan_creases(p, ext, 12, 7, 0.2);  // artificial tolerance so some entries qualify
  std::vector<std::size_t> expected;
  for (std::size_t k = 0; k < r.entries.size(); ++k)
    if (r.entries[k].L <= 0.2) expected.push_back(k);
  EXPECT_EQ(r.violations, expected);
  EXPECT_FALSE(expected.empty());
}

TEST(CreaseGrid, EveryCreaseMeetsTheInterior) {
  for (const auto& p : all_presets()) {
    for (const auto& c : crease_grid(p, 12, 5)) {
      double lo = 1e300, hi = -1e300;
      for (const Vec& v : p.vertices()) lo = std::min(lo, c.direction.dot(v)), hi = std::max(hi, c.direction.dot(v));
      EXPECT_GT(c.offset, lo);
      EXPECT_LT(c.offset, hi);
    }
  }
}

TEST(Condition46, Presets) {
  auto margins = [](const DelzantPolytope& p) { return check_condition_46(p, solve_extremal_affine(p)); };
  for (double m : margins(presets::interval()).margins) EXPECT_NEAR(m, 1.0, 1e-12);
  for (double m : margins(presets::square()).margins) EXPECT_NEAR(m, 1.0, 1e-12);
  const auto c = margins(presets::cp2_simplex());
  for (double m : c.margins) EXPECT_NEAR(m, 3.0, 1e-9);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.sup_s, 6.0, 1e-9);
}

TEST(Condition46, TranslatedStandardSimplex) {
  const DelzantPolytope raw(2, {Facet(ivec({-1, 0}), 0.0), Facet(ivec({0, -1}), 0.0), Facet(ivec({1, 1}), 1.0)});
  const auto t = barycentric_translate(raw);
  const auto c = check_condition_46(t.polytope, solve_extremal_affine(t.polytope));
  EXPECT_TRUE(c.pass);
  for (double m : c.margins) EXPECT_NEAR(m, 3.0, 1e-9);
}

TEST(Condition46, OriginNotInterior) {
  const DelzantPolytope p(1, {Facet(ivec({1}), 2.0), Facet(ivec({-1}), 0.0)});
  try {
    check_condition_46(p, solve_extremal_affine(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OriginNotInterior);
  }
  EXPECT_FALSE(scan_creases(p, solve_extremal_affine(p), 2, 3).condition46.has_value());
}
