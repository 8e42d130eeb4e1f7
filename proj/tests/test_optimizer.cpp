#include "test_support.hpp"

using namespace abreu;
using namespace abreu::testing;

namespace {

const Problem& problem(const std::string& name, int level = 4) {
  static std::map<std::pair<std::string, int>, std::unique_ptr<Problem>> cache;
  auto& slot = cache[{name, level}];
  if (!slot) slot = std::make_unique<Problem>(*presets::by_name(name), level);
  return *slot;
}

ParametrizedPotential with_terms(const DelzantPolytope& p, std::initializer_list<std::pair<Exponent, double>> terms) {
  Polynomial v(p.dim());
  for (const auto& [e, c] : terms) v.add_term(e, c);
  return ParametrizedPotential(p, v);
}

double abreu_sup_residual(const ParametrizedPotential& u, const Problem& pr) {
  const auto sample = sample_points(pr.scheme, pr.polytope, 0.05, 200);
  return residual_report(u, pr.polytope, pr.extremal, sample).sup_norm;
}

void expect_monotone(const MinimizeResult& r) {
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LT(r.trace[k].F, r.trace[k - 1].F) << "iteration " << k;
}

void expect_monitors_bounded(const MinimizeResult& r) {
  const double b0 = std::abs(r.trace.front().boundary_integral);
  const double i0 = std::abs(r.trace.front().interior_integral);
  for (const auto& row : r.trace) {
    EXPECT_LT(std::abs(row.boundary_integral), 10.0 * b0 + 1e-12);
    EXPECT_LT(std::abs(row.interior_integral), 10.0 * i0 + 1e-12);
  }
}

}  // namespace

TEST(GradientF, CriticalAtGuilleminOnInterval) {
  const auto& pr = problem("interval");
  const auto g = gradient_F(ParametrizedPotential(pr.polytope), pr, 4);
  EXPECT_EQ(g.size(), 5);
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-5);
}

TEST(GradientF, SignAlongQuadraticRay) {
  const auto& pr = problem("interval");
  const Polynomial basis = Polynomial::basis(1, 4);
  const int k = basis.find({2, 0, 0});
  for (double t : {-0.05, 0.05}) {
    const auto g = gradient_F(with_terms(pr.polytope, {{{2, 0, 0}, t}}), pr, 4);
    EXPECT_GT(g(k) * t, 0.0) << t;
  }
}

TEST(GradientF, MatchesFiniteDifferences) {
  std::mt19937_64 rng(83);
  for (const std::string name : {"interval", "square", "cp2-simplex"}) {
    const auto& pr = problem(name, 3);
    const auto u = random_admissible(pr, 3, 0.05, rng);
    const auto g = gradient_F(u, pr, 3);
    const Polynomial basis = Polynomial::basis(pr.dim(), 3);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      Polynomial e(pr.dim());
      e.add_term(basis.exponents()[a], 1e-4);
      const double fd = (eval_F(u.plus(e), pr).F - eval_F(u.plus(e.scaled(-1.0)), pr).F) / 2e-4;
      EXPECT_NEAR(g(static_cast<Eigen::Index>(a)), fd, 1e-5 * std::max(1.0, std::abs(fd))) << name << " term " << a;
    }
  }
}

TEST(Minimize, IntervalFromPerturbedStart) {
  const auto& pr = problem("interval");
  const auto start = with_terms(pr.polytope, {{{2, 0, 0}, 0.3}, {{4, 0, 0}, 0.1}});
  MinimizeConfig cfg;
  const auto r = minimize(start, pr, cfg);
  EXPECT_LT(std::abs(r.trace.back().F - (2 * kLog2 - 2)), 1e-4);
  EXPECT_LT(r.minimizer.smooth.coeffs().cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(abreu_sup_residual(r.minimizer, pr), 1e-3);
  expect_monotone(r);
  expect_monitors_bounded(r);
  EXPECT_TRUE(r.converged) << r.trace.size() << " iterations, |g| = " << r.trace.back().grad_norm;
}

TEST(Minimize, SquareFromPerturbedStart) {
  const auto& pr = problem("square");
  const auto start = with_terms(pr.polytope, {{{2, 2, 0}, 0.2}});
  const double f_exact = eval_F(ParametrizedPotential(pr.polytope), pr).F;
  const auto r = minimize(start, pr, MinimizeConfig{});
  EXPECT_LT(std::abs(r.trace.back().F - f_exact), 1e-4);
  EXPECT_LT(abreu_sup_residual(r.minimizer, pr), 1e-2);
  expect_monotone(r);
  expect_monitors_bounded(r);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Minimize, CriticalStartStopsQuickly) {
  const auto& pr = problem("interval");
  const auto r = minimize(ParametrizedPotential(pr.polytope), pr, MinimizeConfig{});
  EXPECT_LE(r.trace.size(), 3u);
  expect_monotone(r);
}

TEST(Minimize, MinimizerIsNormalized) {
  const auto& pr = problem("interval");
  MinimizeConfig cfg;
  cfg.normalization_point = vec({0.2});
  const auto r = minimize(with_terms(pr.polytope, {{{2, 0, 0}, 0.2}, {{1, 0, 0}, 1.0}}), pr, cfg);
  const Jet j = r.minimizer.jet(vec({0.2}));
  EXPECT_NEAR(j.value, 0.0, 1e-12);
  EXPECT_NEAR(j.gradient(0), 0.0, 1e-12);
}

TEST(Minimize, RestartInvariance) {
  const auto& pr = problem("interval");
  const auto a = minimize(with_terms(pr.polytope, {{{2, 0, 0}, 0.3}}), pr, MinimizeConfig{});
  const auto b = minimize(with_terms(pr.polytope, {{{4, 0, 0}, 0.5}, {{3, 0, 0}, 0.1}}), pr, MinimizeConfig{});
  EXPECT_NEAR(a.trace.back().F, b.trace.back().F, 1e-4);
  EXPECT_LT(abreu_sup_residual(a.minimizer, pr), 1e-3);
  EXPECT_LT(abreu_sup_residual(b.minimizer, pr), 1e-3);
}

TEST(Minimize, InadmissibleStart) {
  const auto& pr = problem("interval");
  try {
    minimize(with_terms(pr.polytope, {{{2, 0, 0}, -2.0}}), pr, MinimizeConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StartInadmissible);
  }
}
