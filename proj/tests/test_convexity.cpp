#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hhdom/convexity.hpp"
#include "oracles.hpp"

namespace hhdom {
namespace {

const Interval kUnit{0.0, 1.0};
const oracle::Fn kId = [](double x) { return x; };
const oracle::Fn kHLinear = [](double t) { return t; };

SamplePlan grid(std::size_t nx, std::size_t ny, std::size_t nt) {
  SamplePlan p;
  p.strategy = GridSampling{nx, ny, nt};
  return p;
}

SamplePlan random_plan(std::size_t count, std::uint64_t seed) {
  SamplePlan p;
  p.strategy = RandomSampling{count, seed};
  return p;
}

TEST(HConvexDefect, Examples) {
  const Kernel lin = make_kernel(LinearKernel{});
  EXPECT_DOUBLE_EQ(h_convex_defect(parse("x^2"), lin, 0.0, 1.0, 0.5), 0.25);
  for (double c : {0.0, 0.3, 1.0}) {
    for (double a : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(h_convex_defect(parse("x^2"), lin, c, c, a), 0.0, 1e-16);
    }
  }
  const double concave = h_convex_defect(parse("1 - x^2"), lin, 0.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(concave, -0.25);
  EXPECT_DOUBLE_EQ(concave, oracle::defect([](double x) { return 1 - x * x; }, kHLinear, kId, 0.0,
                                           1.0, 0.5));
  EXPECT_THROW((void)h_convex_defect(parse("x"), lin, 0.0, 1.0, 0.0), EvalError);
}

TEST(PhiHDefect, Examples) {
  const Kernel lin = make_kernel(LinearKernel{});
  const auto phi = make_affine(0.5, 0.5, kUnit);
  const double d = phi_h_defect(parse("x^2"), lin, phi, 0.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(d, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(d, oracle::defect([](double x) { return x * x; }, kHLinear,
                                     [](double x) { return 0.5 * x + 0.5; }, 0.0, 1.0, 0.5));

  const Kernel one = make_kernel(OneKernel{});
  const auto id = identity_map(kUnit);
  for (double x : {0.0, 0.4, 1.0}) {
    EXPECT_DOUBLE_EQ(phi_h_defect(parse("x^2"), one, id, x, x, 0.3), x * x);
  }
}

TEST(Property, IdentityReductionIsExact) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto id = identity_map(kUnit);
  const Expr f = parse("exp(x) - 3*x^3 + abs(x - 0.4)");
  for (const KernelKind& kind : {KernelKind{LinearKernel{}}, KernelKind{PowerKernel{0.3}},
                                 KernelKind{ReciprocalKernel{}}, KernelKind{OneKernel{}}}) {
    const Kernel h = make_kernel(kind);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng), y = u(rng), t = 0.001 + 0.998 * u(rng);
      EXPECT_EQ(phi_h_defect(f, h, id, x, y, t), h_convex_defect(f, h, x, y, t));
    }
  }
}

TEST(DominanceGap, Examples) {
  const Kernel lin = make_kernel(LinearKernel{});
  const auto id = identity_map(kUnit);
  const auto sq = [](double x) { return x * x; };
  const auto sq2 = [](double x) { return 2 * x * x; };

  const double held = dominance_gap({parse("x^2"), parse("2*x^2")}, lin, id, 0.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(held, 0.25);
  EXPECT_DOUBLE_EQ(held, oracle::dominance_gap(sq, sq2, kHLinear, kId, 0.0, 1.0, 0.5));

  const double broken = dominance_gap({parse("2*x^2"), parse("x^2")}, lin, id, 0.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(broken, -0.25);
  EXPECT_DOUBLE_EQ(broken, oracle::dominance_gap(sq2, sq, kHLinear, kId, 0.0, 1.0, 0.5));

  const Expr g = parse("x^2 + 1");
  EXPECT_EQ(dominance_gap({g, g}, lin, id, 0.2, 0.9, 0.3), 0.0);
}

TEST(DominanceGap, MatchesBruteForceOnRandomTriples) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Kernel h = make_kernel(PowerKernel{0.5});
  const auto phi = make_affine(0.5, 0.5, kUnit);
  const FunctionPair pair{parse("3*x^2 - x + 1"), parse("exp(x)")};
  const oracle::Fn f = [](double x) { return 3 * x * x - x + 1; };
  const oracle::Fn g = [](double x) { return std::exp(x); };
  const oracle::Fn hs = [](double t) { return std::sqrt(t); };
  const oracle::Fn ph = [](double x) { return 0.5 * x + 0.5; };
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), y = u(rng), t = 0.01 + 0.98 * u(rng);
    EXPECT_NEAR(dominance_gap(pair, h, phi, x, y, t), oracle::dominance_gap(f, g, hs, ph, x, y, t),
                1e-13);
  }
}

TEST(CheckPhiHConvex, ConvexSquareHolds) {
  const auto r = check_phi_h_convex(parse("x^2"), make_kernel(LinearKernel{}), identity_map(kUnit),
                                    kUnit, grid(21, 21, 19));
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.samples_checked, 21u * 21u * 19u);
  EXPECT_EQ(r.violations, 0u);
  // Grid oracle: min of t(1-t)(x-y)^2 is 0, attained on the diagonal.
  EXPECT_NEAR(r.worst_gap, 0.0, 1e-15);
}

TEST(CheckPhiHConvex, ConcaveFails) {
  const auto r = check_phi_h_convex(parse("1 - x^2"), make_kernel(LinearKernel{}),
                                    identity_map(kUnit), kUnit, grid(21, 21, 19));
  EXPECT_FALSE(r.holds());
  // Defect of 1 - x^2 is -t(1-t)(x-y)^2, minimized at x, y = 0, 1 and t = 1/2.
  EXPECT_DOUBLE_EQ(r.worst_gap, -0.25);
  EXPECT_EQ(r.witness.t, 0.5);
  EXPECT_EQ(std::fabs(r.witness.x - r.witness.y), 1.0);
  EXPECT_EQ(r.witness, (Triple{0.0, 1.0, 0.5}));  // lexicographic tie-break
}

TEST(CheckPhiHConvex, SquareIsAPFunction) {
  const auto r = check_phi_h_convex(parse("x^2"), make_kernel(OneKernel{}), identity_map(kUnit),
                                    kUnit, grid(21, 21, 19));
  EXPECT_TRUE(r.holds());
  EXPECT_GE(r.worst_gap, 0.0);
}

TEST(CheckPhiHConvex, NegativeValuesWarnButRun) {
  const auto r = check_phi_h_convex(parse("x^2 - 1"), make_kernel(LinearKernel{}),
                                    identity_map(kUnit), kUnit, grid(5, 5, 5));
  EXPECT_TRUE(r.holds());
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("negative"), std::string::npos);
}

TEST(CheckPhiHConvex, EvalErrorCarriesThePoint) {
  try {
    (void)check_phi_h_convex(parse("ln(x)"), make_kernel(LinearKernel{}), identity_map(kUnit),
                             kUnit, grid(3, 3, 3));
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
    EXPECT_NE(std::string(e.what()).find("x = 0"), std::string::npos) << e.what();
  }
}

TEST(CheckPhiHConvex, NonlinearPhi) {
  const ExprMap sq(parse("x^2"), kUnit);
  const auto r = check_phi_h_convex(parse("x^2"), make_kernel(LinearKernel{}), sq, kUnit,
                                    grid(11, 11, 9));
  EXPECT_TRUE(r.holds());
}

TEST(CheckDominated, Examples) {
  const Kernel lin = make_kernel(LinearKernel{});
  const auto id = identity_map(kUnit);
  const auto plan = grid(21, 21, 19);

  EXPECT_TRUE(check_dominated({parse("x^2"), parse("2*x^2")}, lin, id, kUnit, plan).holds());

  const Expr g = parse("x^2 + 0.5*x + 1");
  const auto self = check_dominated({g, g}, lin, id, kUnit, plan);
  EXPECT_TRUE(self.holds());
  // Dg - |Dg| is 0, or 2 Dg where rounding makes Dg slightly negative.
  EXPECT_NEAR(self.worst_gap, 0.0, 1e-14);

  const auto broken = check_dominated({parse("2*x^2"), parse("x^2")}, lin, id, kUnit, plan);
  EXPECT_FALSE(broken.holds());
  EXPECT_DOUBLE_EQ(broken.worst_gap, -0.25);
}

TEST(CheckDominated, DominatorMustBeConvex) {
  try {
    (void)check_dominated({parse("x"), parse("1 - x^2")}, make_kernel(LinearKernel{}),
                          identity_map(kUnit), kUnit, grid(5, 5, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Property, SelfAndZeroDomination) {
  const auto id = identity_map(kUnit);
  const auto plan = random_plan(2000, 4);
  for (const char* src : {"x^2", "exp(x)", "x^4 + 1", "abs(x - 0.5)", "1"}) {
    for (const KernelKind& kind :
         {KernelKind{LinearKernel{}}, KernelKind{PowerKernel{0.5}}, KernelKind{OneKernel{}}}) {
      const Kernel h = make_kernel(kind);
      const Expr g = parse(src);
      ASSERT_TRUE(check_phi_h_convex(g, h, id, kUnit, plan).holds()) << src;
      EXPECT_TRUE(check_dominated({g, g}, h, id, kUnit, plan).holds()) << src;
      EXPECT_TRUE(check_dominated({parse("0"), g}, h, id, kUnit, plan).holds()) << src;
    }
  }
}

TEST(Property, GapScalesLinearly) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Kernel h = make_kernel(PowerKernel{0.4});
  const auto phi = make_affine(0.5, 0.25, kUnit);
  const FunctionPair pair{parse("sin(3*x) + 2"), parse("x^2 + 2*x")};
  for (double c : {0.5, 2.0, 10.0}) {
    const Expr ce = Expr::constant(c);
    const FunctionPair scaled{ce * pair.f, ce * pair.g};
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng), y = u(rng), t = 0.01 + 0.98 * u(rng);
      const double base = dominance_gap(pair, h, phi, x, y, t);
      const double s = dominance_gap(scaled, h, phi, x, y, t);
      EXPECT_NEAR(s, c * base, 1e-12 * std::max(1.0, std::fabs(c * base)) + 1e-14);
    }
  }
}

TEST(Decompose, SumAndDifference) {
  const auto [l, k] = decompose({parse("x^2"), parse("2*x^2")});
  EXPECT_EQ(to_string(l), "((2 * (x ^ 2)) + (x ^ 2))");
  EXPECT_EQ(to_string(k), "((2 * (x ^ 2)) - (x ^ 2))");
  for (double x : {0.0, 0.5, 1.0, 3.0}) {
    EXPECT_DOUBLE_EQ(evaluate(l, x), 3 * x * x);
    EXPECT_DOUBLE_EQ(evaluate(k, x), x * x);
  }
  const auto [l0, k0] = decompose({parse("0"), parse("x^2")});
  for (double x : {0.2, 0.7}) EXPECT_EQ(evaluate(l0, x), evaluate(k0, x));
}

TEST(Compose, Examples) {
  const auto p = compose(parse("3*x^2"), parse("x^2"));
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    EXPECT_DOUBLE_EQ(evaluate(p.f, x), x * x);
    EXPECT_DOUBLE_EQ(evaluate(p.g, x), 2 * x * x);
  }
  const auto same = compose(parse("x^2 + 1"), parse("x^2 + 1"));
  EXPECT_EQ(evaluate(same.f, 0.3), 0.0);
  EXPECT_EQ(evaluate(same.g, 0.3), evaluate(parse("x^2 + 1"), 0.3));

  const auto neg = compose(parse("x^2"), parse("2*x^2"));
  for (double x : {0.1, 0.5, 1.0}) EXPECT_LT(evaluate(neg.f, x), 0.0);
  const auto r = check_phi_h_convex(neg.f, make_kernel(LinearKernel{}), identity_map(kUnit), kUnit,
                                    grid(5, 5, 5));
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("negative"), std::string::npos);
}

TEST(Property, ComposeDecomposeRoundTrip) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const FunctionPair pair{parse("x^2 - sin(x)"), parse("exp(x) + 3")};
  const auto [l, k] = decompose(pair);
  const auto back = compose(l, k);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double f = evaluate(pair.f, x), g = evaluate(pair.g, x);
    // Exact in real arithmetic; in floating point ((g+f) - (g-f)) / 2 can
    // lose the low bits of f relative to g.
    const double ulp_scale = 4 * std::numeric_limits<double>::epsilon() * (std::fabs(g) + std::fabs(f));
    EXPECT_NEAR(evaluate(back.f, x), f, ulp_scale);
    EXPECT_NEAR(evaluate(back.g, x), g, ulp_scale);
  }
}

TEST(Lemma2, DominatedPairAgrees) {
  const auto r = lemma2_report({parse("x^2"), parse("2*x^2")}, make_kernel(LinearKernel{}),
                               identity_map(kUnit), kUnit, grid(21, 21, 19));
  EXPECT_TRUE(r.statement1());
  EXPECT_TRUE(r.statement2());
  EXPECT_TRUE(r.statement3());
  EXPECT_TRUE(r.agreement());
}

TEST(Lemma2, NonDominatedPairAgrees) {
  const auto r = lemma2_report({parse("2*x^2"), parse("x^2")}, make_kernel(LinearKernel{}),
                               identity_map(kUnit), kUnit, grid(21, 21, 19));
  EXPECT_FALSE(r.statement1());
  EXPECT_FALSE(r.statement2());
  EXPECT_FALSE(r.g_minus_f.holds());  // g - f = -x^2
  EXPECT_TRUE(r.g_plus_f.holds());
  EXPECT_FALSE(r.statement3());
  EXPECT_TRUE(r.agreement());
}

TEST(Lemma2, EqualPairAgrees) {
  const Expr g = parse("exp(x)");
  const auto r = lemma2_report({g, g}, make_kernel(PowerKernel{0.5}), identity_map(kUnit), kUnit,
                               grid(11, 11, 9));
  EXPECT_TRUE(r.statement1());
  EXPECT_TRUE(r.agreement());
  EXPECT_EQ(r.g_minus_f.worst_gap, 0.0);
}

TEST(Property, Lemma2PointwiseEquivalence) {
  // gap >= 0 exactly when both defects of g - f and g + f are >= 0, because
  // min(Dg - Df, Dg + Df) = Dg - |Df|.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Kernel h = make_kernel(LinearKernel{});
  const auto id = identity_map(kUnit);
  const FunctionPair pair{parse("sin(4*x) + 2"), parse("3*x^2")};
  const Expr gm = pair.g - pair.f, gp = pair.g + pair.f;
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng), y = u(rng), t = 0.01 + 0.98 * u(rng);
    const double gap = dominance_gap(pair, h, id, x, y, t);
    const double m = std::min(phi_h_defect(gm, h, id, x, y, t), phi_h_defect(gp, h, id, x, y, t));
    EXPECT_NEAR(gap, m, 1e-13);
  }
}

TEST(Sampling, GridIncludesEndpointsAndHalf) {
  const auto ts = t_nodes(19, 1e-6);
  EXPECT_EQ(ts.front(), 1e-6);
  EXPECT_EQ(ts.back(), 1.0 - 1e-6);
  EXPECT_NE(std::find(ts.begin(), ts.end(), 0.5), ts.end());
  EXPECT_EQ(ts.size(), 19u);
  EXPECT_EQ(t_nodes(4, 1e-6).size(), 5u);
  const auto xs = uniform_nodes(kUnit, 21);
  EXPECT_EQ(xs.front(), 0.0);
  EXPECT_EQ(xs.back(), 1.0);
}

TEST(Sampling, RandomPlanIsSeededAndInBounds) {
  const Interval iv{-1.0, 2.0};
  const auto a = sample_triples(random_plan(500, 99), iv);
  const auto b = sample_triples(random_plan(500, 99), iv);
  const auto c = sample_triples(random_plan(500, 100), iv);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a) {
    EXPECT_TRUE(iv.contains(p.x));
    EXPECT_TRUE(iv.contains(p.y));
    EXPECT_GE(p.t, 1e-6);
    EXPECT_LE(p.t, 1.0 - 1e-6);
  }
}

TEST(Sampling, InvalidPlans) {
  SamplePlan p = grid(0, 3, 3);
  EXPECT_THROW(p.validate(), Error);
  p = grid(3, 3, 3);
  p.t_clamp = 0.5;
  EXPECT_THROW(p.validate(), Error);
  p.t_clamp = 1e-6;
  p.tolerance.atol = -1;
  p.tolerance.rtol = -1;
  EXPECT_EQ(p.problems().size(), 2u);
}

TEST(CheckReport, VerdictMatchesThreshold) {
  const auto r = check_phi_h_convex(parse("x^2"), make_kernel(LinearKernel{}), identity_map(kUnit),
                                    kUnit, grid(21, 21, 19));
  const Tolerance tol;
  EXPECT_EQ(r.holds(), !(r.worst_gap < -tol.threshold(r.witness_scale)));
}

}  // namespace
}  // namespace hhdom
