#include <gtest/gtest.h>

#include <cmath>

#include "hhdom/kernel.hpp"
#include "oracles.hpp"

namespace hhdom {
namespace {

TEST(Kernel, LinearConstants) {
  const Kernel k = make_kernel(LinearKernel{});
  EXPECT_EQ(k.half_value(), 0.5);
  EXPECT_EQ(k.midpoint_coefficient(), 1.0);
  EXPECT_FALSE(k.integral().divergent);
  EXPECT_EQ(k.integral().value, 0.5);
  EXPECT_EQ(k.integral().error_estimate, 0.0);
}

TEST(Kernel, PowerConstants) {
  for (double s : {0.1, 0.25, 0.5, 0.9}) {
    const Kernel k = make_kernel(PowerKernel{s});
    EXPECT_EQ(k.midpoint_coefficient(), std::pow(2.0, s - 1.0));
    EXPECT_NEAR(k.midpoint_coefficient(), 1.0 / (2.0 * k.half_value()), 1e-15);
    EXPECT_EQ(k.integral().value, 1.0 / (s + 1.0));
  }
  EXPECT_EQ(make_kernel(PowerKernel{0.5}).integral().value, 2.0 / 3.0);
}

TEST(Kernel, ReciprocalConstants) {
  const Kernel k = make_kernel(ReciprocalKernel{});
  EXPECT_EQ(k.half_value(), 2.0);
  EXPECT_EQ(k.midpoint_coefficient(), 0.25);
  EXPECT_TRUE(k.integral().divergent);
  EXPECT_TRUE(std::isinf(k.integral().value));
}

TEST(Kernel, OneConstants) {
  const Kernel k = make_kernel(OneKernel{});
  EXPECT_EQ(k.half_value(), 1.0);
  EXPECT_EQ(k.midpoint_coefficient(), 0.5);
  EXPECT_EQ(kernel_integral(k).value, 1.0);
}

TEST(Kernel, PowerExponentMustLieInOpenUnitInterval) {
  for (double s : {0.0, 1.0, -0.5, 2.0}) {
    EXPECT_THROW((void)make_kernel(PowerKernel{s}), Error) << s;
  }
}

TEST(KernelValue, Examples) {
  EXPECT_EQ(kernel_value(make_kernel(LinearKernel{}), 0.25), 0.25);
  EXPECT_EQ(kernel_value(make_kernel(ReciprocalKernel{}), 0.5), 2.0);
  EXPECT_EQ(kernel_value(make_kernel(PowerKernel{0.5}), 0.25), 0.5);
}

TEST(KernelValue, OpenIntervalOnly) {
  const Kernel k = make_kernel(OneKernel{});
  for (double t : {0.0, 1.0, -0.1, 1.5}) {
    EXPECT_THROW((void)kernel_value(k, t), EvalError) << t;
  }
}

TEST(KernelValue, HalfValueMatchesExactly) {
  for (const KernelKind& kind :
       {KernelKind{LinearKernel{}}, KernelKind{PowerKernel{0.3}}, KernelKind{PowerKernel{0.5}},
        KernelKind{ReciprocalKernel{}}, KernelKind{OneKernel{}}}) {
    const Kernel k = make_kernel(kind);
    EXPECT_EQ(kernel_value(k, 0.5), k.half_value()) << k.describe();
  }
}

TEST(CustomKernel, ParabolaIntegral) {
  const Kernel k = make_kernel(CustomKernel{parse("t*(1-t)")});
  const auto& I = k.integral();
  ASSERT_FALSE(I.divergent);
  // Oracle: composite Simpson at ten times the resolution a coarse check
  // would use; exact for quadratics.
  const double oracle = oracle::simpson([](double t) { return t * (1 - t); }, 0.0, 1.0, 1000);
  EXPECT_NEAR(oracle, 1.0 / 6.0, 1e-15);
  EXPECT_LE(std::fabs(I.value - oracle), std::max(I.error_estimate, 1e-10));
  EXPECT_EQ(k.half_value(), 0.25);
  EXPECT_EQ(k.midpoint_coefficient(), 2.0);
}

TEST(CustomKernel, SourceTAgreesWithLinear) {
  const Kernel custom = make_kernel(CustomKernel{parse("t")});
  const Kernel linear = make_kernel(LinearKernel{});
  for (int i = 1; i < 1000; ++i) {
    const double t = i / 1000.0;
    EXPECT_NEAR(kernel_value(custom, t), kernel_value(linear, t), 1e-15);
  }
  EXPECT_NEAR(custom.integral().value, 0.5, 1e-10);
  EXPECT_EQ(custom.midpoint_coefficient(), 1.0);
}

TEST(CustomKernel, ReciprocalSourceDiverges) {
  const Kernel k = make_kernel(CustomKernel{parse("1/t")});
  EXPECT_TRUE(k.integral().divergent);
  EXPECT_EQ(k.midpoint_coefficient(), 0.25);
}

TEST(CustomKernel, Rejections) {
  auto kind_of = [](const char* src) {
    try {
      (void)make_kernel(CustomKernel{parse(src)});
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::config;  // sentinel: accepted
  };
  EXPECT_EQ(kind_of("t - 0.5"), ErrorKind::nonpositive);
  EXPECT_EQ(kind_of("0"), ErrorKind::nonpositive);
  EXPECT_EQ(kind_of("ln(t - 0.5)"), ErrorKind::domain);
  EXPECT_EQ(kind_of("x"), ErrorKind::domain);
  EXPECT_EQ(kind_of("2"), ErrorKind::config);
}

TEST(Kernel, MirroredIntegralMatches) {
  for (const KernelKind& kind :
       {KernelKind{LinearKernel{}}, KernelKind{PowerKernel{0.5}}, KernelKind{OneKernel{}},
        KernelKind{CustomKernel{parse("exp(t)")}}, KernelKind{CustomKernel{parse("t^2 + 0.1")}}}) {
    const Kernel k = make_kernel(kind);
    const auto mirrored = integrate_open01([&](double t) { return k.raw_value(1.0 - t); }, 1e-10);
    ASSERT_FALSE(mirrored.divergent);
    EXPECT_NEAR(mirrored.value, k.integral().value,
                mirrored.error_estimate + k.integral().error_estimate + 1e-10)
        << k.describe();
  }
}

TEST(Kernel, ChebyshevProbeIsInterior) {
  const auto t = chebyshev_probe(4097);
  ASSERT_EQ(t.size(), 4097u);
  for (double v : t) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_NEAR(t[2048], 0.5, 1e-15);
}

}  // namespace
}  // namespace hhdom
