#pragma once

// Both sides of the Hermite-Hadamard-type bounds for (g, phi_h)-convex
// dominated f, with phi affine and w = phi(b) - phi(a):
//
//   midpoint:  | mean(f) - c f(m) |                 <=  mean(g) - c g(m)
//   endpoint:  | (f(phi a) + f(phi b)) H - mean(f) | <= (g(phi a) + g(phi b)) H - mean(g)
//
// where mean(u) = (1/w) * integral of u from phi(a) to phi(b),
// m = (phi(a) + phi(b)) / 2, c = 1 / (2 h(1/2)) and H = integral of h over
// (0,1). With H = +inf the endpoint bound is vacuous.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hhdom/convexity.hpp"
#include "hhdom/error.hpp"
#include "hhdom/geometry.hpp"
#include "hhdom/kernel.hpp"
#include "hhdom/quadrature.hpp"

namespace hhdom {

enum class BoundKind { midpoint, endpoint };

inline std::string_view to_string(BoundKind b) {
  return b == BoundKind::midpoint ? "midpoint" : "endpoint";
}

struct InputsEcho {
  std::string f;
  std::string g;
  std::string h;
  std::string phi;
  std::string interval;
};

struct HHReport {
  std::string label;
  BoundKind bound = BoundKind::midpoint;
  /// c for the midpoint bound, H for the endpoint bound (may be +inf).
  double coefficient = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
  bool vacuous = false;
  double quad_error = 0.0;
  InputsEcho inputs;
  std::vector<std::string> warnings;
};

struct HHOptions {
  /// Combined quadrature tolerance of a report; each mean gets tol / 4.
  double tol = 1e-10;
  Tolerance tolerance;
  QuadOptions quad;
};

namespace detail {

struct Mean {
  double value = 0.0;
  double error = 0.0;
};

inline Mean image_mean(const Expr& u, const AffineMap& phi, double tol, const QuadOptions& q) {
  const double lo = std::min(phi.image_a(), phi.image_b());
  const double hi = std::max(phi.image_a(), phi.image_b());
  const double width = hi - lo;
  const auto r = integrate(ExprIntegrand{&u}, lo, hi, tol * width, q);
  return Mean{r.value / width, r.error_estimate / width};
}

inline void require_nondegenerate(const AffineMap& phi) {
  if (image_width(phi) == 0.0) {
    throw Error(ErrorKind::degenerate, "phi is constant on the interval (phi(b) = phi(a))");
  }
}

inline InputsEcho echo(const FunctionPair& pair, const Kernel& h, const AffineMap& phi) {
  return InputsEcho{to_string(pair.f), to_string(pair.g), h.describe(), phi.describe(),
                    phi.domain().describe()};
}

inline void finish(HHReport& r, const Tolerance& tol) {
  r.margin = r.rhs - r.lhs;
  if (r.margin == std::numeric_limits<double>::infinity() || r.vacuous) {
    r.margin = std::numeric_limits<double>::infinity();
    r.holds = true;
    return;
  }
  r.holds = r.margin >= -tol.threshold(std::max(std::fabs(r.lhs), std::fabs(r.rhs)));
  if (r.rhs < -tol.threshold(std::fabs(r.rhs))) {
    r.warnings.push_back("right-hand side is negative: g does not look phi_h-convex, so the "
                         "bound's precondition is violated");
  }
}

template <class Fn>
double eval_at(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const EvalError& e) {
    throw EvalError(e.kind(), std::string(name) + ": " + e.what());
  }
}

// Integral of h(1-t) over (0,1) must match that of h(t); the endpoint bound
// is derived from this identity.
inline void require_kernel_symmetry(const Kernel& h, const HHOptions& opt) {
  if (!h.is_custom()) return;
  const auto mirrored = integrate_open01([&h](double t) { return h.raw_value(1.0 - t); },
                                         opt.tol, opt.quad);
  const auto& direct = h.integral();
  if (mirrored.divergent != direct.divergent) {
    throw Error(ErrorKind::kernel_symmetry,
                "kernel integral of h(t) and h(1-t) disagree on divergence");
  }
  if (direct.divergent) return;
  const double slack =
      direct.error_estimate + mirrored.error_estimate + opt.tol +
      opt.tolerance.threshold(std::max(std::fabs(direct.value), std::fabs(mirrored.value)));
  if (std::fabs(direct.value - mirrored.value) > slack) {
    throw Error(ErrorKind::kernel_symmetry,
                "integral of h(t) (" + format_double(direct.value) + ") differs from that of "
                "h(1-t) (" + format_double(mirrored.value) + ")");
  }
}

}  // namespace detail

/// Midpoint bound. Error(degenerate) when phi(b) = phi(a).
inline HHReport hh_midpoint_report(const FunctionPair& pair, const Kernel& h,
                                   const AffineMap& phi, const HHOptions& opt = {}) {
  detail::require_nondegenerate(phi);
  const double c = h.midpoint_coefficient();
  const double m = 0.5 * (phi.image_a() + phi.image_b());
  const auto mf = detail::image_mean(pair.f, phi, opt.tol / 4.0, opt.quad);
  const auto mg = detail::image_mean(pair.g, phi, opt.tol / 4.0, opt.quad);
  const double fm = detail::eval_at("f", [&] { return evaluate(pair.f, m); });
  const double gm = detail::eval_at("g", [&] { return evaluate(pair.g, m); });

  HHReport r;
  r.label = "midpoint";
  r.bound = BoundKind::midpoint;
  r.coefficient = c;
  r.lhs = std::fabs(mf.value - c * fm);
  r.rhs = mg.value - c * gm;
  r.quad_error = mf.error + mg.error;
  r.inputs = detail::echo(pair, h, phi);
  detail::finish(r, opt.tolerance);
  return r;
}

/// Endpoint bound. With a divergent kernel integral the right side is +inf
/// whenever g(phi a) + g(phi b) > 0 and the report is vacuous.
inline HHReport hh_endpoint_report(const FunctionPair& pair, const Kernel& h,
                                   const AffineMap& phi, const HHOptions& opt = {}) {
  detail::require_nondegenerate(phi);
  detail::require_kernel_symmetry(h, opt);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto& hint = h.integral();
  const double H = hint.divergent ? kInf : hint.value;
  const auto mf = detail::image_mean(pair.f, phi, opt.tol / 4.0, opt.quad);
  const auto mg = detail::image_mean(pair.g, phi, opt.tol / 4.0, opt.quad);
  const double fsum = detail::eval_at("f", [&] {
    return evaluate(pair.f, phi.image_a()) + evaluate(pair.f, phi.image_b());
  });
  const double gsum = detail::eval_at("g", [&] {
    return evaluate(pair.g, phi.image_a()) + evaluate(pair.g, phi.image_b());
  });
  // 0 * inf is taken as 0: the integral of 0 * h vanishes.
  auto weighted = [&](double sum) { return sum == 0.0 ? 0.0 : sum * H; };

  HHReport r;
  r.label = "endpoint";
  r.bound = BoundKind::endpoint;
  r.coefficient = H;
  r.lhs = std::fabs(weighted(fsum) - mf.value);
  r.rhs = weighted(gsum) - mg.value;
  r.vacuous = hint.divergent && gsum > 0.0;
  r.quad_error = mf.error + mg.error + (hint.divergent ? 0.0 : hint.error_estimate *
                                                                  (std::fabs(fsum) + std::fabs(gsum)));
  r.inputs = detail::echo(pair, h, phi);
  detail::finish(r, opt.tolerance);
  return r;
}

enum class CorollaryKind { linear, power, reciprocal, one };

/// Names of the four classical kernel families, used as report labels.
inline std::string_view family_name(CorollaryKind which) {
  switch (which) {
    case CorollaryKind::linear: return "convex";
    case CorollaryKind::power: return "s-convex";
    case CorollaryKind::reciprocal: return "godunova-levin";
    case CorollaryKind::one: return "p-function";
  }
  return "";
}

inline Kernel builtin_kernel(CorollaryKind which, double s = 0.5) {
  switch (which) {
    case CorollaryKind::linear: return make_kernel(LinearKernel{});
    case CorollaryKind::power: return make_kernel(PowerKernel{s});
    case CorollaryKind::reciprocal: return make_kernel(ReciprocalKernel{});
    case CorollaryKind::one: return make_kernel(OneKernel{});
  }
  throw Error(ErrorKind::invalid_argument, "unknown kernel family");
}

/// The bounds for one built-in kernel: the midpoint bound always, the
/// endpoint bound only when the kernel integral is finite (so the 1/t
/// family yields a single report). Labels are "<family>.<bound>".
inline std::vector<HHReport> corollary_report(const FunctionPair& pair, const AffineMap& phi,
                                              CorollaryKind which, double s = 0.5,
                                              const HHOptions& opt = {}) {
  const Kernel h = builtin_kernel(which, s);
  std::vector<HHReport> out;
  out.push_back(hh_midpoint_report(pair, h, phi, opt));
  if (!h.integral().divergent) out.push_back(hh_endpoint_report(pair, h, phi, opt));
  for (auto& r : out) r.label = std::string(family_name(which)) + "." + std::string(to_string(r.bound));
  return out;
}

}  // namespace hhdom
