#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature.
//
// Each panel is integrated with the 15-point Kronrod rule; the embedded
// 7-point Gauss rule gives the panel error estimate |K15 - G7|. The panel
// with the largest estimate (leftmost on ties) is bisected until the summed
// estimate drops below the tolerance. Nodes are strictly interior to every
// panel, so integrands that are undefined at the interval ends (t^-1/2 on
// (0,1), say) can be handled.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"

namespace hhdom {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 1;
};

/// Integral over (0,1) that may diverge to +inf.
struct OpenIntegral {
  bool divergent = false;
  double value = 0.0;  // +inf when divergent
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
};

struct QuadOptions {
  std::size_t max_panels = 1'000'000;
  /// Relative inward nudge applied when the integrand faults near an end.
  double endpoint_nudge = 1e-12;
};

template <class F>
concept Integrand = std::invocable<const F&, double> &&
                    std::convertible_to<std::invoke_result_t<const F&, double>, double>;

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Weights of the 7-point Gauss rule on Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
};

struct PanelOrder {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;
  }
};

template <Integrand F>
class SafeIntegrand {
 public:
  SafeIntegrand(const F& fun, double lo, double hi, double nudge)
      : fun_(fun), lo_(lo), hi_(hi), nudge_(nudge * (hi - lo)) {}

  double operator()(double x) const {
    try {
      return finite_or_throw(x, static_cast<double>(fun_(x)));
    } catch (const EvalError&) {
      if (x - lo_ <= nudge_) return retry(x + nudge_, x);
      if (hi_ - x <= nudge_) return retry(x - nudge_, x);
      throw_eval(x, "integrand failed to evaluate");
    }
  }

 private:
  double retry(double moved, double original) const {
    try {
      return finite_or_throw(moved, static_cast<double>(fun_(moved)));
    } catch (const EvalError&) {
      throw_eval(original, "integrand failed to evaluate near an endpoint");
    }
  }

  double finite_or_throw(double x, double y) const {
    if (!std::isfinite(y)) throw_eval(x, "integrand is not finite");
    return y;
  }

  [[noreturn]] static void throw_eval(double x, const char* what) {
    throw Error(ErrorKind::eval, std::string(what) + " at x = " + format_double(x));
  }

  const F& fun_;
  double lo_;
  double hi_;
  double nudge_;
};

template <class F>
Panel gauss_kronrod_15(const F& fun, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> y{};
  y[0] = fun(center);
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    y[1 + 2 * i] = fun(center - dx);
    y[2 + 2 * i] = fun(center + dx);
  }
  Panel p{a, b, 0.0, 0.0, 0.0};
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
    p.value = y[0] * (b - a);
    p.abs_value = std::fabs(p.value);
    return p;
  }
  double kronrod = kKronrodWeights[7] * y[0];
  double gauss = kGaussWeights[3] * y[0];
  double abs_sum = kKronrodWeights[7] * std::fabs(y[0]);
  for (std::size_t i = 0; i < 7; ++i) {
    const double pair = y[1 + 2 * i] + y[2 + 2 * i];
    kronrod += kKronrodWeights[i] * pair;
    abs_sum += kKronrodWeights[i] * (std::fabs(y[1 + 2 * i]) + std::fabs(y[2 + 2 * i]));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  p.value = kronrod * half;
  p.error = std::fabs((kronrod - gauss) * half);
  p.abs_value = abs_sum * std::fabs(half);
  return p;
}

}  // namespace detail

/// Adaptive integral of `fun` over [a, b] to absolute tolerance `tol`.
///
/// The effective tolerance is max(tol, 50 eps * integral of |fun|) so that
/// requests below round-off terminate. Throws Error(budget) when the panel
/// budget is exhausted or a panel can no longer be bisected, Error(eval)
/// when the integrand faults at an interior node, Error(invalid_argument)
/// unless a < b and tol > 0.
template <Integrand F>
QuadResult integrate(const F& fun, double a, double b, double tol,
                     const QuadOptions& options = {}) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw Error(ErrorKind::invalid_argument, "integrate: need finite a < b");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "integrate: tol must be > 0");

  const detail::SafeIntegrand<F> safe(fun, a, b, options.endpoint_nudge);
  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> queue;
  queue.push(detail::gauss_kronrod_15(safe, a, b));
  std::size_t panels = 1;
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();

  auto totals = [&queue] {
    // Sum in left-to-right order so the result does not depend on the
    // history of the running sums.
    auto copy = queue;
    std::vector<detail::Panel> all;
    all.reserve(copy.size());
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    detail::Panel sum;
    for (const auto& p : all) {
      sum.value += p.value;
      sum.error += p.error;
      sum.abs_value += p.abs_value;
    }
    return sum;
  };

  double error_sum = queue.top().error;
  double abs_sum = queue.top().abs_value;
  for (;;) {
    if (error_sum <= std::max(tol, kRoundoff * abs_sum)) {
      const auto exact = totals();
      if (exact.error <= std::max(tol, kRoundoff * exact.abs_value)) {
        return QuadResult{exact.value, exact.error, panels};
      }
      error_sum = exact.error;
      abs_sum = exact.abs_value;
    }
    if (panels >= options.max_panels) {
      throw Error(ErrorKind::budget, "integrate: panel budget of " +
                                         std::to_string(options.max_panels) +
                                         " exhausted");
    }
    const detail::Panel worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::fabs(worst.a), std::fabs(worst.b))) {
      throw Error(ErrorKind::budget, "integrate: panel near x = " + detail::format_double(mid) +
                                         " cannot be subdivided further");
    }
    queue.pop();
    const auto left = detail::gauss_kronrod_15(safe, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(safe, mid, worst.b);
    error_sum += left.error + right.error - worst.error;
    abs_sum += left.abs_value + right.abs_value - worst.abs_value;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
}

/// Cut-offs of the divergence ladder: integrals over [eps, 1 - eps].
inline constexpr std::array<double, 6> kOpenLadder{1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12};

/// Integral of `fun` over the open interval (0,1).
///
/// The integral over [eps, 1-eps] is tracked down the ladder above; a
/// relative change above 1% at the last step is reported as divergence.
/// Otherwise a final pass over the whole interval (interior nodes only)
/// gives the value. If that pass runs out of budget the last ladder value
/// is returned with the last ladder change folded into the error estimate.
template <Integrand F>
OpenIntegral integrate_open01(const F& fun, double tol, const QuadOptions& options = {}) {
  std::array<double, kOpenLadder.size()> values{};
  std::size_t subdivisions = 0;
  std::size_t done = 0;
  auto growing = [&] {
    return std::fabs(values[done - 1] - values[done - 2]) > 0.01 * std::fabs(values[done - 1]);
  };
  for (; done < kOpenLadder.size(); ++done) {
    const double eps = kOpenLadder[done];
    try {
      const auto r = integrate(fun, eps, 1.0 - eps, tol, options);
      values[done] = r.value;
      subdivisions += r.subdivisions;
    } catch (const Error& e) {
      // Near t = 1 the doubles are too coarse to resolve a steep endpoint
      // singularity; if the integral was still growing, call it divergent.
      if (e.kind() != ErrorKind::budget || done < 2 || !growing()) throw;
      return OpenIntegral{true, std::numeric_limits<double>::infinity(), 0.0, subdivisions};
    }
  }
  const double last = values.back();
  const double change = std::fabs(last - values[done - 2]);
  if (growing()) {
    return OpenIntegral{true, std::numeric_limits<double>::infinity(), 0.0, subdivisions};
  }
  try {
    const auto full = integrate(fun, 0.0, 1.0, tol, options);
    return OpenIntegral{false, full.value, full.error_estimate,
                        subdivisions + full.subdivisions};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::budget) throw;
    return OpenIntegral{false, last, change + tol, subdivisions};
  }
}

/// Integrand adaptor for an expression.
struct ExprIntegrand {
  const Expr* expr;
  double operator()(double x) const { return evaluate(*expr, x); }
};

}  // namespace hhdom
