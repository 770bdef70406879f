#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"
#include "hhdom/quadrature.hpp"

namespace hhdom {

/// h(t) = t
struct LinearKernel {};
/// h(t) = t^s, 0 < s < 1
struct PowerKernel {
  double s = 0.5;
};
/// h(t) = 1/t
struct ReciprocalKernel {};
/// h(t) = 1
struct OneKernel {};
/// User-supplied h, an expression in t.
struct CustomKernel {
  Expr expr;
};

using KernelKind =
    std::variant<LinearKernel, PowerKernel, ReciprocalKernel, OneKernel, CustomKernel>;

struct KernelOptions {
  /// Quadrature tolerance for custom kernel integrals.
  double tol = 1e-10;
  /// Size of the Chebyshev probe grid used for the positivity spot check.
  std::size_t probe_points = 4097;
};

/// A positive weight function on (0,1) together with the constants the
/// Hermite-Hadamard bounds need: h(1/2), 1/(2 h(1/2)) and the integral of h
/// over (0,1), which may be +inf.
class Kernel {
 public:
  [[nodiscard]] const KernelKind& kind() const { return kind_; }
  [[nodiscard]] double half_value() const { return half_value_; }
  [[nodiscard]] double midpoint_coefficient() const { return midpoint_coefficient_; }
  [[nodiscard]] const OpenIntegral& integral() const { return integral_; }
  [[nodiscard]] bool is_custom() const { return std::holds_alternative<CustomKernel>(kind_); }

  /// Short source-like description: "t", "t^0.5", "1/t", "1" or the custom
  /// expression.
  [[nodiscard]] std::string describe() const {
    struct Visitor {
      std::string operator()(const LinearKernel&) const { return "t"; }
      std::string operator()(const PowerKernel& p) const {
        return "t^" + detail::format_double(p.s);
      }
      std::string operator()(const ReciprocalKernel&) const { return "1/t"; }
      std::string operator()(const OneKernel&) const { return "1"; }
      std::string operator()(const CustomKernel& c) const { return to_string(c.expr); }
    };
    return std::visit(Visitor{}, kind_);
  }

  /// h(t) without the open-interval check; callers guarantee 0 < t < 1.
  [[nodiscard]] double raw_value(double t) const {
    struct Visitor {
      double t;
      double operator()(const LinearKernel&) const { return t; }
      double operator()(const PowerKernel& p) const { return std::pow(t, p.s); }
      double operator()(const ReciprocalKernel&) const { return 1.0 / t; }
      double operator()(const OneKernel&) const { return 1.0; }
      double operator()(const CustomKernel& c) const { return evaluate(c.expr, t); }
    };
    return std::visit(Visitor{t}, kind_);
  }

 private:
  friend Kernel make_kernel(KernelKind kind, const KernelOptions& options);

  KernelKind kind_;
  double half_value_ = 0.0;
  double midpoint_coefficient_ = 0.0;
  OpenIntegral integral_;
};

/// Evaluates h(t); EvalError(domain) unless 0 < t < 1, and for a custom
/// kernel that is not positive at t.
inline double kernel_value(const Kernel& k, double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw EvalError(ErrorKind::domain,
                    "kernel evaluated outside (0,1) at t = " + detail::format_double(t));
  }
  const double v = k.raw_value(t);
  if (!(v > 0.0)) {
    throw EvalError(ErrorKind::domain, "kernel is not positive at t = " +
                                           detail::format_double(t));
  }
  return v;
}

inline const OpenIntegral& kernel_integral(const Kernel& k) { return k.integral(); }

/// Chebyshev points of the first kind mapped to (0,1); all strictly interior.
inline std::vector<double> chebyshev_probe(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    t[i] = 0.5 * (1.0 - std::cos(theta));
  }
  return t;
}

/// Builds a kernel and precomputes its constants. Built-ins use closed
/// forms; custom kernels are probed for positivity on a Chebyshev grid
/// (a sampling guarantee only) and integrated numerically.
inline Kernel make_kernel(KernelKind kind, const KernelOptions& options = {}) {
  Kernel k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (const auto* p = std::get_if<PowerKernel>(&kind)) {
    if (!(p->s > 0.0 && p->s < 1.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "power kernel needs 0 < s < 1, got s = " + detail::format_double(p->s));
    }
  }
  if (const auto* c = std::get_if<CustomKernel>(&kind)) {
    if (c->expr.variable_name() == 'x') {
      throw Error(ErrorKind::domain, "custom kernel must be an expression in t");
    }
  }
  k.kind_ = std::move(kind);

  struct Visitor {
    Kernel& k;
    const KernelOptions& options;
    void operator()(const LinearKernel&) const {
      k.half_value_ = 0.5;
      k.midpoint_coefficient_ = 1.0;
      k.integral_ = OpenIntegral{false, 0.5, 0.0, 0};
    }
    void operator()(const PowerKernel& p) const {
      k.half_value_ = std::pow(0.5, p.s);
      k.midpoint_coefficient_ = std::pow(2.0, p.s - 1.0);
      k.integral_ = OpenIntegral{false, 1.0 / (p.s + 1.0), 0.0, 0};
    }
    void operator()(const ReciprocalKernel&) const {
      k.half_value_ = 2.0;
      k.midpoint_coefficient_ = 0.25;
      k.integral_ = OpenIntegral{true, kInf, 0.0, 0};
    }
    void operator()(const OneKernel&) const {
      k.half_value_ = 1.0;
      k.midpoint_coefficient_ = 0.5;
      k.integral_ = OpenIntegral{false, 1.0, 0.0, 0};
    }
    void operator()(const CustomKernel& c) const {
      for (double t : chebyshev_probe(options.probe_points)) {
        double v = 0.0;
        try {
          v = evaluate(c.expr, t);
        } catch (const EvalError& e) {
          throw Error(ErrorKind::domain, "custom kernel fails at t = " +
                                             detail::format_double(t) + ": " + e.what());
        }
        if (!(v > 0.0)) {
          throw Error(ErrorKind::nonpositive, "custom kernel is not positive at t = " +
                                                  detail::format_double(t));
        }
      }
      k.half_value_ = evaluate(c.expr, 0.5);
      k.midpoint_coefficient_ = 1.0 / (2.0 * k.half_value_);
      try {
        k.integral_ = integrate_open01(ExprIntegrand{&c.expr}, options.tol);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::eval) throw Error(ErrorKind::domain, e.what());
        throw;
      }
    }
  };
  std::visit(Visitor{k, options}, k.kind_);
  return k;
}

}  // namespace hhdom
