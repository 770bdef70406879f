#pragma once

#include <cmath>
#include <concepts>
#include <string>

#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"

namespace hhdom {

/// Closed interval [a, b] with finite a < b.
class Interval {
 public:
  Interval(double a, double b) : a_(a), b_(b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
      throw Error(ErrorKind::invalid_argument, "interval needs finite a < b, got [" +
                                                   detail::format_double(a) + ", " +
                                                   detail::format_double(b) + "]");
    }
  }

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double width() const { return b_ - a_; }
  [[nodiscard]] bool contains(double x) const { return x >= a_ && x <= b_; }

  [[nodiscard]] std::string describe() const {
    return "[" + detail::format_double(a_) + ", " + detail::format_double(b_) + "]";
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Anything usable as the inner map x -> phi(x) of the convexity checkers.
template <class M>
concept PhiMap = requires(const M& m, double x) {
  { m(x) } -> std::convertible_to<double>;
  { m.domain() } -> std::convertible_to<Interval>;
  { m.describe() } -> std::convertible_to<std::string>;
};

/// phi(x) = alpha * x + beta on an interval it maps into itself.
///
/// Only affine maps are accepted by the Hermite-Hadamard engine: the bounds
/// rely on phi(l a + (1-l) b) = l phi(a) + (1-l) phi(b). Both beta = 0 and
/// beta != 0 are allowed.
class AffineMap {
 public:
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] const Interval& domain() const { return domain_; }
  [[nodiscard]] double image_a() const { return image_a_; }
  [[nodiscard]] double image_b() const { return image_b_; }
  [[nodiscard]] bool is_identity() const { return alpha_ == 1.0 && beta_ == 0.0; }

  /// Unchecked evaluation, used by the samplers whose points are in the
  /// domain by construction.
  double operator()(double x) const { return alpha_ * x + beta_; }

  [[nodiscard]] std::string describe() const {
    if (is_identity()) return "identity";
    return detail::format_double(alpha_) + "*x + " + detail::format_double(beta_);
  }

 private:
  AffineMap(double alpha, double beta, Interval domain)
      : alpha_(alpha), beta_(beta), domain_(domain),
        image_a_(alpha * domain.a() + beta), image_b_(alpha * domain.b() + beta) {}

  friend AffineMap make_affine(double alpha, double beta, Interval domain);

  double alpha_;
  double beta_;
  Interval domain_;
  double image_a_;
  double image_b_;
};

/// Error(range) when phi(a) or phi(b) leaves [a, b]; affinity then keeps
/// the whole image inside.
inline AffineMap make_affine(double alpha, double beta, Interval domain) {
  if (!(std::isfinite(alpha) && std::isfinite(beta))) {
    throw Error(ErrorKind::invalid_argument, "affine map coefficients must be finite");
  }
  AffineMap m(alpha, beta, domain);
  if (!std::isfinite(m.image_a()) || !std::isfinite(m.image_b()) ||
      !domain.contains(m.image_a()) || !domain.contains(m.image_b())) {
    throw Error(ErrorKind::range, "phi maps " + domain.describe() + " onto [" +
                                      detail::format_double(m.image_a()) + ", " +
                                      detail::format_double(m.image_b()) +
                                      "], which leaves the interval");
  }
  return m;
}

inline AffineMap identity_map(Interval domain) { return make_affine(1.0, 0.0, domain); }

/// Checked evaluation; Error(domain) when x is outside the domain.
inline double apply(const AffineMap& phi, double x) {
  if (!phi.domain().contains(x)) {
    throw Error(ErrorKind::domain, "phi applied outside its domain at x = " +
                                       detail::format_double(x));
  }
  return phi(x);
}

/// phi(b) - phi(a). May be zero (constant map) or negative.
inline double image_width(const AffineMap& phi) { return phi.image_b() - phi.image_a(); }

/// General (possibly nonlinear) phi given by an expression. Accepted only by
/// the convexity and dominance checkers, never by the Hermite-Hadamard
/// bounds. Image containment is checked on a uniform probe at construction.
class ExprMap {
 public:
  ExprMap(Expr expr, Interval domain, std::size_t probe_points = 1001)
      : expr_(std::move(expr)), domain_(domain) {
    for (std::size_t i = 0; i < probe_points; ++i) {
      const double x = domain_.a() + domain_.width() * static_cast<double>(i) /
                                         static_cast<double>(probe_points - 1);
      const double y = evaluate(expr_, x);
      if (!domain_.contains(y)) {
        throw Error(ErrorKind::range, "phi(" + detail::format_double(x) + ") = " +
                                          detail::format_double(y) + " leaves " +
                                          domain_.describe());
      }
    }
  }

  double operator()(double x) const { return evaluate(expr_, x); }
  [[nodiscard]] const Interval& domain() const { return domain_; }
  [[nodiscard]] const Expr& expr() const { return expr_; }
  [[nodiscard]] std::string describe() const { return to_string(expr_); }

 private:
  Expr expr_;
  Interval domain_;
};

}  // namespace hhdom
