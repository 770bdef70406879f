#pragma once

// Pointwise defects and sampled certification of h-convexity,
// phi_h-convexity and (g, phi_h)-convex dominance.
//
// A defect is  h(t) f(phi(x)) + h(1-t) f(phi(y)) - f(t phi(x) + (1-t) phi(y)),
// nonnegative exactly where the convexity inequality holds. A dominance gap
// is  defect(g) - |defect(f)|.  Verdicts are over a finite sample set only:
// "holds-on-samples" is never a proof.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"
#include "hhdom/geometry.hpp"
#include "hhdom/kernel.hpp"
#include "hhdom/sampling.hpp"

namespace hhdom {

/// f is the candidate, g the dominator.
struct FunctionPair {
  Expr f;
  Expr g;
};

enum class Verdict { holds_on_samples, violated };

inline std::string_view to_string(Verdict v) {
  return v == Verdict::holds_on_samples ? "holds-on-samples" : "violated";
}

struct SampleGap {
  Triple point;
  double gap = 0.0;
  double scale = 0.0;
};

struct CheckReport {
  Verdict verdict = Verdict::holds_on_samples;
  std::size_t samples_checked = 0;
  /// Minimum gap over all samples; ties go to the lexicographically
  /// smallest (x, y, t).
  double worst_gap = std::numeric_limits<double>::infinity();
  Triple witness;
  /// Max |side| at the witness; the violation threshold there is
  /// atol + rtol * witness_scale.
  double witness_scale = 0.0;
  std::size_t violations = 0;
  std::vector<std::string> warnings;
  std::vector<SampleGap> samples;

  [[nodiscard]] bool holds() const { return verdict == Verdict::holds_on_samples; }
};

/// The two sides of one convexity inequality.
struct DefectTerms {
  double weighted = 0.0;  // h(t) f(u) + h(1-t) f(v)
  double at_mid = 0.0;    // f(t u + (1-t) v)

  [[nodiscard]] double defect() const { return weighted - at_mid; }
  [[nodiscard]] double scale() const { return std::max(std::fabs(weighted), std::fabs(at_mid)); }
};

struct DominanceTerms {
  double lhs_abs = 0.0;  // |defect(f)|
  double rhs = 0.0;      // defect(g)

  [[nodiscard]] double gap() const { return rhs - lhs_abs; }
  [[nodiscard]] double scale() const { return std::max(lhs_abs, std::fabs(rhs)); }
};

namespace detail {

// Defect at already-mapped points u = phi(x), v = phi(y).
inline DefectTerms defect_terms_at(const Expr& f, double hu, double hv, double u, double v,
                                   double t) {
  const double mid = t * u + (1.0 - t) * v;
  return DefectTerms{hu * evaluate(f, u) + hv * evaluate(f, v), evaluate(f, mid)};
}

inline std::string describe_point(const Triple& p) {
  return "(x = " + format_double(p.x) + ", y = " + format_double(p.y) +
         ", t = " + format_double(p.t) + ")";
}

template <class Fn>
auto at_point(const Triple& p, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const EvalError& e) {
    throw EvalError(e.kind(), std::string(e.what()) + " at " + describe_point(p));
  }
}

inline void require_inside(const Interval& sample, const Interval& domain) {
  if (sample.a() < domain.a() || sample.b() > domain.b()) {
    throw Error(ErrorKind::domain, "sample interval " + sample.describe() +
                                       " is not inside the domain of phi " + domain.describe());
  }
}

/// Folds per-sample gaps into a CheckReport.
class GapAccumulator {
 public:
  GapAccumulator(Tolerance tol, bool record) : tol_(tol), record_(record) {}

  void add(const Triple& p, double gap, double scale) {
    ++report_.samples_checked;
    if (gap < report_.worst_gap || (gap == report_.worst_gap && p < report_.witness)) {
      report_.worst_gap = gap;
      report_.witness = p;
      report_.witness_scale = scale;
    }
    if (gap < -tol_.threshold(scale)) {
      ++report_.violations;
    } else if (gap < 0.0) {
      ++near_zero_;
      near_zero_min_ = std::min(near_zero_min_, gap);
    }
    if (record_) report_.samples.push_back({p, gap, scale});
  }

  CheckReport finish(std::vector<std::string> extra_warnings = {}) {
    report_.verdict = report_.violations > 0 ? Verdict::violated : Verdict::holds_on_samples;
    report_.warnings = std::move(extra_warnings);
    if (near_zero_ > 0) {
      report_.warnings.push_back(std::to_string(near_zero_) +
                                 " sample(s) had a negative gap within tolerance (min " +
                                 format_double(near_zero_min_) + ")");
    }
    return std::move(report_);
  }

 private:
  Tolerance tol_;
  bool record_;
  CheckReport report_;
  std::size_t near_zero_ = 0;
  double near_zero_min_ = 0.0;
};

/// Tracks the smallest sampled value of a function so that leaving the
/// codomain [0, inf) can be reported.
class CodomainWatch {
 public:
  explicit CodomainWatch(std::string name) : name_(std::move(name)) {}

  void note(double value, double at) {
    if (value < min_) {
      min_ = value;
      at_ = at;
    }
  }

  void append_warning(std::vector<std::string>& out) const {
    if (min_ < 0.0) {
      out.push_back(name_ + " takes negative values on the samples (min " + format_double(min_) +
                    " at " + format_double(at_) + "); codomain [0, inf) is assumed");
    }
  }

 private:
  std::string name_;
  double min_ = 0.0;
  double at_ = 0.0;
};

}  // namespace detail

/// h(a) f(x) + h(1-a) f(y) - f(a x + (1-a) y); a must lie in (0,1).
inline double h_convex_defect(const Expr& f, const Kernel& h, double x, double y, double alpha) {
  return detail::defect_terms_at(f, kernel_value(h, alpha), kernel_value(h, 1.0 - alpha), x, y,
                                 alpha)
      .defect();
}

template <PhiMap M>
DefectTerms phi_h_terms(const Expr& f, const Kernel& h, const M& phi, double x, double y,
                        double t) {
  return detail::defect_terms_at(f, kernel_value(h, t), kernel_value(h, 1.0 - t), phi(x), phi(y),
                                 t);
}

/// h(t) f(phi(x)) + h(1-t) f(phi(y)) - f(t phi(x) + (1-t) phi(y)).
template <PhiMap M>
double phi_h_defect(const Expr& f, const Kernel& h, const M& phi, double x, double y, double t) {
  return phi_h_terms(f, h, phi, x, y, t).defect();
}

template <PhiMap M>
DominanceTerms dominance_terms(const FunctionPair& pair, const Kernel& h, const M& phi, double x,
                               double y, double t) {
  const double ht = kernel_value(h, t);
  const double h1t = kernel_value(h, 1.0 - t);
  const double u = phi(x);
  const double v = phi(y);
  const double df = detail::defect_terms_at(pair.f, ht, h1t, u, v, t).defect();
  const double dg = detail::defect_terms_at(pair.g, ht, h1t, u, v, t).defect();
  return DominanceTerms{std::fabs(df), dg};
}

/// defect(g) - |defect(f)|; nonnegative iff the dominance inequality holds
/// at (x, y, t).
template <PhiMap M>
double dominance_gap(const FunctionPair& pair, const Kernel& h, const M& phi, double x, double y,
                     double t) {
  return dominance_terms(pair, h, phi, x, y, t).gap();
}

/// Sampled check of phi_h-convexity of f over `interval`. `name` labels the
/// function in warnings.
template <PhiMap M>
CheckReport check_phi_h_convex(const Expr& f, const Kernel& h, const M& phi,
                               const Interval& interval, const SamplePlan& plan,
                               std::string_view name = "f") {
  detail::require_inside(interval, phi.domain());
  detail::GapAccumulator acc(plan.tolerance, plan.record_samples);
  detail::CodomainWatch watch{std::string(name)};
  for (const Triple& p : sample_triples(plan, interval)) {
    detail::at_point(p, [&] {
      const double ht = kernel_value(h, p.t);
      const double h1t = kernel_value(h, 1.0 - p.t);
      const double u = phi(p.x);
      const double v = phi(p.y);
      const double fu = evaluate(f, u);
      const double fv = evaluate(f, v);
      const double mid = p.t * u + (1.0 - p.t) * v;
      const DefectTerms terms{ht * fu + h1t * fv, evaluate(f, mid)};
      watch.note(fu, u);
      watch.note(fv, v);
      watch.note(terms.at_mid, mid);
      acc.add(p, terms.defect(), terms.scale());
    });
  }
  std::vector<std::string> warnings;
  watch.append_warning(warnings);
  return acc.finish(std::move(warnings));
}

/// Sampled check of (g, phi_h)-convex dominance of f. The dominator must
/// itself pass check_phi_h_convex on the same plan, else Error(precondition).
template <PhiMap M>
CheckReport check_dominated(const FunctionPair& pair, const Kernel& h, const M& phi,
                            const Interval& interval, const SamplePlan& plan) {
  SamplePlan quiet = plan;
  quiet.record_samples = false;
  const auto dominator = check_phi_h_convex(pair.g, h, phi, interval, quiet, "g");
  if (!dominator.holds()) {
    throw Error(ErrorKind::precondition,
                "dominator g is not phi_h-convex on the samples (worst defect " +
                    detail::format_double(dominator.worst_gap) + " at " +
                    detail::describe_point(dominator.witness) + ")");
  }
  detail::GapAccumulator acc(plan.tolerance, plan.record_samples);
  detail::CodomainWatch fwatch{"f"};
  for (const Triple& p : sample_triples(plan, interval)) {
    detail::at_point(p, [&] {
      const auto terms = dominance_terms(pair, h, phi, p.x, p.y, p.t);
      fwatch.note(evaluate(pair.f, phi(p.x)), phi(p.x));
      acc.add(p, terms.gap(), terms.scale());
    });
  }
  std::vector<std::string> warnings;
  for (const auto& w : dominator.warnings) {
    warnings.push_back(w.starts_with("g ") ? w : "dominator g: " + w);
  }
  fwatch.append_warning(warnings);
  return acc.finish(std::move(warnings));
}

/// l = g + f and k = g - f, as unsimplified trees.
inline std::pair<Expr, Expr> decompose(const FunctionPair& pair) {
  return {pair.g + pair.f, pair.g - pair.f};
}

/// f = (l - k) / 2 and g = (l + k) / 2.
inline FunctionPair compose(const Expr& l, const Expr& k) {
  const Expr two = Expr::constant(2.0);
  return FunctionPair{(l - k) / two, (l + k) / two};
}

struct Lemma2Sample {
  Triple point;
  double dominance_gap = 0.0;
  double g_minus_f_defect = 0.0;
  double g_plus_f_defect = 0.0;
  double l_defect = 0.0;
  double k_defect = 0.0;
};

/// The three equivalent characterizations of dominance, each evaluated on
/// the same samples:
///   1. f is (g, phi_h)-convex dominated;
///   2. g - f and g + f are phi_h-convex;
///   3. l = g + f and k = g - f (from decompose) are phi_h-convex.
struct Lemma2Report {
  CheckReport dominance;
  CheckReport g_minus_f;
  CheckReport g_plus_f;
  Expr l;
  Expr k;
  CheckReport l_convex;
  CheckReport k_convex;
  std::vector<Lemma2Sample> samples;

  [[nodiscard]] bool statement1() const { return dominance.holds(); }
  [[nodiscard]] bool statement2() const { return g_minus_f.holds() && g_plus_f.holds(); }
  [[nodiscard]] bool statement3() const { return l_convex.holds() && k_convex.holds(); }
  [[nodiscard]] bool agreement() const {
    return statement1() == statement2() && statement2() == statement3();
  }
};

/// Evaluates all three statements. Every statement at a sample uses one
/// shared violation threshold, atol + rtol * S, where S is the largest
/// |side| among all the defects at that sample, so that the pointwise
/// equivalence  gap >= 0  <=>  defect(g-f) >= 0 and defect(g+f) >= 0
/// carries over to the verdicts. g's own convexity is not a gate here.
template <PhiMap M>
Lemma2Report lemma2_report(const FunctionPair& pair, const Kernel& h, const M& phi,
                           const Interval& interval, const SamplePlan& plan) {
  detail::require_inside(interval, phi.domain());
  auto [l, k] = decompose(pair);
  const Expr g_minus_f = pair.g - pair.f;
  const Expr g_plus_f = pair.g + pair.f;

  const Tolerance tol = plan.tolerance;
  detail::GapAccumulator s1(tol, false), s2m(tol, false), s2p(tol, false), s3l(tol, false),
      s3k(tol, false);
  detail::CodomainWatch fwatch{"f"}, gwatch{"g"};
  std::vector<Lemma2Sample> samples;

  for (const Triple& p : sample_triples(plan, interval)) {
    detail::at_point(p, [&] {
      const double ht = kernel_value(h, p.t);
      const double h1t = kernel_value(h, 1.0 - p.t);
      const double u = phi(p.x);
      const double v = phi(p.y);
      const auto tf = detail::defect_terms_at(pair.f, ht, h1t, u, v, p.t);
      const auto tg = detail::defect_terms_at(pair.g, ht, h1t, u, v, p.t);
      const auto tm = detail::defect_terms_at(g_minus_f, ht, h1t, u, v, p.t);
      const auto tp = detail::defect_terms_at(g_plus_f, ht, h1t, u, v, p.t);
      const auto tl = detail::defect_terms_at(l, ht, h1t, u, v, p.t);
      const auto tk = detail::defect_terms_at(k, ht, h1t, u, v, p.t);
      const DominanceTerms dom{std::fabs(tf.defect()), tg.defect()};
      const double scale = std::max({tf.scale(), tg.scale(), tm.scale(), tp.scale(), tl.scale(),
                                     tk.scale(), dom.scale()});
      fwatch.note(evaluate(pair.f, u), u);
      gwatch.note(evaluate(pair.g, u), u);
      s1.add(p, dom.gap(), scale);
      s2m.add(p, tm.defect(), scale);
      s2p.add(p, tp.defect(), scale);
      s3l.add(p, tl.defect(), scale);
      s3k.add(p, tk.defect(), scale);
      if (plan.record_samples) {
        samples.push_back({p, dom.gap(), tm.defect(), tp.defect(), tl.defect(), tk.defect()});
      }
    });
  }
  std::vector<std::string> warnings;
  fwatch.append_warning(warnings);
  gwatch.append_warning(warnings);
  return Lemma2Report{s1.finish(warnings), s2m.finish(), s2p.finish(), std::move(l),
                      std::move(k),        s3l.finish(), s3k.finish(), std::move(samples)};
}

}  // namespace hhdom
