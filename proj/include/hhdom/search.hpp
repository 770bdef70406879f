#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "hhdom/convexity.hpp"
#include "hhdom/sampling.hpp"

namespace hhdom {

/// A sample (x, y, t) where the dominance inequality fails:
/// gap = rhs - lhs_abs < -(atol + rtol * scale).
struct ViolationRecord {
  double x = 0.0;
  double y = 0.0;
  double t = 0.5;
  double gap = 0.0;
  double lhs_abs = 0.0;
  double rhs = 0.0;
  bool refined = false;

  [[nodiscard]] Triple point() const { return {x, y, t}; }
};

struct SearchOptions {
  bool refine = false;
  /// Number of worst samples used as refinement starts.
  std::size_t refine_starts = 10;
  std::size_t max_iterations = 50;
};

struct SearchReport {
  /// Sorted by gap ascending, ties by (x, y, t).
  std::vector<ViolationRecord> records;
  std::size_t samples_checked = 0;
  /// Worst gap over the plain sample sweep.
  double worst_sample_gap = std::numeric_limits<double>::infinity();
  /// Worst gap after refinement (equal to worst_sample_gap without it).
  double worst_gap = std::numeric_limits<double>::infinity();
};

namespace detail {

// Derivative-free coordinate descent with step halving on the box
// [a,b] x [a,b] x [eps, 1-eps]. Only strict improvements are accepted.
template <PhiMap M>
std::pair<Triple, DominanceTerms> refine_violation(const FunctionPair& pair, const Kernel& h,
                                                   const M& phi, const Interval& iv,
                                                   double eps, Triple start,
                                                   std::array<double, 3> step,
                                                   std::size_t max_iterations) {
  auto eval = [&](const Triple& p) {
    return at_point(p, [&] { return dominance_terms(pair, h, phi, p.x, p.y, p.t); });
  };
  const std::array<double, 3> lo{iv.a(), iv.a(), eps};
  const std::array<double, 3> hi{iv.b(), iv.b(), 1.0 - eps};
  Triple best = start;
  DominanceTerms best_terms = eval(best);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool improved = false;
    for (std::size_t c = 0; c < 3 && !improved; ++c) {
      for (double sign : {1.0, -1.0}) {
        Triple cand = best;
        double* coord = c == 0 ? &cand.x : c == 1 ? &cand.y : &cand.t;
        *coord = std::clamp(*coord + sign * step[c], lo[c], hi[c]);
        if (cand == best) continue;
        const auto terms = eval(cand);
        if (terms.gap() < best_terms.gap()) {
          best = cand;
          best_terms = terms;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      for (double& s : step) s *= 0.5;
    }
  }
  return {best, best_terms};
}

inline bool record_less(const ViolationRecord& l, const ViolationRecord& r) {
  if (l.gap != r.gap) return l.gap < r.gap;
  return l.point() < r.point();
}

}  // namespace detail

/// Sweeps the plan for violations of the dominance inequality and,
/// optionally, sharpens the worst ones by coordinate descent. An empty
/// result means no violation was found at this sampling density; it does
/// not certify dominance. Deterministic for a fixed plan and seed.
template <PhiMap M>
SearchReport search_violations(const FunctionPair& pair, const Kernel& h, const M& phi,
                               const Interval& interval, const SamplePlan& plan,
                               const SearchOptions& options = {}) {
  detail::require_inside(interval, phi.domain());
  const auto triples = sample_triples(plan, interval);
  SearchReport report;
  report.samples_checked = triples.size();

  struct Scored {
    Triple p;
    DominanceTerms terms;
  };
  std::vector<Scored> scored;
  scored.reserve(triples.size());
  for (const Triple& p : triples) {
    scored.push_back({p, detail::at_point(p, [&] {
                        return dominance_terms(pair, h, phi, p.x, p.y, p.t);
                      })});
  }

  auto is_violation = [&](const DominanceTerms& d) {
    return d.gap() < -plan.tolerance.threshold(d.scale());
  };
  auto to_record = [](const Triple& p, const DominanceTerms& d, bool refined) {
    return ViolationRecord{p.x, p.y, p.t, d.gap(), d.lhs_abs, d.rhs, refined};
  };

  for (const auto& s : scored) {
    report.worst_sample_gap = std::min(report.worst_sample_gap, s.terms.gap());
    if (is_violation(s.terms)) report.records.push_back(to_record(s.p, s.terms, false));
  }
  report.worst_gap = report.worst_sample_gap;

  if (options.refine && !scored.empty()) {
    const std::size_t starts = std::min(options.refine_starts, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(starts),
                      scored.end(), [](const Scored& l, const Scored& r) {
                        if (l.terms.gap() != r.terms.gap()) return l.terms.gap() < r.terms.gap();
                        return l.p < r.p;
                      });
    std::array<double, 3> step{interval.width() / 10.0, interval.width() / 10.0, 0.1};
    if (const auto* g = std::get_if<GridSampling>(&plan.strategy)) {
      step[0] = interval.width() / static_cast<double>(std::max<std::size_t>(g->nx - 1, 1));
      step[1] = interval.width() / static_cast<double>(std::max<std::size_t>(g->ny - 1, 1));
      step[2] = 1.0 / static_cast<double>(std::max<std::size_t>(g->nt - 1, 1));
    }
    for (std::size_t i = 0; i < starts; ++i) {
      auto [p, terms] = detail::refine_violation(pair, h, phi, interval, plan.t_clamp,
                                                 scored[i].p, step, options.max_iterations);
      report.worst_gap = std::min(report.worst_gap, terms.gap());
      if (p != scored[i].p && is_violation(terms)) {
        report.records.push_back(to_record(p, terms, true));
      }
    }
  }

  std::sort(report.records.begin(), report.records.end(), detail::record_less);
  report.records.erase(std::unique(report.records.begin(), report.records.end(),
                                   [](const ViolationRecord& l, const ViolationRecord& r) {
                                     return l.point() == r.point();
                                   }),
                       report.records.end());
  return report;
}

}  // namespace hhdom
