#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hhdom/error.hpp"
#include "hhdom/geometry.hpp"

namespace hhdom {

struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;

  /// A gap counts as a violation only below -threshold(scale).
  [[nodiscard]] double threshold(double scale) const { return atol + rtol * scale; }
};

struct GridSampling {
  std::size_t nx = 21;
  std::size_t ny = 21;
  std::size_t nt = 19;
};

struct RandomSampling {
  std::size_t count = 10'000;
  std::uint64_t seed = 0;
};

struct SamplePlan {
  std::variant<GridSampling, RandomSampling> strategy = GridSampling{};
  double t_clamp = 1e-6;
  Tolerance tolerance;
  /// Keep every (point, gap) pair in the report, for CSV output.
  bool record_samples = false;

  /// Every violated constraint, empty when the plan is valid.
  [[nodiscard]] std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (const auto* g = std::get_if<GridSampling>(&strategy)) {
      if (g->nx < 1 || g->ny < 1 || g->nt < 1) out.emplace_back("grid counts must be >= 1");
    } else if (std::get<RandomSampling>(strategy).count < 1) {
      out.emplace_back("random sample count must be >= 1");
    }
    if (!(t_clamp > 0.0 && t_clamp < 0.5)) out.emplace_back("t clamp must lie in (0, 0.5)");
    if (!(tolerance.atol >= 0.0)) out.emplace_back("atol must be >= 0");
    if (!(tolerance.rtol >= 0.0)) out.emplace_back("rtol must be >= 0");
    return out;
  }

  void validate() const {
    const auto p = problems();
    if (!p.empty()) throw Error(ErrorKind::invalid_argument, "invalid sample plan: " + p.front());
  }
};

struct Triple {
  double x = 0.0;
  double y = 0.0;
  double t = 0.5;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// n points uniformly spaced over [a, b], endpoints included (n = 1 gives
/// the midpoint).
inline std::vector<double> uniform_nodes(const Interval& iv, std::size_t n) {
  if (n == 1) return {0.5 * (iv.a() + iv.b())};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = iv.a() + iv.width() * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = iv.b();
  return out;
}

/// Chebyshev-Lobatto points on [eps, 1 - eps] plus t = 1/2 exactly; a node
/// within 1e-12 of 1/2 is snapped rather than duplicated.
inline std::vector<double> t_nodes(std::size_t n, double eps) {
  std::vector<double> out;
  out.reserve(n + 1);
  if (n == 1) {
    out.push_back(0.5);
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double c = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    out.push_back(eps + (1.0 - 2.0 * eps) * 0.5 * (1.0 - c));
  }
  out.front() = eps;
  out.back() = 1.0 - eps;
  bool has_half = false;
  for (double& t : out) {
    if (std::fabs(t - 0.5) < 1e-12) {
      t = 0.5;
      has_half = true;
    }
  }
  if (!has_half) out.push_back(0.5);
  std::sort(out.begin(), out.end());
  return out;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// platform for a given engine state.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// The sample triples of a plan in canonical order: lexicographic (x, y, t)
/// for grids, generation order for random plans.
inline std::vector<Triple> sample_triples(const SamplePlan& plan, const Interval& iv) {
  plan.validate();
  std::vector<Triple> out;
  const double eps = plan.t_clamp;
  if (const auto* g = std::get_if<GridSampling>(&plan.strategy)) {
    const auto xs = uniform_nodes(iv, g->nx);
    const auto ys = uniform_nodes(iv, g->ny);
    const auto ts = t_nodes(g->nt, eps);
    out.reserve(xs.size() * ys.size() * ts.size());
    for (double x : xs) {
      for (double y : ys) {
        for (double t : ts) out.push_back({x, y, t});
      }
    }
    return out;
  }
  const auto& r = std::get<RandomSampling>(plan.strategy);
  std::mt19937_64 rng(r.seed);
  out.reserve(r.count);
  for (std::size_t i = 0; i < r.count; ++i) {
    Triple p;
    p.x = std::min(iv.a() + iv.width() * unit_uniform(rng), iv.b());
    p.y = std::min(iv.a() + iv.width() * unit_uniform(rng), iv.b());
    p.t = eps + (1.0 - 2.0 * eps) * unit_uniform(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace hhdom
