#pragma once

// Command-line front end: configuration, validation, dispatch and output.
//
// Exit codes: 0 every verdict holds, 1 a violation or failed bound,
// 2 a configuration or evaluation error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hhdom/convexity.hpp"
#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"
#include "hhdom/geometry.hpp"
#include "hhdom/hadamard.hpp"
#include "hhdom/kernel.hpp"
#include "hhdom/report.hpp"
#include "hhdom/sampling.hpp"
#include "hhdom/search.hpp"

namespace hhdom::cli {

inline constexpr std::string_view kToolName = "hhdom";
inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr int kExitHolds = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitError = 2;

struct RunConfig {
  std::string command;
  std::optional<std::string> f;
  std::optional<std::string> g;
  std::string h = "t";
  std::optional<double> s;
  std::optional<std::string> h_custom;
  std::string phi = "identity";
  std::vector<double> interval{0.0, 1.0};
  std::optional<std::string> sampling;  // grid | random
  std::vector<std::size_t> grid{21, 21, 19};
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
  double t_clamp = 1e-6;
  double atol = 1e-9;
  double rtol = 1e-9;
  double quad_tol = 1e-10;
  std::string format = "json";     // json | csv | text
  std::string bound = "both";      // midpoint | endpoint | both
  std::string which = "all";       // t | ts | recip | one | all
  bool refine = false;
  std::size_t max_records = 100;   // 0 keeps all
};

struct RunResult {
  int exit_code = kExitHolds;
  std::string output;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"check-convex", "check-dominated", "lemma2",
                                              "verify-hh",    "corollary",       "search"};
  return names;
}

namespace detail {

using nlohmann::json;
using report::number;

struct Problem {
  std::string kind;
  std::string message;
};

using AnyMap = std::variant<AffineMap, ExprMap>;

struct Inputs {
  std::optional<Expr> f;
  std::optional<Expr> g;
  std::optional<Kernel> kernel;
  std::optional<Interval> interval;
  std::optional<AnyMap> phi;
  SamplePlan plan;
};

inline bool uses_sampling(const std::string& cmd) {
  return cmd == "check-convex" || cmd == "check-dominated" || cmd == "lemma2" || cmd == "search";
}

inline bool needs_affine(const std::string& cmd) {
  return cmd == "verify-hh" || cmd == "corollary";
}

inline void collect(std::vector<Problem>& problems, const Error& e, const std::string& what) {
  problems.push_back({std::string(to_string(e.kind())), what + ": " + e.what()});
}

inline std::optional<Expr> parse_role(const std::optional<std::string>& src, const char* role,
                                      bool required, std::vector<Problem>& problems) {
  if (!src) {
    if (required) problems.push_back({"config", std::string("--") + role + " is required"});
    return std::nullopt;
  }
  try {
    auto e = parse(*src);
    if (e.variable_name() == 't') {
      problems.push_back({"config", std::string("--") + role + " must be an expression in x"});
      return std::nullopt;
    }
    return e;
  } catch (const Error& e) {
    collect(problems, e, std::string("--") + role);
    return std::nullopt;
  }
}

inline std::optional<KernelKind> kernel_kind(const RunConfig& cfg, std::vector<Problem>& problems) {
  if (cfg.h_custom) {
    try {
      return CustomKernel{parse(*cfg.h_custom)};
    } catch (const Error& e) {
      collect(problems, e, "--h-custom");
      return std::nullopt;
    }
  }
  const std::string& h = cfg.h;
  if (h == "t") return LinearKernel{};
  if (h == "1/t") return ReciprocalKernel{};
  if (h == "1") return OneKernel{};
  if (h == "t^s") {
    if (!cfg.s) {
      problems.push_back({"config", "--h t^s needs --s"});
      return std::nullopt;
    }
    return PowerKernel{*cfg.s};
  }
  if (h.rfind("t^", 0) == 0) {
    double s = 0.0;
    const auto text = std::string_view(h).substr(2);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s);
    if (ec == std::errc() && ptr == text.data() + text.size()) return PowerKernel{s};
  }
  problems.push_back({"config", "unknown --h '" + h +
                                    "' (use t, t^s, 1/t, 1, or --h-custom for expressions)"});
  return std::nullopt;
}

// "identity", or an expression in x. Affinity is detected by a vanishing
// second difference on {a, (a+b)/2, b}.
inline std::optional<AnyMap> make_phi(const RunConfig& cfg, const Interval& iv,
                                      std::vector<Problem>& problems) {
  try {
    if (cfg.phi == "identity") return AnyMap{identity_map(iv)};
    Expr e = parse(cfg.phi);
    if (e.variable_name() == 't') {
      problems.push_back({"config", "--phi must be an expression in x"});
      return std::nullopt;
    }
    const double pa = evaluate(e, iv.a());
    const double pm = evaluate(e, 0.5 * (iv.a() + iv.b()));
    const double pb = evaluate(e, iv.b());
    const double second = pa - 2.0 * pm + pb;
    const double scale = std::max({1.0, std::fabs(pa), std::fabs(pm), std::fabs(pb)});
    if (std::fabs(second) <= 1e-12 * scale) {
      const double alpha = (pb - pa) / iv.width();
      const double beta = pa - alpha * iv.a();
      return AnyMap{make_affine(alpha, beta, iv)};
    }
    if (needs_affine(cfg.command)) {
      problems.push_back({"config", "--phi '" + cfg.phi +
                                        "' is not affine; the Hermite-Hadamard bounds need an "
                                        "affine phi"});
      return std::nullopt;
    }
    return AnyMap{ExprMap(std::move(e), iv)};
  } catch (const Error& e) {
    collect(problems, e, "--phi");
    return std::nullopt;
  }
}

inline SamplePlan make_plan(const RunConfig& cfg, std::vector<Problem>& problems) {
  SamplePlan plan;
  const std::string strategy = cfg.sampling.value_or(cfg.samples ? "random" : "grid");
  if (strategy == "grid") {
    if (cfg.grid.size() != 3) {
      problems.push_back({"config", "--grid takes three counts NX NY NT"});
    } else {
      plan.strategy = GridSampling{cfg.grid[0], cfg.grid[1], cfg.grid[2]};
    }
  } else if (strategy == "random") {
    plan.strategy = RandomSampling{cfg.samples.value_or(10'000), cfg.seed};
  } else {
    problems.push_back({"config", "--sampling must be grid or random"});
  }
  plan.t_clamp = cfg.t_clamp;
  plan.tolerance = Tolerance{cfg.atol, cfg.rtol};
  plan.record_samples = cfg.format == "csv";
  for (auto& p : plan.problems()) problems.push_back({"config", std::move(p)});
  return plan;
}

inline std::vector<Problem> build_inputs(const RunConfig& cfg, Inputs& in) {
  std::vector<Problem> problems;
  const std::string& cmd = cfg.command;
  if (std::find(commands().begin(), commands().end(), cmd) == commands().end()) {
    problems.push_back({"config", "unknown command '" + cmd + "'"});
    return problems;
  }
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "text") {
    problems.push_back({"config", "--format must be json, csv or text"});
  }
  if (cmd == "verify-hh" && cfg.bound != "midpoint" && cfg.bound != "endpoint" &&
      cfg.bound != "both") {
    problems.push_back({"config", "--bound must be midpoint, endpoint or both"});
  }
  if (cmd == "corollary" && cfg.which != "t" && cfg.which != "ts" && cfg.which != "recip" &&
      cfg.which != "one" && cfg.which != "all") {
    problems.push_back({"config", "--which must be t, ts, recip, one or all"});
  }
  if (!(cfg.quad_tol > 0.0)) problems.push_back({"config", "--quad-tol must be > 0"});
  if (cfg.s && !(*cfg.s > 0.0 && *cfg.s < 1.0)) {
    problems.push_back({"config", "--s must lie in (0, 1)"});
  }

  in.f = parse_role(cfg.f, "f", true, problems);
  in.g = parse_role(cfg.g, "g", cmd != "check-convex", problems);

  if (cmd != "corollary") {
    if (auto kind = kernel_kind(cfg, problems)) {
      try {
        in.kernel = make_kernel(std::move(*kind), KernelOptions{cfg.quad_tol});
      } catch (const Error& e) {
        collect(problems, e, "kernel");
      }
    }
  }

  if (cfg.interval.size() != 2) {
    problems.push_back({"config", "--interval takes two numbers A B"});
  } else {
    try {
      in.interval = Interval(cfg.interval[0], cfg.interval[1]);
    } catch (const Error& e) {
      collect(problems, e, "--interval");
    }
  }
  if (in.interval) in.phi = make_phi(cfg, *in.interval, problems);
  in.plan = make_plan(cfg, problems);
  return problems;
}

inline json echo_inputs(const RunConfig& cfg, const Inputs& in) {
  json j;
  j["f"] = in.f ? to_string(*in.f) : "";
  if (in.g) j["g"] = to_string(*in.g);
  if (in.kernel) {
    j["h"] = json{{"description", in.kernel->describe()},
                  {"half_value", number(in.kernel->half_value())},
                  {"midpoint_coefficient", number(in.kernel->midpoint_coefficient())},
                  {"integral", number(in.kernel->integral().value)},
                  {"integral_divergent", in.kernel->integral().divergent}};
  }
  if (in.phi) {
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, AffineMap>) {
            j["phi"] = json{{"kind", "affine"},
                            {"description", m.describe()},
                            {"alpha", number(m.alpha())},
                            {"beta", number(m.beta())}};
          } else {
            j["phi"] = json{{"kind", "expression"}, {"description", m.describe()}};
          }
        },
        *in.phi);
  }
  if (in.interval) j["interval"] = json::array({number(in.interval->a()), number(in.interval->b())});
  if (uses_sampling(cfg.command)) {
    json plan;
    if (const auto* g = std::get_if<GridSampling>(&in.plan.strategy)) {
      plan = json{{"strategy", "grid"}, {"nx", g->nx}, {"ny", g->ny}, {"nt", g->nt}};
    } else {
      const auto& r = std::get<RandomSampling>(in.plan.strategy);
      plan = json{{"strategy", "random"}, {"count", r.count}, {"seed", r.seed}};
    }
    plan["t_clamp"] = number(in.plan.t_clamp);
    j["plan"] = plan;
  }
  j["tolerance"] =
      json{{"atol", number(cfg.atol)}, {"rtol", number(cfg.rtol)}, {"quad_tol", number(cfg.quad_tol)}};
  if (cfg.command == "verify-hh") j["bound"] = cfg.bound;
  if (cfg.command == "corollary") {
    j["which"] = cfg.which;
    j["s"] = number(cfg.s.value_or(0.5));
  }
  if (cfg.command == "search") j["refine"] = cfg.refine;
  return j;
}

struct Outcome {
  int exit_code = kExitHolds;
  json result;
  std::string csv;
};

inline Outcome execute(const RunConfig& cfg, const Inputs& in) {
  Outcome out;
  const std::string& cmd = cfg.command;
  const FunctionPair pair{*in.f, in.g.value_or(Expr::constant(0.0))};

  if (needs_affine(cmd)) {
    const auto& phi = std::get<AffineMap>(*in.phi);
    HHOptions opt;
    opt.tol = cfg.quad_tol;
    opt.tolerance = in.plan.tolerance;
    std::vector<HHReport> reports;
    if (cmd == "verify-hh") {
      if (cfg.bound != "endpoint") reports.push_back(hh_midpoint_report(pair, *in.kernel, phi, opt));
      if (cfg.bound != "midpoint") reports.push_back(hh_endpoint_report(pair, *in.kernel, phi, opt));
    } else {
      const double s = cfg.s.value_or(0.5);
      auto add = [&](CorollaryKind which) {
        for (auto& r : corollary_report(pair, phi, which, s, opt)) reports.push_back(std::move(r));
      };
      if (cfg.which == "t" || cfg.which == "all") add(CorollaryKind::linear);
      if (cfg.which == "ts" || cfg.which == "all") add(CorollaryKind::power);
      if (cfg.which == "recip" || cfg.which == "all") add(CorollaryKind::reciprocal);
      if (cfg.which == "one" || cfg.which == "all") add(CorollaryKind::one);
    }
    json list = json::array();
    bool all_hold = true;
    for (const auto& r : reports) {
      list.push_back(report::to_json(r));
      all_hold = all_hold && r.holds;
    }
    out.result = json{{"reports", std::move(list)}, {"all_hold", all_hold}};
    out.csv = report::csv(reports);
    out.exit_code = all_hold ? kExitHolds : kExitViolated;
    return out;
  }

  std::visit(
      [&](const auto& phi) {
        const Interval& iv = *in.interval;
        if (cmd == "check-convex") {
          const auto r = check_phi_h_convex(pair.f, *in.kernel, phi, iv, in.plan);
          out.result = json{{"check", report::to_json(r)}};
          out.csv = report::csv(r);
          out.exit_code = r.holds() ? kExitHolds : kExitViolated;
        } else if (cmd == "check-dominated") {
          SamplePlan quiet = in.plan;
          quiet.record_samples = false;
          const auto gr = check_phi_h_convex(pair.g, *in.kernel, phi, iv, quiet, "g");
          const auto r = check_dominated(pair, *in.kernel, phi, iv, in.plan);
          out.result = json{{"dominance", report::to_json(r)}, {"dominator", report::to_json(gr)}};
          out.csv = report::csv(r);
          out.exit_code = r.holds() ? kExitHolds : kExitViolated;
        } else if (cmd == "lemma2") {
          const auto r = lemma2_report(pair, *in.kernel, phi, iv, in.plan);
          out.result = report::to_json(r);
          out.csv = report::csv(r);
          const bool ok = r.statement1() && r.statement2() && r.statement3() && r.agreement();
          out.exit_code = ok ? kExitHolds : kExitViolated;
        } else {
          const auto r = search_violations(pair, *in.kernel, phi, iv, in.plan,
                                           SearchOptions{cfg.refine});
          out.result = report::to_json(r, cfg.max_records);
          out.csv = report::csv(r);
          out.exit_code = r.records.empty() ? kExitHolds : kExitViolated;
        }
      },
      *in.phi);
  return out;
}

inline json envelope(const std::string& command, int exit_code) {
  return json{{"tool", std::string(kToolName)},
              {"version", std::string(kVersion)},
              {"command", command},
              {"status", exit_code == kExitError ? "error" : "ok"},
              {"exit_code", exit_code}};
}

inline RunResult render_errors(const std::string& command, const std::string& format,
                               const std::vector<Problem>& problems) {
  json j = envelope(command, kExitError);
  json errors = json::array();
  for (const auto& p : problems) errors.push_back(json{{"kind", p.kind}, {"message", p.message}});
  j["errors"] = errors;
  if (format == "json") return RunResult{kExitError, j.dump(2) + "\n"};
  std::string text;
  for (const auto& p : problems) text += "error[" + p.kind + "]: " + p.message + "\n";
  return RunResult{kExitError, text};
}

}  // namespace detail

/// Validates the configuration (reporting every problem found), runs the
/// subcommand and serializes its report.
inline RunResult run(const RunConfig& cfg) {
  detail::Inputs in;
  const auto problems = detail::build_inputs(cfg, in);
  if (!problems.empty()) return detail::render_errors(cfg.command, cfg.format, problems);
  detail::Outcome outcome;
  try {
    outcome = detail::execute(cfg, in);
  } catch (const Error& e) {
    return detail::render_errors(cfg.command, cfg.format,
                                 {{std::string(to_string(e.kind())), e.what()}});
  }
  auto j = detail::envelope(cfg.command, outcome.exit_code);
  j["inputs"] = detail::echo_inputs(cfg, in);
  j["result"] = std::move(outcome.result);
  if (cfg.format == "csv") return RunResult{outcome.exit_code, outcome.csv};
  if (cfg.format == "text") return RunResult{outcome.exit_code, report::text(j)};
  return RunResult{outcome.exit_code, j.dump(2) + "\n"};
}

namespace detail {

/// Reads a key = value file into "--key=value" tokens. Blank lines and
/// lines starting with '#' are skipped; surrounding quotes are stripped.
/// `interval` and `grid` take whitespace-separated lists.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    if (key == "interval" || key == "grid") {
      tokens.push_back("--" + key);
      std::istringstream parts(value);
      std::string part;
      while (parts >> part) tokens.push_back(part);
    } else {
      tokens.push_back("--" + key + "=" + value);
    }
  }
  return tokens;
}

inline void add_options(CLI::App& sub, RunConfig& cfg, const std::string& name) {
  sub.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub.add_option("--f", cfg.f, "candidate function f(x)");
  if (name != "check-convex") sub.add_option("--g", cfg.g, "dominating function g(x)");
  if (name != "corollary") {
    sub.add_option("--h", cfg.h, "kernel: t | t^s | 1/t | 1")->capture_default_str();
    sub.add_option("--h-custom", cfg.h_custom, "custom kernel, an expression in t");
  }
  sub.add_option("--s", cfg.s, "exponent s in (0,1) for the t^s kernel");
  sub.add_option("--phi", cfg.phi, "identity, or an expression in x")->capture_default_str();
  sub.add_option("--interval", cfg.interval, "interval endpoints A B")->expected(2);
  if (uses_sampling(name)) {
    sub.add_option("--sampling", cfg.sampling, "grid or random");
    sub.add_option("--grid", cfg.grid, "grid counts NX NY NT")->expected(3);
    sub.add_option("--samples", cfg.samples, "random sample count (implies random sampling)");
    sub.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub.add_option("--t-clamp", cfg.t_clamp, "t is sampled in [eps, 1-eps]")->capture_default_str();
  }
  sub.add_option("--atol", cfg.atol, "absolute violation tolerance")->capture_default_str();
  sub.add_option("--rtol", cfg.rtol, "relative violation tolerance")->capture_default_str();
  sub.add_option("--quad-tol", cfg.quad_tol, "quadrature tolerance")->capture_default_str();
  sub.add_option("--format", cfg.format, "json | csv | text")->capture_default_str();
  sub.add_option("--config", "key = value file mirroring the flags");
  if (name == "verify-hh") {
    sub.add_option("--bound", cfg.bound, "midpoint | endpoint | both")->capture_default_str();
  }
  if (name == "corollary") {
    sub.add_option("--which,--corollary", cfg.which, "t | ts | recip | one | all")
        ->capture_default_str();
  }
  if (name == "search") {
    sub.add_flag("--refine", cfg.refine, "refine the worst samples by coordinate descent");
    sub.add_option("--max-records", cfg.max_records, "records kept in JSON output (0 = all)")
        ->capture_default_str();
  }
}

}  // namespace detail

/// Full CLI entry point; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string format = "json";
  std::string command = args.empty() ? "" : args.front();

  // Config-file tokens go right after the subcommand so that explicit
  // flags, which come later, take precedence.
  std::vector<std::string> tokens;
  try {
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
      if (args[i] == "--format" && i + 1 < args.size()) format = args[i + 1];
      if (args[i].rfind("--format=", 0) == 0) format = args[i].substr(9);
    }
    if (!args.empty()) tokens.push_back(args.front());
    if (config_path) {
      for (auto& t : detail::config_tokens(*config_path)) tokens.push_back(std::move(t));
    }
    for (std::size_t i = 1; i < args.size(); ++i) tokens.push_back(args[i]);
  } catch (const Error& e) {
    out << detail::render_errors(command, format, {{std::string(to_string(e.kind())), e.what()}})
               .output;
    return kExitError;
  }

  RunConfig cfg;
  CLI::App app{"Numerical certification of (g, phi_h)-convex dominance and "
               "Hermite-Hadamard-type bounds",
               std::string(kToolName)};
  // "-h" would collide with the kernel flag "--h".
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"check-convex", "sampled phi_h-convexity check of f"},
      {"check-dominated", "sampled (g, phi_h)-dominance check of f"},
      {"lemma2", "evaluate the three equivalent characterizations of dominance"},
      {"verify-hh", "both sides of the Hermite-Hadamard-type bounds"},
      {"corollary", "the bounds for the built-in kernel families"},
      {"search", "search for counterexamples to dominance"},
  };
  for (const auto& [name, desc] : descriptions) {
    auto* sub = app.add_subcommand(name, desc);
    detail::add_options(*sub, cfg, name);
    sub->callback([&cfg, name = name] { cfg.command = name; });
  }

  std::vector<const char*> cargv{argv[0]};
  for (const auto& t : tokens) cargv.push_back(t.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    out << detail::render_errors(command, format, {{"config", e.what()}}).output;
    return kExitError;
  }

  const auto result = run(cfg);
  out << result.output;
  return result.exit_code;
}

}  // namespace hhdom::cli
