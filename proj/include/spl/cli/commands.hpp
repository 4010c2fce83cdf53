#pragma once

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "spl/barriers/bundle.hpp"
#include "spl/barriers/profiles.hpp"
#include "spl/diagnostics/comparison.hpp"
#include "spl/diagnostics/convergence.hpp"
#include "spl/diagnostics/lemmas.hpp"
#include "spl/io/config.hpp"
#include "spl/io/csv.hpp"
#include "spl/io/presets.hpp"
#include "spl/io/svg.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl::cli {

/// Where a command writes and how it reports.
struct Context {
  RunConfig config;
  std::string out_dir;
  std::ostream* log = nullptr;

  std::string path(const std::string& name) const { return (std::filesystem::path(out_dir) / name).string(); }
  void say(const std::string& line) const {
    if (log) *log << line << '\n';
  }
};

inline Context make_context(RunConfig config, const std::string& out_override, std::ostream& log) {
  Context ctx{std::move(config), {}, &log};
  ctx.out_dir = out_override.empty() ? ctx.config.output.directory : out_override;
  std::filesystem::create_directories(ctx.out_dir);
  return ctx;
}

namespace detail {

inline StepControl step_control(const RunConfig& c) {
  StepControl s;
  s.dt = c.stepping.dt;
  s.t_end = c.stepping.t_end;
  s.snapshot_times = c.stepping.snapshot_times;
  s.scheme = c.stepping.scheme;
  return s;
}

inline PlotStyle plot_style(const RunConfig& c) {
  PlotStyle s;
  s.width = c.output.width;
  s.height = c.output.height;
  return s;
}

inline std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Runs the m-dependent solver and writes one snapshot per requested time.
inline int simulate_pme(const Context& ctx) {
  const auto& c = ctx.config;
  const PmeState s0 = initial_pme_state(c);
  const auto snaps = pme_run(s0, detail::step_control(c));
  for (const auto& s : snaps) {
    const std::string stem = "snapshot_t" + time_tag(s.time());
    if (c.output.csv) write_text_file(ctx.path(stem + ".csv"), snapshot_csv(s));
    if (c.output.svg)
      write_text_file(ctx.path(stem + ".svg"), twin_axis_svg(s.rho.grid.centers(), s.rho.values, s.pressure().values,
                                                             "t = " + time_tag(s.time()), detail::plot_style(c)));
    ctx.say("t = " + time_tag(s.time()) + ": max rho = " + detail::num(sup_norm(s.rho.values)) +
            ", max p = " + detail::num(sup_norm(s.pressure().values)));
  }
  return 0;
}

/// Runs the limit solver; writes snapshots and the free-boundary history.
inline int simulate_limit(const Context& ctx) {
  const auto& c = ctx.config;
  const LimitState s0 = initial_limit_state(c);
  StepControl sc = detail::step_control(c);
  const auto run = limit_run(s0, sc);
  for (const auto& s : run.snapshots) {
    const std::string stem = "snapshot_t" + time_tag(s.time());
    if (c.output.csv) write_text_file(ctx.path(stem + ".csv"), snapshot_csv(s));
    if (c.output.svg)
      write_text_file(ctx.path(stem + ".svg"), twin_axis_svg(s.u.grid.centers(), s.density().values, s.pressure().values,
                                                             "t = " + time_tag(s.time()), detail::plot_style(c)));
  }
  if (c.output.csv) write_text_file(ctx.path("free_boundary.csv"), free_boundary_csv(run.boundaries));
  for (const auto& fb : run.boundaries)
    ctx.say("t = " + time_tag(fb.time) + ": " + std::to_string(fb.count()) + " free-boundary points");
  return 0;
}

/// Compares the m-dependent runs with the limit run; passes when errors and Hausdorff distances decrease.
inline int converge(const Context& ctx) {
  const auto& c = ctx.config;
  ConvergenceOptions o;
  o.pme_bc = pme_boundary(c);
  o.limit_bc = limit_boundary(c);
  o.scheme = c.stepping.scheme == Scheme::automatic ? Scheme::semi_implicit : c.stepping.scheme;
  o.pme_dt = c.converge.pme_dt;
  o.limit_dt = c.converge.limit_dt;
  o.skip_factor = c.converge.skip_factor;
  StepControl sc = detail::step_control(c);
  const auto rep = convergence_study(initial_density(c), c.model, c.converge.m_values, sc, o);
  if (c.output.csv) {
    write_text_file(ctx.path("convergence.csv"), convergence_csv(rep));
    write_text_file(ctx.path("convergence_hausdorff.csv"), convergence_hausdorff_csv(rep));
  }
  for (std::size_t j = 0; j < rep.m_values.size(); ++j)
    ctx.say("m = " + detail::num(rep.m_values[j]) + ": error " + detail::num(rep.errors[j]) + ", Hausdorff " +
            detail::num(rep.hausdorff_max[j]));
  const bool dec = rep.errors_strictly_decreasing();
  const bool half = rep.errors.back() < 0.5 * rep.errors.front();
  const bool haus = rep.hausdorff_nonincreasing();
  ctx.say(detail::verdict(dec) + " errors strictly decreasing in m");
  ctx.say(detail::verdict(half) + " last error below half of the first");
  ctx.say(detail::verdict(haus) + " Hausdorff distance nonincreasing in m");
  return dec && half && haus ? 0 : 1;
}

/// Builds the configured barrier bundle, with a searched or fixed A0, and verifies it.
inline int barrier_check(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& bc = c.barrier;
  const RadialProfilePair pair = make_profile_pair(bc.pair(c.model));
  const BarrierKind found_kind = pair.kind();
  if (found_kind != bc.kind)
    throw InvalidParameter(std::string("profile pair orders as ") + to_string(found_kind) + ", requested " + to_string(bc.kind));
  BarrierBundle bundle;
  BarrierReport rep;
  if (bc.A0) {
    bundle = build_barrier(pair, bc.m, *bc.A0, bc.kind);
    rep = verify_barrier(bundle, pair, bc.tolerance, bc.required_fraction);
  } else {
    auto search = search_barrier_constant(pair, bc.m, bc.kind, bc.tolerance, bc.required_fraction);
    bundle = std::move(search.bundle);
    rep = search.report;
  }
  if (c.output.csv) write_text_file(ctx.path("barrier_report.csv"), barrier_csv(bundle, rep));
  ctx.say(std::string(to_string(bc.kind)) + " bundle, m = " + detail::num(bc.m) + ", A0 = " + detail::num(bundle.A0));
  ctx.say("inner phase: " + detail::num(100.0 * rep.inner.fraction()) + "% of " + std::to_string(rep.inner.checked) +
          " cells, worst margin " + detail::num(rep.inner.worst_margin));
  ctx.say("outer phase: " + detail::num(100.0 * rep.outer.fraction()) + "% of " + std::to_string(rep.outer.checked) +
          " cells, worst margin " + detail::num(rep.outer.worst_margin));
  ctx.say("min interface gradient gap: " + detail::num(rep.min_gap));
  ctx.say(detail::verdict(rep.passed) + " barrier verification");
  return rep.passed ? 0 : 1;
}

/// Runs the configured lemma checks at their desk-scale scenarios.
inline std::vector<LemmaCheckResult> run_lemma_checks(const RunConfig& c) {
  const auto& L = c.lemma;
  std::vector<LemmaCheckResult> out;
  for (const auto& name : L.checks) {
    if (name == "pressure-bound") out.push_back(pressure_bound_check(c.model, L.pressure_m_values));
    else if (name == "nucleation") out.push_back(nucleation_timing_check(L.eps_values, L.held_out_eps, c.model));
    else if (name == "shrink") out.push_back(shrink_speed_check(L.shrink_radii, c.model));
    else if (name == "expansion") out.push_back(expansion_bound_check(L.expansion_radii, c.model));
    else if (name == "initial-motion") out.push_back(initial_motion_check(c.model, L.motion_times));
    else if (name == "comparison") out.push_back(comparison_check(L.trials, L.seed, c.model));
  }
  return out;
}

inline int lemma_check(const Context& ctx) {
  const auto results = run_lemma_checks(ctx.config);
  if (ctx.config.output.csv) {
    write_text_file(ctx.path("lemma_report.csv"), lemma_csv(results));
    write_text_file(ctx.path("lemma_constants.csv"), lemma_constants_csv(results));
  }
  bool ok = true;
  for (const auto& r : results) {
    std::string line = std::string(to_string(r.status)) + " " + r.lemma_id;
    for (const auto& [k, v] : r.fitted) line += " " + k + "=" + detail::num(v);
    ctx.say(line);
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

/// Dispatches a subcommand by name.
inline int run_command(const std::string& name, const Context& ctx) {
  if (name == "simulate-pme") return simulate_pme(ctx);
  if (name == "simulate-limit") return simulate_limit(ctx);
  if (name == "converge") return converge(ctx);
  if (name == "barrier-check") return barrier_check(ctx);
  if (name == "lemma-check") return lemma_check(ctx);
  throw InvalidParameter("unknown command " + name);
}

}  // namespace spl::cli
