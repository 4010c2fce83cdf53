#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spl/cli/commands.hpp"

using namespace spl;
namespace fs = std::filesystem;

namespace {

const std::string source_dir = SPL_SOURCE_DIR;

std::string config_path(const std::string& name) { return source_dir + "/configs/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spl_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// Outcome of one criterion: verdict plus a one-line summary of what was measured.
struct Outcome {
  bool passed = false;
  std::string summary;
};

ModelParams desk_model(double m = 20.0, double p_M = 1.0) {
  ModelParams p;
  p.m = m;
  p.nu = 0.5;
  p.growth = GrowthLaw::affine(1.0, p_M);
  p.M0 = p_M;
  return p;
}

Outcome elliptic_oracle() {
  const double g0 = 1.0, p_M = 1.0, k = std::sqrt(g0 / p_M);
  auto sup_error = [&](std::size_t n) {
    const Grid g = Grid::cartesian(-1.0, 1.0, n);
    const Field w = solve_semilinear(g, BoundaryConditions::both(Boundary::dirichlet(0.0)), GrowthLaw::affine(g0, p_M));
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.center(i);
      e = std::max(e, std::abs(w[i] - p_M * (1.0 - std::cosh(k * x) / std::cosh(k))));
    }
    return e;
  };
  const double e1 = sup_error(400), e2 = sup_error(800), e3 = sup_error(1600);
  const double q1 = std::log2(e1 / e2), q2 = std::log2(e2 / e3);
  return {e1 <= 1e-3 && q1 >= 1.9 && q2 >= 1.9,
          "sup error at N=400 " + fmt("%.3e", e1) + ", orders " + fmt("%.3f", q1) + " and " + fmt("%.3f", q2)};
}

Outcome mass_conservation() {
  ModelParams p = desk_model();
  p.growth = GrowthLaw::zero();
  const Grid g = Grid::cartesian(-2.0, 2.0, 400);
  const Field rho0 = Field::sample(g, [](double x) {
    return std::min(1.0, 0.8 * (std::exp(-(x - 0.5) * (x - 0.5) / 0.08) + std::exp(-(x + 0.5) * (x + 0.5) / 0.08)));
  });
  const double mass0 = rho0.integral();
  PmeStepper stepper(g, pme_zero_flux());
  PmeState ex{rho0, p, pme_zero_flux()}, si{rho0, p, pme_zero_flux()};
  for (int k = 0; k < 1000; ++k) {
    ex = stepper.auto_explicit_step(ex, 1.0);
    si = stepper.step(si, 1e-3, Scheme::semi_implicit);
  }
  const double d_ex = std::abs(ex.rho.integral() - mass0), d_si = std::abs(si.rho.integral() - mass0);
  return {d_ex <= 1e-10 && d_si <= 1e-10,
          "mass drift explicit " + fmt("%.2e", d_ex) + ", semi-implicit " + fmt("%.2e", d_si) + " over 1000 steps"};
}

Outcome pressure_bound() {
  const auto res = pressure_bound_check(desk_model(), {40, 80});
  std::string s = "t_relax";
  for (const auto& d : res.details)
    if (d.label == "t_relax") s += " m=" + fmt("%g", d.parameter) + ":" + fmt("%.4g", d.measured);
  for (const auto& d : res.details)
    if (d.label == "t_relax_ratio") s += ", ratio " + fmt("%.3f", d.measured);
  return {res.passed(), s};
}

Outcome uniform_nucleation() {
  const double c = 0.25, dt = 1e-4;
  const ModelParams p = desk_model();
  const double t_star = std::log(p.nu / (p.nu - c)) / p.growth(0.0);
  LimitState s{Field(Grid::cartesian(0.0, 1.0, 16)), p, limit_zero_flux()};
  std::fill(s.u.values.begin(), s.u.values.end(), c);
  const LimitStepper stepper(s.u.grid, s.bc);
  while (s.u[0] >= 0.0 && s.time() < 2.0 * t_star) s = stepper.step(s, dt);
  const double hit = s.time();
  s = stepper.step(s, dt);
  double landing = 0.0;
  for (double v : s.u.values) landing = std::max(landing, std::abs(v + p.growth.p_M()));
  const bool ok = std::abs(hit - t_star) <= 2.0 * dt && landing <= 1e-6;
  return {ok, "hit " + fmt("%.5f", hit) + " vs t* " + fmt("%.5f", t_star) + ", |u + p_M| next step " + fmt("%.2e", landing)};
}

Outcome convergence() {
  const RunConfig c = load_config(config_path("radial_tumor.cfg"));
  ConvergenceOptions o;
  o.pme_bc = pme_boundary(c);
  o.limit_bc = limit_boundary(c);
  o.scheme = Scheme::semi_implicit;
  o.pme_dt = c.converge.pme_dt;
  o.limit_dt = c.converge.limit_dt;
  o.skip_factor = c.converge.skip_factor;
  StepControl sc;
  sc.dt = c.stepping.dt;
  sc.t_end = c.stepping.t_end;
  sc.snapshot_times = c.stepping.snapshot_times;
  const auto rep = convergence_study(initial_density(c), c.model, c.converge.m_values, sc, o);
  bool haus_dec = true;
  for (std::size_t j = 1; j < rep.hausdorff_max.size(); ++j) haus_dec = haus_dec && rep.hausdorff_max[j] < rep.hausdorff_max[j - 1];
  std::string s = "errors";
  for (double e : rep.errors) s += " " + fmt("%.4g", e);
  s += "; Hausdorff";
  for (double h : rep.hausdorff_max) s += " " + fmt("%.4g", h);
  const bool ok = rep.errors_strictly_decreasing() && rep.errors.back() < 0.5 * rep.errors.front() && haus_dec;
  return {ok, s};
}

Outcome two_bump_pressure_onset() {
  const RunConfig c = load_config(config_path("two_bump.cfg"));
  const double p_M = c.model.growth.p_M();
  const fs::path out = scratch("two_bump");
  std::ostringstream log;
  cli::simulate_pme(cli::make_context(c, out.string(), log));
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(out)) svgs += e.path().extension() == ".svg";

  // Dense snapshots to locate the first time the center saturates.
  StepControl sc;
  sc.dt = c.stepping.dt;
  sc.scheme = c.stepping.scheme;
  sc.t_end = 2.0;
  for (int k = 1; k <= 2000; ++k) sc.snapshot_times.push_back(k * 1e-3);
  const auto snaps = pme_run(initial_pme_state(c), sc);
  const std::size_t mid = c.grid.n_cells / 2;
  auto center = [&](const std::vector<double>& v) { return 0.5 * (v[mid - 1] + v[mid]); };
  std::size_t first = snaps.size();
  for (std::size_t k = 0; k < snaps.size(); ++k)
    if (center(snaps[k].rho.values) > 0.99) {
      first = k;
      break;
    }
  if (first == snaps.size()) return {false, "center density never exceeded 0.99 before t = 2"};
  const double t_sat = snaps[first].time();
  const double p_sat = center(snaps[first].pressure().values);
  // Evaluate at the end of the window so the matched profile sees a developed saturated set.
  std::size_t late = first;
  while (late + 1 < snaps.size() && snaps[late + 1].time() <= t_sat + 0.05 + 1e-12) ++late;
  const auto& s = snaps[late];
  const auto w = elliptic_pressure_on(s.rho.grid, c.model.growth, [&](std::size_t i) { return s.rho[i] >= 0.99; });
  const double w_center = center(w), p_center = center(s.pressure().values);
  const bool ok = p_sat < 0.2 * p_M && late > first && p_center > 0.5 * w_center && svgs == 4;
  return {ok, "center saturates at t=" + fmt("%.3f", t_sat) + " with p=" + fmt("%.3f", p_sat) + " (< " + fmt("%g", 0.2 * p_M) +
                  "); at t=" + fmt("%.3f", s.time()) + ": p=" + fmt("%.3f", p_center) + " vs elliptic " + fmt("%.4f", w_center) + "; " +
                  std::to_string(svgs) + " SVGs"};
}

Outcome barrier_certification() {
  const RunConfig c = load_config(config_path("barrier_sub.cfg"));
  const auto& bc = c.barrier;
  const RadialProfilePair pair = make_profile_pair(bc.pair(c.model));
  const auto search = search_barrier_constant(pair, bc.m, bc.kind, bc.tolerance, bc.required_fraction);
  BarrierBundle zero = build_barrier(pair, bc.m, 0.0, bc.kind);
  const auto control = verify_barrier(zero, pair, bc.tolerance, bc.required_fraction);
  const auto& r = search.report;
  const bool ok = r.passed && r.inner.fraction() >= 0.99 && r.outer.fraction() >= 0.99 && r.min_gap > 0.0 && !control.passed;
  return {ok, "m=100 A0=" + fmt("%g", search.bundle.A0) + ": inner " + fmt("%.1f", 100 * r.inner.fraction()) + "%, outer " +
                  fmt("%.1f", 100 * r.outer.fraction()) + "%, gap " + fmt("%.3f", r.min_gap) + "; A0=0 control " +
                  (control.passed ? "passed" : "failed")};
}

Outcome comparison_suite() {
  const auto res = comparison_check(20, 1, desk_model());
  double worst = -INFINITY;
  std::size_t violations = 0, pairs = 0;
  for (const auto& d : res.details) {
    if (d.label != "pme_density_excess" && d.label != "limit_u_excess") continue;
    ++pairs;
    worst = std::max(worst, d.measured);
    violations += !d.ok;
  }
  return {res.passed() && pairs == 40 && violations == 0,
          std::to_string(pairs) + " seeded pairs, " + std::to_string(violations) + " violations, worst excess " +
              fmt("%.2e", worst)};
}

Outcome lemma_scaling() {
  const RunConfig c = load_config(config_path("lemmas.cfg"));
  const auto& L = c.lemma;
  const std::vector<LemmaCheckResult> results{nucleation_timing_check(L.eps_values, L.held_out_eps, c.model),
                                              shrink_speed_check(L.shrink_radii, c.model),
                                              expansion_bound_check(L.expansion_radii, c.model),
                                              initial_motion_check(c.model, L.motion_times)};
  bool ok = true;
  std::string s;
  for (const auto& r : results) {
    ok = ok && r.passed();
    if (!s.empty()) s += ", ";
    s += r.lemma_id + " " + to_string(r.status);
    if (r.lemma_id.find("shrink") != std::string::npos && !r.passed()) {
      s += " (";
      bool first = true;
      for (const auto& d : r.details) {
        if (d.label != "negative_until") continue;
        s += (first ? "" : " ") + std::string("r=") + fmt("%g", d.parameter) + ":" + fmt("%.3g", d.measured) + "/" +
             fmt("%.3g", d.bound);
        first = false;
      }
      s += ")";
    }
  }
  return {ok, s};
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  struct Job {
    std::string command, config;
    std::function<void(RunConfig&)> adjust;
  };
  const std::vector<Job> jobs{
      {"simulate-pme", "two_bump.cfg",
       [](RunConfig& c) {
         c.stepping.t_end = 0.5;
         c.stepping.snapshot_times = {0.25, 0.5};
       }},
      {"simulate-limit", "merging.cfg", nullptr},
      {"converge", "radial_tumor.cfg", nullptr},
      {"barrier-check", "barrier_sub.cfg", nullptr},
      {"lemma-check", "lemmas.cfg", [](RunConfig& c) { c.lemma.checks = {"comparison", "nucleation", "initial-motion"}; }},
  };
  std::size_t files = 0;
  std::string differing;
  for (const auto& job : jobs) {
    std::map<std::string, std::string> runs[2];
    for (int k = 0; k < 2; ++k) {
      RunConfig c = load_config(config_path(job.config));
      if (job.adjust) job.adjust(c);
      const fs::path out = scratch("determinism_" + job.command + "_" + std::to_string(k));
      std::ostringstream log;
      cli::run_command(job.command, cli::make_context(c, out.string(), log));
      runs[k] = csv_files(out);
    }
    files += runs[0].size();
    if (runs[0] != runs[1] || runs[0].empty()) differing += " " + job.command;
  }
  return {differing.empty(), std::to_string(files) + " CSV files compared across 5 commands" +
                                 (differing.empty() ? ", all byte-identical" : "; differing:" + differing)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_seconds;  ///< 0: no runtime limit
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "elliptic oracle", 1.0, elliptic_oracle},
      {2, "mass conservation", 5.0, mass_conservation},
      {3, "pressure bound", 30.0, pressure_bound},
      {4, "uniform nucleation oracle", 5.0, uniform_nucleation},
      {5, "convergence in m", 120.0, convergence},
      {6, "two-bump pressure onset", 20.0, two_bump_pressure_onset},
      {7, "barrier certification", 30.0, barrier_certification},
      {8, "comparison suite", 60.0, comparison_suite},
      {9, "lemma scaling", 90.0, lemma_scaling},
      {10, "determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs < c.budget_seconds;
    const bool ok = o.passed && in_time;
    failures += !ok;
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_seconds > 0.0) timing += fmt(" of %g s", c.budget_seconds);
    std::printf("criterion %d: %s %s: %s [%s]\n", c.id, ok ? "PASS" : "FAIL", c.name.c_str(), o.summary.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
