#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

/// Cell centers where `values` <= 0.
inline std::vector<double> sublevel_centers(const Field& f) {
  std::vector<double> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] <= 0.0) out.push_back(f.grid.center(i));
  return out;
}

/**
 * @brief Hausdorff distance between two finite point sets on a line.
 *
 * Both empty gives 0, exactly one empty gives infinity. Inputs must be sorted.
 */
inline double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto one_way = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      const auto it = std::lower_bound(to.begin(), to.end(), x);
      double d = std::numeric_limits<double>::infinity();
      if (it != to.end()) d = *it - x;
      if (it != to.begin()) d = std::min(d, x - *(it - 1));
      worst = std::max(worst, d);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

struct ConvergenceOptions {
  BoundaryConditions pme_bc = pme_dirichlet(0.0);
  std::optional<BoundaryConditions> limit_bc;  ///< empty: vacuum far field u = nu
  Scheme scheme = Scheme::semi_implicit;
  double pme_dt = 0.0;    ///< <= 0: solver default
  double limit_dt = 0.0;  ///< <= 0: limit_default_dt
  double skip_factor = 4.0;  ///< startup window t_skip = skip_factor / m
};

struct ConvergenceReport {
  std::vector<double> m_values;
  std::vector<double> times;
  std::vector<double> t_skip;
  /// sup over snapshots t >= t_skip of sup_x |rho_m - (1 - b(u)/nu)|
  std::vector<double> errors;
  /// per m and snapshot: Hausdorff distance between {u_m <= 0} and {u <= 0}
  std::vector<std::vector<double>> hausdorff;
  /// max of hausdorff over the snapshots past every t_skip, so all m share one window
  std::vector<double> hausdorff_max;
  /// half-cell quantization of the discrete sublevel sets
  double quantization = 0.0;

  bool errors_strictly_decreasing() const {
    for (std::size_t i = 1; i < errors.size(); ++i)
      if (!(errors[i] < errors[i - 1])) return false;
    return true;
  }
  bool hausdorff_nonincreasing() const {
    for (std::size_t i = 1; i < hausdorff_max.size(); ++i)
      if (!(hausdorff_max[i] <= hausdorff_max[i - 1])) return false;
    return true;
  }
};

/**
 * @brief Compare the m-dependent solutions with the limit solution at shared snapshots.
 *
 * Each m runs from prepare_initial_density(rho0); the limit problem runs
 * once from project_initial_data(rho0). Runs for different m are
 * independent and execute concurrently.
 */
inline ConvergenceReport convergence_study(const Field& rho0, const ModelParams& base, const std::vector<double>& m_values,
                                           const StepControl& control, const ConvergenceOptions& options = {}) {
  if (m_values.size() < 2) throw InvalidParameter("convergence study needs >= 2 values of m");
  for (std::size_t i = 1; i < m_values.size(); ++i)
    if (!(m_values[i] > m_values[i - 1])) throw InvalidParameter("m values must be increasing");
  control.validate();
  if (control.snapshot_times.empty()) throw InvalidParameter("convergence study needs snapshot times");
  if (control.snapshot_times.back() < options.skip_factor / m_values.front())
    throw InvalidParameter("last snapshot lies inside the startup window of the smallest m");

  const LimitState limit0 = project_initial_data(rho0, base, options.limit_bc.value_or(limit_far_field(base.nu)));
  StepControl limit_control = control;
  limit_control.dt = options.limit_dt;
  auto limit_job = std::async(std::launch::async, [&] { return limit_run(limit0, limit_control); });

  std::vector<std::future<std::vector<PmeState>>> jobs;
  for (double m : m_values) {
    jobs.push_back(std::async(std::launch::async, [&, m] {
      ModelParams p = base;
      p.m = m;
      PmeState s{prepare_initial_density(rho0, p), p, options.pme_bc};
      StepControl c = control;
      c.dt = options.pme_dt;
      c.scheme = options.scheme;
      return pme_run(s, c);
    }));
  }
  const LimitRunResult limit = limit_job.get();

  ConvergenceReport rep;
  rep.m_values = m_values;
  rep.times = control.snapshot_times;
  rep.quantization = 0.5 * rho0.grid.dx();
  std::vector<std::vector<double>> limit_sets;
  std::vector<Field> limit_density;
  for (const auto& s : limit.snapshots) {
    limit_sets.push_back(sublevel_centers(s.u));
    limit_density.push_back(s.density());
  }
  const double common_skip = options.skip_factor / m_values.front();
  for (std::size_t j = 0; j < m_values.size(); ++j) {
    const auto runs = jobs[j].get();
    const double m = m_values[j];
    const double skip = options.skip_factor / m;
    rep.t_skip.push_back(skip);
    double err = 0.0, hmax = 0.0;
    std::vector<double> hd;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto u_m = runs[k].u();
      const double h = hausdorff_distance(sublevel_centers(u_m), limit_sets[k]);
      hd.push_back(h);
      if (rep.times[k] >= common_skip) hmax = std::max(hmax, h);
      if (rep.times[k] >= skip) err = std::max(err, sup_distance(runs[k].rho.values, limit_density[k].values));
    }
    rep.errors.push_back(err);
    rep.hausdorff.push_back(std::move(hd));
    rep.hausdorff_max.push_back(hmax);
  }
  return rep;
}

}  // namespace spl
