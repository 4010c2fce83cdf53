#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/io/config.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

/**
 * @brief Reads `x,rho` rows (one per cell, in grid order) from a CSV file.
 *
 * Lines starting with `#` and a header row are skipped. Each x must match
 * the corresponding cell center to within 1e-6 dx.
 */
inline Field read_density_csv(const std::string& path, const Grid& grid) {
  std::ifstream f(path);
  if (!f) throw InvalidData("cannot open initial data file " + path);
  Field out(grid);
  std::string line;
  std::size_t i = 0, row = 0;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string xs, rs;
    if (!std::getline(ss, xs, ',') || !std::getline(ss, rs, ','))
      throw InvalidData(path + ":" + std::to_string(row) + ": expected 'x,rho'");
    if (i >= grid.size()) throw InvalidData(path + ": more rows than grid cells");
    const double x = std::stod(xs), r = std::stod(rs);
    if (std::abs(x - grid.center(i)) > 1e-6 * grid.dx())
      throw InvalidData(path + ":" + std::to_string(row) + ": x does not match cell center");
    out[i++] = r;
  }
  if (i != grid.size()) throw InvalidData(path + ": expected " + std::to_string(grid.size()) + " rows");
  return out;
}

/// Initial density of the configured preset on the configured grid.
inline Field initial_density(const RunConfig& c) {
  const Grid g = c.grid.make();
  const auto& in = c.initial;
  if (in.preset == "vacuum") return Field(g);
  if (in.preset == "two-bump") {
    const double s2 = 2.0 * in.width * in.width;
    return Field::sample(g, [&](double x) {
      const double a = x - in.separation, b = x + in.separation;
      return std::min(1.0, in.amplitude * (std::exp(-a * a / s2) + std::exp(-b * b / s2)));
    });
  }
  if (in.preset == "radial-tumor") {
    return Field::sample(g, [&](double x) {
      const double r = std::abs(x);
      return r < in.radius ? 1.0 : std::max(0.0, in.exterior * (1.0 - (r - in.radius) / in.edge));
    });
  }
  if (in.preset == "uniform-nucleation") {
    const double rho = 1.0 - in.value / c.model.nu;
    return Field(g, std::vector<double>(g.size(), rho));
  }
  if (in.preset == "merging") {
    // Two saturated intervals separated by a slightly unsaturated gap.
    return Field::sample(g, [&](double x) {
      const double a = std::abs(x);
      if (a < in.separation) return in.exterior;
      return a < in.radius ? 1.0 : 0.0;
    });
  }
  if (in.preset == "csv") {
    const std::string path = in.file.front() == '/' ? in.file : c.source_directory + "/" + in.file;
    return read_density_csv(path, g);
  }
  throw InvalidParameter("unknown preset " + in.preset);
}

inline BoundaryConditions pme_boundary(const RunConfig& c) {
  return c.grid.zero_flux ? pme_zero_flux() : pme_dirichlet(c.model.rho_L);
}

inline BoundaryConditions limit_boundary(const RunConfig& c) {
  return c.grid.zero_flux ? limit_zero_flux() : limit_dirichlet(c.model);
}

inline PmeState initial_pme_state(const RunConfig& c) {
  return PmeState{prepare_initial_density(initial_density(c), c.model), c.model, pme_boundary(c)};
}

inline LimitState initial_limit_state(const RunConfig& c) {
  return project_initial_data(initial_density(c), c.model, limit_boundary(c));
}

}  // namespace spl
