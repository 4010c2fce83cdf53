#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spl/barriers/profiles.hpp"
#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

/// A configuration error; `line()` is 0 when no single line is at fault.
class ConfigError : public Error {
public:
  ConfigError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct GridConfig {
  Geometry geometry = Geometry::cartesian;
  int dimension = 2;  ///< used by radial grids
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_cells = 200;
  bool zero_flux = false;  ///< otherwise Dirichlet data from model.rho_L

  Grid make() const {
    return geometry == Geometry::radial ? Grid::radial(dimension, x_min, x_max, n_cells)
                                        : Grid::cartesian(x_min, x_max, n_cells);
  }
};

struct InitialConfig {
  std::string preset = "vacuum";
  std::string file;
  double amplitude = 0.8;
  double separation = 0.5;
  double width = 0.2;
  double radius = 1.5;
  double edge = 2.0;
  double exterior = 0.9;
  double value = 0.25;
};

struct SteppingConfig {
  double dt = 0.0;  ///< 0: automatic
  double t_end = 1.0;
  std::vector<double> snapshot_times{1.0};
  Scheme scheme = Scheme::automatic;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool svg = true;
  int width = 640;
  int height = 400;
};

struct ConvergeConfig {
  std::vector<double> m_values{10, 20, 40, 80};
  double pme_dt = 0.0;
  double limit_dt = 0.0;
  double skip_factor = 4.0;
};

struct BarrierConfig {
  BarrierKind kind = BarrierKind::sub;
  double m = 100.0;
  std::optional<double> A0;  ///< empty: searched
  std::optional<double> a0, a_slope, t_end, decay, curvature, rho_far;
  double tolerance = 1e-8;
  double required_fraction = 0.99;

  PairSpec pair(const ModelParams& model) const {
    PairSpec s = PairSpec::defaults(kind);
    s.nu = model.nu;
    s.growth = model.growth;
    if (a0) s.a0 = *a0;
    if (a_slope) s.a_slope = *a_slope;
    if (t_end) s.t_end = *t_end;
    if (decay) s.decay = *decay;
    if (curvature) s.curvature = *curvature;
    if (rho_far) s.rho_far = *rho_far;
    return s;
  }
};

struct LemmaConfig {
  std::vector<std::string> checks{"pressure-bound", "nucleation", "shrink", "expansion", "initial-motion", "comparison"};
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::vector<double> pressure_m_values{40, 80};
  std::vector<double> eps_values{1e-2, 5e-3, 2.5e-3};
  std::vector<double> held_out_eps{1.25e-3};
  std::vector<double> shrink_radii{0.2, 0.1, 0.05};
  std::vector<double> expansion_radii{0.2, 0.1};
  std::vector<double> motion_times{1e-4, 1e-3, 1e-2};
};

/** @brief Parsed `section.key = value` configuration. */
struct RunConfig {
  ModelParams model;
  GridConfig grid;
  InitialConfig initial;
  SteppingConfig stepping;
  OutputConfig output;
  ConvergeConfig converge;
  BarrierConfig barrier;
  LemmaConfig lemma;
  std::string source_directory;  ///< relative initial.file paths resolve against this
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& v, std::size_t line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size() || !std::isfinite(x)) throw ConfigError(line, "expected a number, got '" + v + "'");
  return x;
}

inline std::size_t parse_count(const std::string& v, std::size_t line) {
  const double x = parse_number(v, line);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e12) throw ConfigError(line, "expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_numbers(const std::string& v, std::size_t line) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_number(s, line));
  if (out.empty()) throw ConfigError(line, "expected a comma-separated list of numbers");
  return out;
}

inline std::uint64_t parse_seed(const std::string& v, std::size_t line) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(line, "expected an unsigned 64-bit integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::out_of_range&) {
    throw ConfigError(line, "seed out of range: '" + v + "'");
  }
}

inline void require(bool ok, std::size_t line, const std::string& what) {
  if (!ok) throw ConfigError(line, what);
}

}  // namespace detail

/**
 * @brief Parse and validate a configuration text.
 *
 * One `section.key = value` per line; `#` starts a comment. The model
 * section must be present. Cross-key constraints are reported on the line
 * of the key that completes them.
 */
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  RunConfig c;
  double g0 = 1.0, p_M = 1.0;
  std::optional<double> M0;
  std::map<std::string, std::size_t> seen;

  using Setter = std::function<void(const std::string&, std::size_t)>;
  const std::map<std::string, Setter> keys = {
      {"model.m", [&](const std::string& v, std::size_t l) {
         c.model.m = parse_number(v, l);
         require(c.model.m > 1.0, l, "m must be > 1");
       }},
      {"model.nu", [&](const std::string& v, std::size_t l) {
         c.model.nu = parse_number(v, l);
         require(c.model.nu > 0.0, l, "nu must be > 0 (ν=0 case not treated)");
       }},
      {"model.g0", [&](const std::string& v, std::size_t l) {
         g0 = parse_number(v, l);
         require(g0 >= 0.0, l, "g0 must be >= 0");
       }},
      {"model.p_M", [&](const std::string& v, std::size_t l) {
         p_M = parse_number(v, l);
         require(p_M > 0.0, l, "p_M must be > 0");
       }},
      {"model.M0", [&](const std::string& v, std::size_t l) {
         M0 = parse_number(v, l);
         require(*M0 > 0.0, l, "M0 must be > 0");
       }},
      {"model.rho_L", [&](const std::string& v, std::size_t l) {
         c.model.rho_L = parse_number(v, l);
         require(c.model.rho_L >= 0.0 && c.model.rho_L < 1.0, l, "rho_L must lie in [0, 1)");
       }},
      {"grid.geometry", [&](const std::string& v, std::size_t l) {
         require(v == "cartesian" || v == "radial", l, "geometry must be cartesian or radial");
         c.grid.geometry = v == "radial" ? Geometry::radial : Geometry::cartesian;
       }},
      {"grid.dimension", [&](const std::string& v, std::size_t l) {
         const auto d = parse_count(v, l);
         require(d >= 1 && d <= 3, l, "dimension must be 1, 2 or 3");
         c.grid.dimension = static_cast<int>(d);
       }},
      {"grid.x_min", [&](const std::string& v, std::size_t l) { c.grid.x_min = parse_number(v, l); }},
      {"grid.x_max", [&](const std::string& v, std::size_t l) { c.grid.x_max = parse_number(v, l); }},
      {"grid.n_cells", [&](const std::string& v, std::size_t l) {
         c.grid.n_cells = parse_count(v, l);
         require(c.grid.n_cells >= 3, l, "n_cells must be >= 3");
       }},
      {"grid.boundary", [&](const std::string& v, std::size_t l) {
         require(v == "dirichlet" || v == "zero-flux", l, "boundary must be dirichlet or zero-flux");
         c.grid.zero_flux = v == "zero-flux";
       }},
      {"initial.preset", [&](const std::string& v, std::size_t l) {
         static const std::vector<std::string> names{"two-bump", "radial-tumor", "uniform-nucleation", "merging", "vacuum", "csv"};
         require(std::find(names.begin(), names.end(), v) != names.end(), l, "unknown preset '" + v + "'");
         c.initial.preset = v;
       }},
      {"initial.file", [&](const std::string& v, std::size_t) { c.initial.file = v; }},
      {"initial.amplitude", [&](const std::string& v, std::size_t l) { c.initial.amplitude = parse_number(v, l); }},
      {"initial.separation", [&](const std::string& v, std::size_t l) { c.initial.separation = parse_number(v, l); }},
      {"initial.width", [&](const std::string& v, std::size_t l) {
         c.initial.width = parse_number(v, l);
         require(c.initial.width > 0.0, l, "width must be > 0");
       }},
      {"initial.radius", [&](const std::string& v, std::size_t l) {
         c.initial.radius = parse_number(v, l);
         require(c.initial.radius > 0.0, l, "radius must be > 0");
       }},
      {"initial.edge", [&](const std::string& v, std::size_t l) {
         c.initial.edge = parse_number(v, l);
         require(c.initial.edge > 0.0, l, "edge must be > 0");
       }},
      {"initial.exterior", [&](const std::string& v, std::size_t l) {
         c.initial.exterior = parse_number(v, l);
         require(c.initial.exterior >= 0.0 && c.initial.exterior <= 1.0, l, "exterior must lie in [0, 1]");
       }},
      {"initial.value", [&](const std::string& v, std::size_t l) { c.initial.value = parse_number(v, l); }},
      {"stepping.dt", [&](const std::string& v, std::size_t l) {
         if (v == "auto") {
           c.stepping.dt = 0.0;
           return;
         }
         c.stepping.dt = parse_number(v, l);
         require(c.stepping.dt > 0.0, l, "dt must be > 0 or auto");
       }},
      {"stepping.t_end", [&](const std::string& v, std::size_t l) {
         c.stepping.t_end = parse_number(v, l);
         require(c.stepping.t_end > 0.0, l, "t_end must be > 0");
       }},
      {"stepping.snapshot_times", [&](const std::string& v, std::size_t l) { c.stepping.snapshot_times = parse_numbers(v, l); }},
      {"stepping.scheme", [&](const std::string& v, std::size_t l) {
         if (v == "auto") c.stepping.scheme = Scheme::automatic;
         else if (v == "explicit") c.stepping.scheme = Scheme::explicit_euler;
         else if (v == "semi-implicit") c.stepping.scheme = Scheme::semi_implicit;
         else throw ConfigError(l, "scheme must be auto, explicit or semi-implicit");
       }},
      {"output.directory", [&](const std::string& v, std::size_t l) {
         require(!v.empty(), l, "output directory must not be empty");
         c.output.directory = v;
       }},
      {"output.formats", [&](const std::string& v, std::size_t l) {
         c.output.csv = c.output.svg = false;
         for (const auto& f : split_list(v)) {
           if (f == "csv") c.output.csv = true;
           else if (f == "svg") c.output.svg = true;
           else throw ConfigError(l, "unknown output format '" + f + "'");
         }
       }},
      {"output.width", [&](const std::string& v, std::size_t l) {
         c.output.width = static_cast<int>(parse_count(v, l));
         require(c.output.width >= 100, l, "width must be >= 100");
       }},
      {"output.height", [&](const std::string& v, std::size_t l) {
         c.output.height = static_cast<int>(parse_count(v, l));
         require(c.output.height >= 100, l, "height must be >= 100");
       }},
      {"converge.m_values", [&](const std::string& v, std::size_t l) {
         c.converge.m_values = parse_numbers(v, l);
         require(c.converge.m_values.size() >= 2, l, "m_values needs >= 2 entries");
         for (std::size_t i = 0; i < c.converge.m_values.size(); ++i) {
           require(c.converge.m_values[i] > 1.0, l, "m_values must be > 1");
           require(i == 0 || c.converge.m_values[i] > c.converge.m_values[i - 1], l, "m_values must be increasing");
         }
       }},
      {"converge.pme_dt", [&](const std::string& v, std::size_t l) { c.converge.pme_dt = v == "auto" ? 0.0 : parse_number(v, l); }},
      {"converge.limit_dt", [&](const std::string& v, std::size_t l) { c.converge.limit_dt = v == "auto" ? 0.0 : parse_number(v, l); }},
      {"converge.skip_factor", [&](const std::string& v, std::size_t l) {
         c.converge.skip_factor = parse_number(v, l);
         require(c.converge.skip_factor >= 0.0, l, "skip_factor must be >= 0");
       }},
      {"barrier.kind", [&](const std::string& v, std::size_t l) {
         require(v == "sub" || v == "super", l, "barrier kind must be sub or super");
         c.barrier.kind = v == "sub" ? BarrierKind::sub : BarrierKind::super;
       }},
      {"barrier.m", [&](const std::string& v, std::size_t l) {
         c.barrier.m = parse_number(v, l);
         require(c.barrier.m > 1.0, l, "barrier m must be > 1");
       }},
      {"barrier.A0", [&](const std::string& v, std::size_t l) {
         if (v == "auto") {
           c.barrier.A0.reset();
           return;
         }
         c.barrier.A0 = parse_number(v, l);
         require(*c.barrier.A0 >= 0.0, l, "A0 must be >= 0 or auto");
       }},
      {"barrier.a0", [&](const std::string& v, std::size_t l) { c.barrier.a0 = parse_number(v, l); }},
      {"barrier.a_slope", [&](const std::string& v, std::size_t l) { c.barrier.a_slope = parse_number(v, l); }},
      {"barrier.t_end", [&](const std::string& v, std::size_t l) { c.barrier.t_end = parse_number(v, l); }},
      {"barrier.decay", [&](const std::string& v, std::size_t l) { c.barrier.decay = parse_number(v, l); }},
      {"barrier.curvature", [&](const std::string& v, std::size_t l) { c.barrier.curvature = parse_number(v, l); }},
      {"barrier.rho_far", [&](const std::string& v, std::size_t l) { c.barrier.rho_far = parse_number(v, l); }},
      {"barrier.tolerance", [&](const std::string& v, std::size_t l) {
         c.barrier.tolerance = parse_number(v, l);
         require(c.barrier.tolerance >= 0.0, l, "tolerance must be >= 0");
       }},
      {"barrier.required_fraction", [&](const std::string& v, std::size_t l) {
         c.barrier.required_fraction = parse_number(v, l);
         require(c.barrier.required_fraction > 0.0 && c.barrier.required_fraction <= 1.0, l,
                 "required_fraction must lie in (0, 1]");
       }},
      {"lemma.checks", [&](const std::string& v, std::size_t l) {
         static const std::vector<std::string> names{"pressure-bound", "nucleation", "shrink", "expansion", "initial-motion", "comparison"};
         c.lemma.checks = split_list(v);
         require(!c.lemma.checks.empty(), l, "lemma.checks must name at least one check");
         for (const auto& n : c.lemma.checks)
           require(std::find(names.begin(), names.end(), n) != names.end(), l, "unknown lemma check '" + n + "'");
       }},
      {"lemma.trials", [&](const std::string& v, std::size_t l) {
         c.lemma.trials = parse_count(v, l);
         require(c.lemma.trials >= 1, l, "trials must be >= 1");
       }},
      {"lemma.pressure_m_values", [&](const std::string& v, std::size_t l) {
         c.lemma.pressure_m_values = parse_numbers(v, l);
         for (double m : c.lemma.pressure_m_values) require(m > 1.0, l, "pressure_m_values must be > 1");
       }},
      {"lemma.eps_values", [&](const std::string& v, std::size_t l) { c.lemma.eps_values = parse_numbers(v, l); }},
      {"lemma.held_out_eps", [&](const std::string& v, std::size_t l) { c.lemma.held_out_eps = parse_numbers(v, l); }},
      {"lemma.shrink_radii", [&](const std::string& v, std::size_t l) { c.lemma.shrink_radii = parse_numbers(v, l); }},
      {"lemma.expansion_radii", [&](const std::string& v, std::size_t l) { c.lemma.expansion_radii = parse_numbers(v, l); }},
      {"lemma.motion_times", [&](const std::string& v, std::size_t l) { c.lemma.motion_times = parse_numbers(v, l); }},
      {"lemma.seed", [&](const std::string& v, std::size_t l) {
         c.lemma.seed = parse_seed(v, l);
       }},
  };

  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "syntax error: expected 'section.key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
      throw ConfigError(line, "syntax error: key '" + key + "' must have the form section.key");
    if (value.empty()) throw ConfigError(line, "syntax error: missing value for '" + key + "'");
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (seen.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    it->second(value, line);
    seen[key] = line;
  }

  auto has_section = [&](const std::string& s) {
    for (const auto& [k, l] : seen)
      if (k.compare(0, s.size() + 1, s + ".") == 0) return true;
    return false;
  };
  auto line_of = [&](const std::string& k) { return seen.count(k) ? seen.at(k) : std::size_t{0}; };
  if (!has_section("model")) throw ConfigError(0, "missing section: model");

  try {
    c.model.growth = g0 > 0.0 ? GrowthLaw::affine(g0, p_M) : GrowthLaw::zero();
  } catch (const InvalidParameter& e) {
    throw ConfigError(line_of("model.g0"), e.what());
  }
  c.model.M0 = M0.value_or(p_M);

  const std::size_t grid_line = std::max(line_of("grid.x_min"), line_of("grid.x_max"));
  require(c.grid.x_max > c.grid.x_min, grid_line, "grid requires x_max > x_min");
  require(c.grid.geometry != Geometry::radial || c.grid.x_min >= 0.0, grid_line, "radial grid requires x_min >= 0");

  const std::size_t snap_line = std::max(line_of("stepping.snapshot_times"), line_of("stepping.t_end"));
  const auto& snaps = c.stepping.snapshot_times;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    require(snaps[i] > 0.0 && snaps[i] <= c.stepping.t_end, snap_line, "snapshot times must lie in (0, t_end]");
    require(i == 0 || snaps[i] > snaps[i - 1], snap_line, "snapshot times must be strictly increasing");
  }

  const std::size_t preset_line = line_of("initial.preset");
  if (c.initial.preset == "csv") require(!c.initial.file.empty(), preset_line, "csv preset needs initial.file");
  if (c.initial.preset == "uniform-nucleation")
    require(c.initial.value >= 0.0 && c.initial.value <= c.model.nu,
            std::max(preset_line, line_of("initial.value")), "uniform-nucleation value must lie in [0, nu]");
  return c;
}

/// Reads and parses a file; relative initial.file paths resolve against its directory.
inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  RunConfig c = parse_config(ss.str());
  const auto slash = path.find_last_of('/');
  c.source_directory = slash == std::string::npos ? "." : path.substr(0, slash);
  return c;
}

}  // namespace spl
