#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "spl/barriers/bundle.hpp"
#include "spl/core/errors.hpp"
#include "spl/diagnostics/convergence.hpp"
#include "spl/diagnostics/report.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

inline constexpr const char* csv_schema_line = "# stiff-pressure-lab schema v1\n";

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Compact time label for file names, e.g. 0.05 -> "0.05".
inline std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << content;
  if (!f) throw Error("write failed for " + path);
}

namespace detail {

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

}  // namespace detail

/// Columns x, rho, p, u of an m-dependent state.
inline std::string snapshot_csv(const PmeState& s) {
  std::string out = csv_schema_line;
  out += "# time = " + format_double(s.time()) + "\n";
  out += "x,rho,p,u\n";
  const Field p = s.pressure(), u = s.u();
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    out += detail::csv_row({format_double(s.rho.grid.center(i)), format_double(s.rho[i]), format_double(p[i]),
                            format_double(u[i])});
  return out;
}

/// Columns x, u, b_u, p = u^- of a limit state.
inline std::string snapshot_csv(const LimitState& s) {
  std::string out = csv_schema_line;
  out += "# time = " + format_double(s.time()) + "\n";
  out += "x,u,b_u,p\n";
  for (std::size_t i = 0; i < s.u.size(); ++i)
    out += detail::csv_row({format_double(s.u.grid.center(i)), format_double(s.u[i]), format_double(b_graph(s.u[i])),
                            format_double(negative_part(s.u[i]))});
  return out;
}

/// One row per free-boundary point per snapshot; snapshots without a boundary contribute no rows.
inline std::string free_boundary_csv(const std::vector<FreeBoundary>& history) {
  std::string out = csv_schema_line;
  out += "time,count,index,position\n";
  for (const auto& fb : history)
    for (std::size_t k = 0; k < fb.positions.size(); ++k)
      out += detail::csv_row({format_double(fb.time), std::to_string(fb.count()), std::to_string(k),
                              format_double(fb.positions[k])});
  return out;
}

inline std::string convergence_csv(const ConvergenceReport& r) {
  std::string out = csv_schema_line;
  out += "# quantization = " + format_double(r.quantization) + "\n";
  out += "m,t_skip,error,hausdorff_max\n";
  for (std::size_t j = 0; j < r.m_values.size(); ++j)
    out += detail::csv_row({format_double(r.m_values[j]), format_double(r.t_skip[j]), format_double(r.errors[j]),
                            format_double(r.hausdorff_max[j])});
  return out;
}

inline std::string convergence_hausdorff_csv(const ConvergenceReport& r) {
  std::string out = csv_schema_line;
  out += "m,time,hausdorff\n";
  for (std::size_t j = 0; j < r.m_values.size(); ++j)
    for (std::size_t k = 0; k < r.times.size(); ++k)
      out += detail::csv_row({format_double(r.m_values[j]), format_double(r.times[k]), format_double(r.hausdorff[j][k])});
  return out;
}

/// One row per measurement of every check.
inline std::string lemma_csv(const std::vector<LemmaCheckResult>& results) {
  std::string out = csv_schema_line;
  out += "lemma,status,label,parameter,measured,bound,ok\n";
  for (const auto& r : results)
    for (const auto& d : r.details)
      out += detail::csv_row({r.lemma_id, to_string(r.status), d.label, format_double(d.parameter),
                              format_double(d.measured), format_double(d.bound), d.ok ? "1" : "0"});
  return out;
}

inline std::string lemma_constants_csv(const std::vector<LemmaCheckResult>& results) {
  std::string out = csv_schema_line;
  out += "lemma,name,value\n";
  for (const auto& r : results)
    for (const auto& [name, value] : r.fitted) out += detail::csv_row({r.lemma_id, name, format_double(value)});
  return out;
}

/// Interface data per sample time of a verified bundle.
inline std::string barrier_csv(const BarrierBundle& b, const BarrierReport& r) {
  std::string out = csv_schema_line;
  out += "# kind = " + std::string(to_string(b.kind)) + ", m = " + format_double(b.m) + ", A0 = " + format_double(b.A0) +
         ", c_m = " + format_double(b.c_m) + "\n";
  out += "time,radius,gradient_gap,continuity_jump\n";
  for (std::size_t k = 0; k < b.times.size(); ++k)
    out += detail::csv_row({format_double(b.times[k]), format_double(b.radii[k]), format_double(r.gradient_gap[k]),
                            format_double(r.continuity_jump[k])});
  return out;
}

}  // namespace spl
