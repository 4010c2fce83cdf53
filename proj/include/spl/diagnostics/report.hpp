#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "spl/core/errors.hpp"

namespace spl {

enum class LemmaStatus { pass, fail, hypothesis_not_met };

inline const char* to_string(LemmaStatus s) {
  switch (s) {
    case LemmaStatus::pass: return "pass";
    case LemmaStatus::fail: return "fail";
    case LemmaStatus::hypothesis_not_met: return "hypothesis_not_met";
  }
  return "?";
}

/// One row of a check: a scenario parameter, what was measured, and the bound it was held to.
struct Measurement {
  std::string label;
  double parameter = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct LemmaCheckResult {
  std::string lemma_id;
  LemmaStatus status = LemmaStatus::pass;
  std::vector<Measurement> details;
  /// Fitted or reported constants, in insertion order.
  std::vector<std::pair<std::string, double>> fitted;

  bool passed() const noexcept { return status == LemmaStatus::pass; }

  double constant(const std::string& name) const {
    for (const auto& [k, v] : fitted)
      if (k == name) return v;
    throw InvalidParameter("no fitted constant named " + name);
  }

  /// pass iff every measurement is ok, unless the status was already set to hypothesis_not_met.
  void settle() {
    if (status == LemmaStatus::hypothesis_not_met) return;
    status = LemmaStatus::pass;
    for (const auto& d : details)
      if (!d.ok) status = LemmaStatus::fail;
  }
};

/// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("slope fit needs >= 2 paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Least-squares slope of y = c x through the origin.
inline double slope_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (!(sxx > 0.0)) throw InvalidParameter("slope fit needs a nonzero abscissa");
  return sxy / sxx;
}

}  // namespace spl
