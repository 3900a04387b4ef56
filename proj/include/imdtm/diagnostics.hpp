#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "imdtm/equations.hpp"
#include "imdtm/grid.hpp"

namespace imdtm {

/// Relative errors are clamped from below at 1e-17 before the logarithm so an
/// exact match reports a finite value.
inline constexpr double kRelativeErrorFloor = 1e-17;

/// Denominators never drop below this fraction of the slice's largest magnitude.
inline constexpr double kRelativeDenominatorFraction = 1e-12;

struct DiagnosticsRecord {
  int step = 0;
  double t = 0.0;
  double analytic_err = 0.0;
  double constraint_err = std::numeric_limits<double>::quiet_NaN();  // NaN = not measured
  double wall_ms = 0.0;
};

inline double log10_relative(double err, double denom) {
  const double d = std::max(denom, std::numeric_limits<double>::min());
  return std::log10(std::max(err / d, kRelativeErrorFloor));
}

/// Mean over points of log10(|approx - exact| / max(|exact|, 1e-12 * max|exact|)).
inline double mean_log10_relative_error(std::span<const double> approx, std::span<const double> exact) {
  double scale = 0.0;
  for (double e : exact) scale = std::max(scale, std::abs(e));
  double sum = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double err = std::abs(approx[i] - exact[i]);
    if (!std::isfinite(err)) return std::numeric_limits<double>::infinity();
    sum += log10_relative(err, std::max(std::abs(exact[i]), kRelativeDenominatorFraction * scale));
  }
  return sum / static_cast<double>(approx.size());
}

/// Mean log10 relative error of the stored values F(0,0) against the analytic solution at t.
inline double analytic_error(const Grid& grid, const PdeSystem& system, double t) {
  std::vector<double> approx;
  std::vector<double> exact;
  approx.reserve(static_cast<std::size_t>(grid.size()));
  exact.reserve(static_cast<std::size_t>(grid.size()));
  for (const auto& tower : grid) {
    approx.push_back(tower.stored(0, 0));
    exact.push_back(system.analytic(tower.x, t));
  }
  return mean_log10_relative_error(approx, exact);
}

/// Relative mismatch between what one tower's spatial series predicts at a
/// neighbor and what the neighbor stores.
inline double pair_mismatch(double predicted, double stored, double scale) {
  const double denom =
      std::max({std::abs(predicted), std::abs(stored), kRelativeDenominatorFraction * scale});
  return std::abs(predicted - stored) / std::max(denom, std::numeric_limits<double>::min());
}

/// Neighbor-to-neighbor self-consistency: each tower's stored spatial series,
/// evaluated at the positions of its two neighbors, against their stored values,
/// for every stored temporal order. Mean of log10 mismatches; NaN when the
/// towers carry no spatial derivatives or every layer is identically zero.
inline double constraint_violation(const Grid& grid) {
  if (grid.stored_orders() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dx = grid.dx();
  double sum = 0.0;
  std::size_t count = 0;
  for (int k = 0; k < grid.temporal_order(); ++k) {
    double scale = 0.0;
    for (const auto& tower : grid) scale = std::max(scale, std::abs(tower.stored(k, 0)));
    if (scale == 0.0) continue;
    for (int i = 0; i < grid.size(); ++i) {
      const auto& series = grid[i].stored;
      for (int side : {-1, 1}) {
        const double predicted = series.evaluate_x(k, side * dx);
        const double stored = grid.tower(i + side).stored(k, 0);
        const double mismatch = pair_mismatch(predicted, stored, scale);
        if (!std::isfinite(mismatch)) return std::numeric_limits<double>::infinity();
        sum += std::log10(std::max(mismatch, kRelativeErrorFloor));
        ++count;
      }
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace imdtm
