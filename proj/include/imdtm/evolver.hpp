#pragma once

// Iterated multipoint DTM time stepping.
//
// Every step, each tower is turned into a local bivariate series: its stored
// layers are extended in h by the derivative-reconstruction stencil, then in
// k by the PDE recurrence up to the dependency frontier. Shifting that series
// by dt yields the tower at t + dt. With pairwise stacking, each pair of stored
// spatial orders gets its own interpolation band and extended series.

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imdtm/diagnostics.hpp"
#include "imdtm/equations.hpp"
#include "imdtm/errors.hpp"
#include "imdtm/grid.hpp"
#include "imdtm/parallel.hpp"
#include "imdtm/series2.hpp"
#include "imdtm/stencil.hpp"

namespace imdtm {

enum class Stacking { none, pairs };

struct EvolverConfig {
  double dt = 1.0;
  int steps = 0;
  int radius = 1;
  int stored_orders = 1;
  Stacking stacking = Stacking::none;
  int max_order = 0;  // highest spatial order of the top level; 0 = interpolant capacity
  int threads = 1;
};

/// Which F(k, h) of an extended series the recurrence can reach.
/// k_last[h] is the last temporal order such that every F(0..k_last, h) is computable.
struct Frontier {
  int h_ext = 0;
  int k_max = 0;
  std::vector<int> k_last;

  bool available(int k, int h) const noexcept {
    return h >= 0 && h <= h_ext && k >= 0 && k <= k_last[static_cast<std::size_t>(h)];
  }
};

/// Frontier for a series whose stored layers hold spatial orders 0..h_ext,
/// derived from the system's declared read pattern.
inline Frontier compute_frontier(const PdeSystem& system, int h_ext) {
  const int T = system.temporal_order();
  const int hard_cap = 4 * (h_ext + T) + 8;
  std::vector<std::vector<unsigned char>> avail;
  for (int k = 0; k < T; ++k) avail.emplace_back(static_cast<std::size_t>(h_ext + 1), 1);
  int empty_run = 0;
  for (int k = T; k < hard_cap && empty_run < T; ++k) {
    std::vector<unsigned char> row(static_cast<std::size_t>(h_ext + 1), 0);
    bool any = false;
    for (int h = 0; h <= h_ext; ++h) {
      bool ok = h == 0 || row[static_cast<std::size_t>(h - 1)];
      for (int layer = 0; ok && layer < k; ++layer) {
        const int reach = system.spatial_reach(k, h, layer);
        if (reach < 0) continue;
        ok = reach <= h_ext && avail[static_cast<std::size_t>(layer)][static_cast<std::size_t>(reach)];
      }
      row[static_cast<std::size_t>(h)] = ok;
      any = any || ok;
    }
    avail.push_back(std::move(row));
    empty_run = any ? 0 : empty_run + 1;
  }

  Frontier f;
  f.h_ext = h_ext;
  f.k_last.assign(static_cast<std::size_t>(h_ext + 1), 0);
  for (int h = 0; h <= h_ext; ++h) {
    int k = 0;
    while (k + 1 < static_cast<int>(avail.size()) && avail[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(h)]) ++k;
    f.k_last[static_cast<std::size_t>(h)] = k;
    f.k_max = std::max(f.k_max, k);
  }
  return f;
}

/// One interpolation band and the stored orders it evolves.
struct StackLevel {
  OrderBand evolved;  // stored orders updated by this level
  OrderBand sources;  // stored orders fed to the stencil
  int cap = 0;        // highest spatial order of the extended series
  std::shared_ptr<const StencilWeightSet> weights;  // targets evolved.last()+1 .. cap (null if none)
  Frontier frontier;
};

/// Everything a step needs that depends only on geometry and configuration.
struct StepPlan {
  int temporal_order = 1;
  int stored_orders = 1;
  int radius = 1;
  std::vector<StackLevel> levels;
};

/// (evolved, sources) bands for each stack level. Without stacking, one level
/// evolves every stored order and interpolates from the top (at most two) of
/// them. With pairs, each level interpolates from its own pair; a lone top
/// order (odd H_stored) also borrows the order below it as a source.
inline std::vector<std::pair<OrderBand, OrderBand>> stack_bands(int stored_orders, Stacking stacking) {
  std::vector<std::pair<OrderBand, OrderBand>> bands;
  if (stacking == Stacking::none) {
    const int q = std::min(stored_orders, 2);
    bands.push_back({OrderBand{0, stored_orders}, OrderBand{stored_orders - q, q}});
  } else {
    for (int base = 0; base < stored_orders; base += 2) {
      const OrderBand band{base, std::min(2, stored_orders - base)};
      const OrderBand sources = (band.count == 1 && base > 0) ? OrderBand{base - 1, 2} : band;
      bands.push_back({band, sources});
    }
  }
  return bands;
}

/// Highest spatial order the top level's interpolant can represent.
inline int top_capacity(const EvolverConfig& config) {
  const auto bands = stack_bands(config.stored_orders, config.stacking);
  const auto& src = bands.back().second;
  return src.base + (2 * config.radius + 1) * src.count - 1;
}

inline void validate(const EvolverConfig& config, int n_points) {
  if (config.radius < 1) throw ConfigError("radius", 0, "neighborhood must include neighbors (radius >= 1)");
  if (config.stored_orders < 1) throw ConfigError("H_stored", 0, "at least one stored order is required");
  if (!(config.dt >= 0.0) || !std::isfinite(config.dt)) throw ConfigError("dt", 0, "must be finite and non-negative");
  if (config.steps < 0) throw ConfigError("steps", 0, "must be non-negative");
  if (n_points < 2 * config.radius + 1)
    throw ConfigError("radius", 0, "grid of " + std::to_string(n_points) + " points cannot hold a " +
                                       std::to_string(2 * config.radius + 1) + "-point neighborhood");
  const int cap = top_capacity(config);
  if (config.max_order > cap)
    throw ConfigError("max_order", 0, "exceeds interpolant capacity " + std::to_string(cap));
  if (config.max_order != 0 && config.max_order < config.stored_orders - 1)
    throw ConfigError("max_order", 0, "must be at least the highest stored order");
}

inline StepPlan make_plan(const PdeSystem& system, const EvolverConfig& config, double dx, int n_points,
                          WeightCache& cache) {
  validate(config, n_points);
  StepPlan plan;
  plan.temporal_order = system.temporal_order();
  plan.stored_orders = config.stored_orders;
  plan.radius = config.radius;
  const auto geom = NeighborhoodGeometry::uniform(config.radius, dx);
  const auto bands = stack_bands(config.stored_orders, config.stacking);
  const int top_cap = config.max_order > 0 ? config.max_order : top_capacity(config);
  const int top_base = bands.back().first.base;
  for (const auto& [evolved, sources] : bands) {
    StackLevel level;
    level.evolved = evolved;
    level.sources = sources;
    const int capacity = sources.base + geom.size() * sources.count - 1;
    level.cap = std::min(top_cap - (top_base - evolved.base), capacity);
    level.cap = std::max(level.cap, evolved.last());
    std::vector<int> targets;
    for (int h = evolved.last() + 1; h <= level.cap; ++h) targets.push_back(h);
    if (!targets.empty()) level.weights = cache.get(geom, sources, targets);
    level.frontier = compute_frontier(system, level.cap);
    plan.levels.push_back(std::move(level));
  }
  return plan;
}

/// Rows k < T of the extended series for tower i: stored orders up to the
/// level's band, reconstructed orders above it up to the level cap.
inline void extend_spatial(const Grid& grid, int i, const StepPlan& plan, const StackLevel& level, Series2& series) {
  const int k_rows = std::max(level.frontier.k_max, plan.temporal_order - 1);
  if (series.h_max() != level.cap || series.k_max() != k_rows)
    series = Series2(k_rows, level.cap);
  else
    std::fill(series.data().begin(), series.data().end(), 0.0);
  const auto& tower = grid[i].stored;
  for (int k = 0; k < plan.temporal_order; ++k) {
    for (int h = 0; h <= level.evolved.last(); ++h) series(k, h) = tower(k, h);
    if (!level.weights) continue;
    const auto& ws = *level.weights;
    const int m = 2 * plan.radius + 1;
    const int q = ws.sources().count;
    const int base = ws.sources().base;
    for (std::size_t t = 0; t < ws.targets().size(); ++t) {
      const auto w = ws.row(t);
      double acc = 0.0;
      for (int j = 0; j < m; ++j) {
        const auto& nb = grid.tower(i + j - plan.radius).stored;
        for (int s = 0; s < q; ++s) acc += w[static_cast<std::size_t>(j * q + s)] * nb(k, base + s);
      }
      series(k, ws.targets()[t]) = acc;
    }
  }
}

/// Fills F(k, h) for k >= k_from wherever the frontier allows.
inline void extend_temporal(const PdeSystem& system, Series2& series, const Frontier& frontier, RecurrenceCache& cache,
                            int k_from) {
  cache.reset(series.k_max(), series.h_max());
  for (int k = k_from; k <= frontier.k_max; ++k)
    for (int h = 0; h <= frontier.h_ext; ++h) {
      if (!frontier.available(k, h)) continue;
      series(k, h) = system.recurrence(series, cache, k, h);
    }
}

/// Convenience form computing the frontier from the series bounds.
inline Series2 extend_temporal(const PdeSystem& system, Series2 series, int k_from) {
  const auto frontier = compute_frontier(system, series.h_max());
  if (series.k_max() < frontier.k_max) {
    Series2 grown(frontier.k_max, series.h_max());
    for (int k = 0; k <= series.k_max(); ++k)
      for (int h = 0; h <= series.h_max(); ++h) grown(k, h) = series(k, h);
    series = std::move(grown);
  }
  RecurrenceCache cache;
  extend_temporal(system, series, frontier, cache, k_from);
  return series;
}

/// F(k0, h) at t + dt = sum_{k >= k0} C(k, k0) F(k, h) dt^(k - k0), truncated at the frontier.
inline double shifted_coefficient(const Series2& series, const Frontier& frontier, double dt, int k0, int h) {
  const int last = frontier.k_last[static_cast<std::size_t>(h)];
  double acc = 0.0;
  double binom = 1.0;  // C(k, k0)
  double power = 1.0;  // dt^(k - k0)
  for (int k = k0; k <= last; ++k) {
    acc += binom * series(k, h) * power;
    binom = binom * (k + 1) / (k + 1 - k0);
    power *= dt;
  }
  return acc;
}

/// New stored table (T x stored_orders) from a fully extended series.
inline Series2 propagate_point(const Series2& series, const Frontier& frontier, double dt, int temporal_order,
                               int stored_orders) {
  Series2 out(temporal_order - 1, stored_orders - 1);
  for (int k0 = 0; k0 < temporal_order; ++k0)
    for (int h = 0; h < stored_orders; ++h) out(k0, h) = shifted_coefficient(series, frontier, dt, k0, h);
  return out;
}

/// One time step of the whole grid. Reads `grid` only; returns the next grid.
inline Grid step(const Grid& grid, const PdeSystem& system, const StepPlan& plan, double dt, int threads = 1) {
  Grid next = grid;
  const int T = plan.temporal_order;
  parallel_for(grid.size(), threads, [&](int begin, int end) {
    Series2 series;
    RecurrenceCache cache;
    for (int i = begin; i < end; ++i) {
      auto& out = next[i].stored;
      for (const auto& level : plan.levels) {
        extend_spatial(grid, i, plan, level, series);
        extend_temporal(system, series, level.frontier, cache, T);
        for (int k0 = 0; k0 < T; ++k0)
          for (int h = level.evolved.base; h <= level.evolved.last(); ++h)
            out(k0, h) = shifted_coefficient(series, level.frontier, dt, k0, h);
      }
    }
  });
  return next;
}

/// Grid of exact initial towers.
inline Grid initial_grid(const PdeSystem& system, int n, double length, int stored_orders) {
  Grid grid(n, length, system.temporal_order(), stored_orders);
  for (auto& tower : grid) tower.stored = system.initial_tower(tower.x, stored_orders);
  return grid;
}

/// Owns the double-buffered grid and the cached plan for a run.
class Evolver {
 public:
  Evolver(const PdeSystem& system, EvolverConfig config, Grid initial)
      : system_(system), config_(config), grid_(std::move(initial)) {
    if (grid_.temporal_order() != system.temporal_order())
      throw ConfigError("grid temporal order does not match the equation");
    if (grid_.stored_orders() != config.stored_orders)
      throw ConfigError("H_stored", 0, "grid stores a different number of orders");
    plan_ = make_plan(system, config_, grid_.dx(), grid_.size(), cache_);
  }

  /// Advances one step; false once a non-finite coefficient appears (the grid is then left as produced).
  bool advance() {
    grid_ = step(grid_, system_, plan_, config_.dt, config_.threads);
    ++steps_;
    return grid_.all_finite();
  }

  const Grid& grid() const noexcept { return grid_; }
  const StepPlan& plan() const noexcept { return plan_; }
  const EvolverConfig& config() const noexcept { return config_; }
  int steps_taken() const noexcept { return steps_; }
  double time() const noexcept { return steps_ * config_.dt; }

  DiagnosticsRecord diagnostics() const {
    DiagnosticsRecord r;
    r.step = steps_;
    r.t = time();
    r.analytic_err = analytic_error(grid_, system_, r.t);
    r.constraint_err = constraint_violation(grid_);
    return r;
  }

 private:
  const PdeSystem& system_;
  EvolverConfig config_;
  Grid grid_;
  WeightCache cache_;
  StepPlan plan_;
  int steps_ = 0;
};

/// Steps from exact initial data until the analytic error exceeds 0 (100%
/// relative) or a coefficient turns non-finite. Returns that step, if any.
inline std::optional<int> unstable_mode_demo(const PdeSystem& system, const EvolverConfig& config, int n_points,
                                             double length, int max_steps) {
  Evolver ev(system, config, initial_grid(system, n_points, length, config.stored_orders));
  for (int s = 1; s <= max_steps; ++s) {
    const bool finite = ev.advance();
    if (!finite || !(analytic_error(ev.grid(), system, ev.time()) <= 0.0)) return s;
  }
  return std::nullopt;
}

}  // namespace imdtm
