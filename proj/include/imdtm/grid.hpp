#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "imdtm/errors.hpp"
#include "imdtm/series2.hpp"

namespace imdtm {

/// Stored DTM coefficients at one grid point: F(k, h) for k < T, h < H_stored,
/// each a local coefficient about the point's own position.
struct Tower {
  double x = 0.0;
  Series2 stored;
};

/// Periodic uniform 1-D grid of towers at positions i * dx.
class Grid {
 public:
  Grid() = default;

  Grid(int n, double length, int temporal_order, int stored_orders)
      : length_(length), temporal_order_(temporal_order), stored_orders_(stored_orders) {
    if (n < 1) throw ConfigError("grid needs at least one point");
    if (!(length > 0.0)) throw ConfigError("grid length must be positive");
    if (temporal_order < 1 || stored_orders < 1) throw ConfigError("towers need at least one coefficient");
    towers_.reserve(static_cast<std::size_t>(n));
    const double dx = length / n;
    for (int i = 0; i < n; ++i) towers_.push_back(Tower{i * dx, Series2(temporal_order - 1, stored_orders - 1)});
  }

  int size() const noexcept { return static_cast<int>(towers_.size()); }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / size(); }
  int temporal_order() const noexcept { return temporal_order_; }
  int stored_orders() const noexcept { return stored_orders_; }

  int wrap(int i) const noexcept {
    const int n = size();
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

  Tower& operator[](int i) noexcept { return towers_[static_cast<std::size_t>(i)]; }
  const Tower& operator[](int i) const noexcept { return towers_[static_cast<std::size_t>(i)]; }

  /// Periodic access.
  const Tower& tower(int i) const noexcept { return towers_[static_cast<std::size_t>(wrap(i))]; }

  auto begin() noexcept { return towers_.begin(); }
  auto end() noexcept { return towers_.end(); }
  auto begin() const noexcept { return towers_.begin(); }
  auto end() const noexcept { return towers_.end(); }

  bool all_finite() const noexcept {
    for (const auto& t : towers_)
      if (!t.stored.all_finite()) return false;
    return true;
  }

 private:
  double length_ = 1.0;
  int temporal_order_ = 1;
  int stored_orders_ = 1;
  std::vector<Tower> towers_;
};

}  // namespace imdtm
