#pragma once

// PDE plugins: each supplies the DTM recurrence that raises the temporal order
// of a local bivariate series, the analytic solution used for error
// measurement, and exact initial towers.

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "imdtm/errors.hpp"
#include "imdtm/series2.hpp"

namespace imdtm {

/// Per-worker scratch for nonlinear recurrences. Entries are memoized for the
/// lifetime of one extended series and must be reset before the next one.
struct RecurrenceCache {
  Series2 square;     // coefficients of f^2
  Series2 advection;  // coefficients of f^2 df/dx
  std::vector<unsigned char> square_done;
  std::vector<unsigned char> advection_done;

  void reset(int k_max, int h_max) {
    if (square.k_max() != k_max || square.h_max() != h_max) {
      square = Series2(k_max, h_max);
      advection = Series2(k_max, h_max);
    }
    const auto n = static_cast<std::size_t>((k_max + 1) * (h_max + 1));
    square_done.assign(n, 0);
    advection_done.assign(n, 0);
  }
};

class PdeSystem {
 public:
  virtual ~PdeSystem() = default;

  virtual std::string_view name() const = 0;

  /// Number of stored temporal layers (Cauchy data).
  virtual int temporal_order() const = 0;

  /// Declared upper bound on spatial orders consumed per temporal order raised.
  virtual int spatial_consumption() const = 0;

  /// Highest spatial order of temporal layer `layer` (< k) read when computing
  /// F(k, h), or -1 if the layer is not read. Lower orders are assumed read too.
  virtual int spatial_reach(int k, int h, int layer) const = 0;

  /// F(k, h) for k >= temporal_order(), from lower layers of `f`.
  virtual double recurrence(const Series2& f, RecurrenceCache& cache, int k, int h) const = 0;

  virtual double analytic(double x, double t) const = 0;

  /// Exact local coefficients F(0..T-1, 0..stored_orders-1) about x.
  virtual Series2 initial_tower(double x, int stored_orders) const = 0;
};

/// d^2f/dt^2 = d^2f/dx^2 with standing-wave data cos(2 pi x / L), df/dt = 0.
class WaveSystem final : public PdeSystem {
 public:
  explicit WaveSystem(double length) : length_(length) {
    if (!(length > 0.0)) throw ConfigError("wave: domain length must be positive");
  }

  std::string_view name() const override { return "wave"; }
  int temporal_order() const override { return 2; }
  int spatial_consumption() const override { return 2; }

  int spatial_reach(int k, int h, int layer) const override { return layer == k - 2 ? h + 2 : -1; }

  double recurrence(const Series2& f, RecurrenceCache&, int k, int h) const override { return coefficient(f, k, h); }

  /// F(k, h) = (h+2)(h+1) / (k(k-1)) F(k-2, h+2)
  static double coefficient(const Series2& f, int k, int h) {
    if (k < 2) throw TruncationError("wave: layers 0 and 1 are Cauchy data");
    if (k - 2 > f.k_max() || h + 2 > f.h_max()) throw TruncationError("wave: F(k-2, h+2) outside the table");
    return static_cast<double>((h + 2) * (h + 1)) / static_cast<double>(k * (k - 1)) * f(k - 2, h + 2);
  }

  double wavenumber() const noexcept { return 2.0 * std::numbers::pi / length_; }

  double analytic(double x, double t) const override {
    const double kappa = wavenumber();
    return std::cos(kappa * x) * std::cos(kappa * t);
  }

  Series2 initial_tower(double x, int stored_orders) const override {
    if (stored_orders < 1) throw ConfigError("wave: need at least one stored order");
    Series2 tower(1, stored_orders - 1);
    const double kappa = wavenumber();
    double scale = 1.0;  // kappa^h / h!
    for (int h = 0; h < stored_orders; ++h) {
      tower(0, h) = scale * std::cos(kappa * x + h * std::numbers::pi / 2.0);
      scale *= kappa / (h + 1);
    }
    return tower;
  }

 private:
  double length_;
};

/// Modified KdV: df/dt + f^2 df/dx + d^3f/dx^3 = 0, with the periodic solution
/// -2 sqrt(2) a + 6 sqrt(2) a / (2 + cos(2 a x - 8 a^3 t)).
class MkdvSystem final : public PdeSystem {
 public:
  MkdvSystem(double length, double a) : length_(length), a_(a) {
    if (!(length > 0.0)) throw ConfigError("mkdv: domain length must be positive");
  }

  /// a = pi / L, which makes the solution L-periodic.
  explicit MkdvSystem(double length) : MkdvSystem(length, std::numbers::pi / length) {}

  std::string_view name() const override { return "mkdv"; }
  int temporal_order() const override { return 1; }
  int spatial_consumption() const override { return 3; }

  int spatial_reach(int k, int h, int layer) const override {
    if (layer == k - 1) return h + 3;
    return layer < k - 1 ? h + 1 : -1;
  }

  double a() const noexcept { return a_; }

  // H(k,h) = sum_{m<=k} sum_{n<=h} F(k-m, n) F(m, h-n)
  static double square(const Series2& f, RecurrenceCache& c, int k, int h) {
    const auto idx = static_cast<std::size_t>(k * (c.square.h_max() + 1) + h);
    if (c.square_done[idx]) return c.square(k, h);
    double acc = 0.0;
    for (int m = 0; m <= k; ++m)
      for (int n = 0; n <= h; ++n) acc += f(k - m, n) * f(m, h - n);
    c.square(k, h) = acc;
    c.square_done[idx] = 1;
    return acc;
  }

  // G(k,h) = sum_{m<=k} sum_{n<=h} (h-n+1) H(k-m, n) F(m, h-n+1)
  static double advection(const Series2& f, RecurrenceCache& c, int k, int h) {
    const auto idx = static_cast<std::size_t>(k * (c.advection.h_max() + 1) + h);
    if (c.advection_done[idx]) return c.advection(k, h);
    double acc = 0.0;
    for (int m = 0; m <= k; ++m)
      for (int n = 0; n <= h; ++n) acc += (h - n + 1) * square(f, c, k - m, n) * f(m, h - n + 1);
    c.advection(k, h) = acc;
    c.advection_done[idx] = 1;
    return acc;
  }

  /// F(k,h) = -(1/k) [G(k-1,h) + (h+3)(h+2)(h+1) F(k-1,h+3)]
  double recurrence(const Series2& f, RecurrenceCache& cache, int k, int h) const override {
    if (k < 1) throw TruncationError("mkdv: layer 0 is Cauchy data");
    if (k - 1 > f.k_max() || h + 3 > f.h_max()) throw TruncationError("mkdv: F(k-1, h+3) outside the table");
    if (cache.square.k_max() < f.k_max() || cache.square.h_max() != f.h_max())
      throw TruncationError("mkdv: recurrence cache not sized for this series");
    const double dispersion = static_cast<double>((h + 3) * (h + 2) * (h + 1)) * f(k - 1, h + 3);
    return -(advection(f, cache, k - 1, h) + dispersion) / k;
  }

  double analytic(double x, double t) const override {
    const double s2 = std::numbers::sqrt2;
    return -2.0 * s2 * a_ + 6.0 * s2 * a_ / (2.0 + std::cos(2.0 * a_ * x - 8.0 * a_ * a_ * a_ * t));
  }

  /// Built by composing series: constant + 6 sqrt(2) a / (2 + cos(2 a (x + xi))).
  Series2 initial_tower(double x, int stored_orders) const override {
    if (stored_orders < 1) throw ConfigError("mkdv: need at least one stored order");
    const int hm = stored_orders - 1;
    const double s2 = std::numbers::sqrt2;
    Series2 phase(0, hm);
    phase(0, 0) = 2.0 * a_ * x;
    if (hm >= 1) phase(0, 1) = 2.0 * a_;
    const auto [sin_series, cos_series] = series::sin_cos(phase);
    Series2 denom = cos_series;
    denom(0, 0) += 2.0;
    Series2 tower = series::div(Series2::constant(6.0 * s2 * a_, 0, hm), denom);
    tower(0, 0) -= 2.0 * s2 * a_;
    return tower;
  }

 private:
  double length_;
  double a_;
};

/// Equation by configuration name ("wave" | "mkdv"). `a` <= 0 selects pi / L.
inline std::unique_ptr<PdeSystem> make_system(std::string_view name, double length, double a = 0.0) {
  if (name == "wave") return std::make_unique<WaveSystem>(length);
  if (name == "mkdv") return a > 0.0 ? std::make_unique<MkdvSystem>(length, a) : std::make_unique<MkdvSystem>(length);
  throw ConfigError("unknown equation '" + std::string(name) + "'");
}

}  // namespace imdtm
