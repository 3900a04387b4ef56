#pragma once

// Reference scheme: method of lines with periodic central differences and
// classical fourth-order Runge-Kutta.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "imdtm/diagnostics.hpp"
#include "imdtm/equations.hpp"
#include "imdtm/errors.hpp"
#include "imdtm/stencil.hpp"

namespace imdtm {

/// Periodic central-difference operator for the d-th derivative at accuracy order p.
class CentralDifference {
 public:
  CentralDifference(int derivative, int accuracy, double dx) : derivative_(derivative), accuracy_(accuracy) {
    if (derivative < 1) throw ConfigError("finite-difference derivative order must be positive");
    if (accuracy < 2 || accuracy % 2 != 0) throw ConfigError("central-difference accuracy must be even and >= 2");
    // A symmetric stencil of radius r gives accuracy 2r for d = 1, 2 and 2r - 2 for d = 3, 4.
    radius_ = accuracy / 2 + (derivative - 1) / 2;
    const auto geom = NeighborhoodGeometry::uniform(radius_, dx);
    const auto ws = birkhoff_weights_oracle(geom, OrderBand{0, 1}, {derivative});
    double fact = 1.0;
    for (int i = 2; i <= derivative; ++i) fact *= i;
    for (int j = 0; j < geom.size(); ++j) weights_.push_back(fact * ws.weight(0, j, 0));
  }

  int radius() const noexcept { return radius_; }
  int derivative() const noexcept { return derivative_; }
  int accuracy() const noexcept { return accuracy_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    const int n = static_cast<int>(u.size());
    if (n < 2 * radius_ + 1)
      throw ConfigError("grid of " + std::to_string(n) + " points is narrower than the " +
                        std::to_string(2 * radius_ + 1) + "-point stencil");
    out.assign(u.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = -radius_; j <= radius_; ++j) {
        int idx = (i + j) % n;
        if (idx < 0) idx += n;
        acc += weights_[static_cast<std::size_t>(j + radius_)] * u[static_cast<std::size_t>(idx)];
      }
      out[static_cast<std::size_t>(i)] = acc;
    }
  }

  std::vector<double> operator()(const std::vector<double>& u) const {
    std::vector<double> out;
    apply(u, out);
    return out;
  }

 private:
  int derivative_;
  int accuracy_;
  int radius_ = 0;
  std::vector<double> weights_;
};

inline std::vector<double> fd_spatial_deriv(const std::vector<double>& u, int derivative, int accuracy, double dx) {
  return CentralDifference(derivative, accuracy, dx)(u);
}

/// Function values (and, for second-order-in-time systems, time derivatives) on a periodic grid.
struct MolState {
  std::vector<double> u;
  std::vector<double> v;  // empty for first-order systems
  double length = 1.0;

  int size() const noexcept { return static_cast<int>(u.size()); }
  double dx() const noexcept { return length / static_cast<double>(u.size()); }

  bool all_finite() const noexcept {
    for (double x : u)
      if (!std::isfinite(x)) return false;
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

/// Right-hand side of a semi-discretized system.
class MolOperator {
 public:
  virtual ~MolOperator() = default;
  virtual void rhs(const MolState& s, MolState& ds) const = 0;
};

/// u_t = v, v_t = u_xx
class WaveMol final : public MolOperator {
 public:
  WaveMol(int accuracy, double dx) : d2_(2, accuracy, dx) {}

  void rhs(const MolState& s, MolState& ds) const override {
    ds.length = s.length;
    ds.u = s.v;
    d2_.apply(s.u, ds.v);
  }

 private:
  CentralDifference d2_;
};

/// u_t = -u^2 u_x - u_xxx
class MkdvMol final : public MolOperator {
 public:
  MkdvMol(int accuracy, double dx) : d1_(1, accuracy, dx), d3_(3, accuracy, dx) {}

  void rhs(const MolState& s, MolState& ds) const override {
    ds.length = s.length;
    ds.v.clear();
    d1_.apply(s.u, ux_);
    d3_.apply(s.u, ds.u);
    for (std::size_t i = 0; i < s.u.size(); ++i) ds.u[i] = -s.u[i] * s.u[i] * ux_[i] - ds.u[i];
  }

 private:
  CentralDifference d1_;
  CentralDifference d3_;
  mutable std::vector<double> ux_;
};

inline std::unique_ptr<MolOperator> make_mol(const PdeSystem& system, int accuracy, double dx) {
  if (system.name() == "wave") return std::make_unique<WaveMol>(accuracy, dx);
  if (system.name() == "mkdv") return std::make_unique<MkdvMol>(accuracy, dx);
  throw ConfigError("no method-of-lines discretization for '" + std::string(system.name()) + "'");
}

/// Samples the analytic solution at t = 0 (and its time derivative for the wave).
inline MolState initial_mol_state(const PdeSystem& system, int n, double length) {
  MolState s;
  s.length = length;
  const double dx = length / n;
  for (int i = 0; i < n; ++i) {
    const auto tower = system.initial_tower(i * dx, 1);
    s.u.push_back(tower(0, 0));
    if (system.temporal_order() == 2) s.v.push_back(tower(1, 0));
  }
  return s;
}

namespace detail {

inline std::vector<double> axpy(const std::vector<double>& y, double a, const std::vector<double>& x) {
  std::vector<double> out(y);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * x[i];
  return out;
}

inline MolState axpy(const MolState& y, double a, const MolState& x) {
  return MolState{axpy(y.u, a, x.u), axpy(y.v, a, x.v), y.length};
}

inline double axpy(double y, double a, double x) { return y + a * x; }

}  // namespace detail

/// Classical RK4 for any state with an axpy overload; f(y) returns dy/dt.
template <typename State, typename Rhs>
  requires std::invocable<Rhs&, const State&>
State rk4_step(const State& y, Rhs&& f, double dt) {
  using detail::axpy;
  const State k1 = f(y);
  const State k2 = f(axpy(y, 0.5 * dt, k1));
  const State k3 = f(axpy(y, 0.5 * dt, k2));
  const State k4 = f(axpy(y, dt, k3));
  State out = axpy(y, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  return axpy(out, dt / 6.0, k4);
}

inline MolState rk4_step(const MolState& state, const MolOperator& op, double dt) {
  return rk4_step(
      state,
      [&op](const MolState& s) {
        MolState ds;
        op.rhs(s, ds);
        return ds;
      },
      dt);
}

inline double mol_analytic_error(const MolState& state, const PdeSystem& system, double t) {
  std::vector<double> exact;
  exact.reserve(state.u.size());
  const double dx = state.dx();
  for (int i = 0; i < state.size(); ++i) exact.push_back(system.analytic(i * dx, t));
  return mean_log10_relative_error(state.u, exact);
}

}  // namespace imdtm
