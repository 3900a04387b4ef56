#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "imdtm/baseline.hpp"
#include "imdtm/equations.hpp"
#include "support.hpp"

using namespace imdtm;

namespace {

std::vector<double> sample(int n, double length, double (*fn)(double, double), double param) {
  std::vector<double> u;
  for (int i = 0; i < n; ++i) u.push_back(fn(i * length / n, param));
  return u;
}

double sin_k(double x, double k) { return std::sin(k * x); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double wave_error_at(int n, double length, int accuracy, double dt, int steps) {
  const WaveSystem wave(length);
  auto s = initial_mol_state(wave, n, length);
  const auto op = make_mol(wave, accuracy, length / n);
  for (int i = 0; i < steps; ++i) s = rk4_step(s, *op, dt);
  return mol_analytic_error(s, wave, dt * steps);
}

}  // namespace

TEST(CentralDifference, SecondDerivativeSecondOrder) {
  const double dx = 0.2;
  const CentralDifference d2(2, 2, dx);
  ASSERT_EQ(d2.radius(), 1);
  EXPECT_NEAR(d2.weights()[0], 1 / (dx * dx), 1e-10);
  EXPECT_NEAR(d2.weights()[1], -2 / (dx * dx), 1e-10);
  EXPECT_NEAR(d2.weights()[2], 1 / (dx * dx), 1e-10);
}

TEST(CentralDifference, StencilWidths) {
  EXPECT_EQ(CentralDifference(1, 8, 1.0).radius(), 4);
  EXPECT_EQ(CentralDifference(2, 8, 1.0).radius(), 4);
  EXPECT_EQ(CentralDifference(3, 8, 1.0).radius(), 5);
  EXPECT_EQ(CentralDifference(3, 2, 1.0).radius(), 2);
}

TEST(CentralDifference, ConstantHasZeroDerivative) {
  const std::vector<double> u(20, 4.25);
  for (int d = 1; d <= 3; ++d)
    for (int p : {2, 8})
      for (double v : fd_spatial_deriv(u, d, p, 0.3)) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(CentralDifference, TooWideForGrid) {
  EXPECT_THROW(fd_spatial_deriv(std::vector<double>(8, 1.0), 2, 8, 0.1), ConfigError);
  EXPECT_THROW(CentralDifference(2, 3, 0.1), ConfigError);
}

TEST(CentralDifference, ConvergenceOrder) {
  const double length = 2 * std::numbers::pi;
  for (int d = 1; d <= 3; ++d)
    for (int p : {2, 4, 6}) {
      std::vector<double> errs;
      const std::vector<int> sizes{16, 32};
      for (int n : sizes) {
        const auto u = sample(n, length, sin_k, 1.0);
        const auto exact = sample(n, length, sin_k, 1.0);
        std::vector<double> ref;
        for (int i = 0; i < n; ++i) {
          const double x = i * length / n;
          ref.push_back(d == 1 ? std::cos(x) : d == 2 ? -std::sin(x) : -std::cos(x));
        }
        errs.push_back(max_abs_diff(fd_spatial_deriv(u, d, p, length / n), ref));
      }
      const double slope = std::log2(errs[0] / errs[1]);
      EXPECT_NEAR(slope, p, 0.3) << "d=" << d << " p=" << p;
    }
}

TEST(Rk4, ExponentialStep) {
  for (double dt : {0.1, 0.05}) {
    const double y = rk4_step(1.0, [](double v) { return v; }, dt);
    const double taylor4 = 1 + dt + dt * dt / 2 + dt * dt * dt / 6 + dt * dt * dt * dt / 24;
    EXPECT_NEAR(y, taylor4, 1e-15);
    EXPECT_LE(std::abs(y - std::exp(dt)), 1.1 * std::pow(dt, 5) / 120);
  }
}

TEST(Rk4, ZeroStepIsIdentity) {
  const MkdvSystem m(43.875);
  const auto s = initial_mol_state(m, 64, 43.875);
  const auto op = make_mol(m, 8, 43.875 / 64);
  EXPECT_EQ(rk4_step(s, *op, 0.0).u, s.u);
  const WaveSystem w(18.0);
  const auto sw = initial_mol_state(w, 32, 18.0);
  const auto ow = make_mol(w, 2, 18.0 / 32);
  const auto next = rk4_step(sw, *ow, 0.0);
  EXPECT_EQ(next.u, sw.u);
  EXPECT_EQ(next.v, sw.v);
}

TEST(Rk4, TemporalOrderOnWave) {
  // p = 8 on a fine grid keeps the spatial error below the RK4 error.
  const double length = 18.0;
  const double t_end = 4.5;
  std::vector<double> errs;
  for (int steps : {45, 90}) errs.push_back(wave_error_at(64, length, 8, t_end / steps, steps));
  EXPECT_NEAR((errs[0] - errs[1]) / std::log10(2.0), 4.0, 0.3);
}

TEST(Rk4, WaveReflectionSymmetry) {
  const double length = 18.0;
  const int n = 48;
  const WaveSystem wave(length);
  const auto op = make_mol(wave, 8, length / n);
  MolState s;
  s.length = length;
  for (int i = 0; i < n; ++i) {
    const double x = i * length / n;
    s.u.push_back(std::exp(std::sin(2 * std::numbers::pi * x / length)) + 0.3 * std::cos(4 * std::numbers::pi * x / length + 0.4));
    s.v.push_back(0.2 * std::sin(2 * std::numbers::pi * x / length + 1.0));
  }
  MolState r = s;
  for (int i = 0; i < n; ++i) {
    r.u[static_cast<std::size_t>(i)] = s.u[static_cast<std::size_t>((n - i) % n)];
    r.v[static_cast<std::size_t>(i)] = s.v[static_cast<std::size_t>((n - i) % n)];
  }
  for (int step = 0; step < 20; ++step) {
    s = rk4_step(s, *op, 0.1);
    r = rk4_step(r, *op, 0.1);
  }
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(r.u[static_cast<std::size_t>(i)], s.u[static_cast<std::size_t>((n - i) % n)], 1e-13);
    EXPECT_NEAR(r.v[static_cast<std::size_t>(i)], s.v[static_cast<std::size_t>((n - i) % n)], 1e-13);
  }
}

TEST(Mol, MkdvRightHandSideMatchesAnalyticRate) {
  const double length = 43.875;
  const int n = 156;
  const MkdvSystem m(length);
  const auto s = initial_mol_state(m, n, length);
  MolState ds;
  make_mol(m, 8, length / n)->rhs(s, ds);
  const double a = m.a();
  for (int i = 0; i < n; i += 7) {
    const double phi = 2 * a * i * length / n;
    const double ut = 6 * std::numbers::sqrt2 * a * (-8 * a * a * a) * std::sin(phi) / std::pow(2 + std::cos(phi), 2);
    EXPECT_NEAR(ds.u[static_cast<std::size_t>(i)], ut, 1e-9);
  }
}

TEST(Mol, WaveSpatialAccuracyAnchors) {
  // dx = 0.08, t = 3: second-order differences keep about four digits, eighth-order over twelve.
  const double e2 = wave_error_at(225, 18.0, 2, 0.002, 1500);
  const double e8 = wave_error_at(225, 18.0, 8, 0.002, 1500);
  EXPECT_GE(e2, -5.0);
  EXPECT_LE(e2, -3.0);
  EXPECT_LE(e8, -12.0);
}
