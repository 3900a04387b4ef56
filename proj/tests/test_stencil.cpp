#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "imdtm/equations.hpp"
#include "imdtm/evolver.hpp"
#include "imdtm/stencil.hpp"
#include "support.hpp"

using namespace imdtm;
using imdtm::test::binomial;

namespace {

std::vector<int> orders(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

NeighborhoodGeometry jittered(int radius, double dx, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  std::vector<double> off;
  for (int i = -radius; i <= radius; ++i) off.push_back(i == 0 ? 0.0 : (i + u(rng)) * dx);
  return NeighborhoodGeometry(off);
}

// Largest weight discrepancy in each target row, relative to that row's largest oracle weight.
double max_row_rel_diff(const StencilWeightSet& a, const StencilWeightSet& b) {
  double worst = 0.0;
  for (std::size_t t = 0; t < a.targets().size(); ++t) {
    const auto ra = a.row(t);
    const auto rb = b.row(t);
    double scale = 0.0;
    for (double w : rb) scale = std::max(scale, std::abs(w));
    for (std::size_t i = 0; i < ra.size(); ++i) worst = std::max(worst, std::abs(ra[i] - rb[i]) / scale);
  }
  return worst;
}

// Reconstruction of every monomial x^d, d <= capacity, about the center:
// neighbor j stores C(d, s) x_j^(d-s); the center coefficient of order t is [d == t].
double worst_monomial_error(const StencilWeightSet& ws) {
  const auto& geom = ws.geometry();
  double worst = 0.0;
  for (int d = 0; d <= ws.capacity(); ++d) {
    const auto coeff = [&](int j, int s) {
      return s > d ? 0.0 : binomial(d, s) * std::pow(geom.offsets()[static_cast<std::size_t>(j)], d - s);
    };
    const auto rec = ws.reconstruct(coeff);
    for (std::size_t t = 0; t < rec.size(); ++t) {
      double mag = 0.0;
      for (int j = 0; j < geom.size(); ++j)
        for (int s = 0; s < ws.sources().count; ++s)
          mag += std::abs(ws.weight(t, j, s) * coeff(j, ws.sources().base + s));
      const double expected = ws.targets()[t] == d ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(rec[t] - expected) / std::max(1.0, mag));
    }
  }
  return worst;
}

}  // namespace

TEST(Geometry, RejectsDegenerateOffsets) {
  EXPECT_THROW(NeighborhoodGeometry({-1.0, 0.0, 0.0, 1.0}), GeometryError);
  EXPECT_THROW(NeighborhoodGeometry({-1.0, 1.0}), GeometryError);
  EXPECT_THROW(NeighborhoodGeometry({0.0, -1.0, 1.0}), GeometryError);
  EXPECT_NO_THROW(NeighborhoodGeometry({-0.3, 0.0, 2.0}));
}

TEST(BuildWeights, ThreePointSecondDerivative) {
  const double dx = 0.25;
  const auto geom = NeighborhoodGeometry::uniform(1, dx);
  for (const auto& ws : {build_weights(geom, {0, 1}, {2}), birkhoff_weights_oracle(geom, {0, 1}, {2})}) {
    // DTM coefficient F(2) = f''/2, so the classic [1, -2, 1]/dx^2 appears halved.
    EXPECT_NEAR(2 * ws.weight(0, 0, 0), 1 / (dx * dx), 1e-12);
    EXPECT_NEAR(2 * ws.weight(0, 1, 0), -2 / (dx * dx), 1e-12);
    EXPECT_NEAR(2 * ws.weight(0, 2, 0), 1 / (dx * dx), 1e-12);
  }
}

TEST(BuildWeights, StoredOrderIsItsOwnEstimate) {
  const auto ws = build_weights(NeighborhoodGeometry::uniform(1, 0.5), {0, 1}, {0});
  EXPECT_NEAR(ws.weight(0, 0, 0), 0.0, 1e-15);
  EXPECT_NEAR(ws.weight(0, 1, 0), 1.0, 1e-15);
  EXPECT_NEAR(ws.weight(0, 2, 0), 0.0, 1e-15);
}

TEST(BuildWeights, CubicFromValuesAndSlopes) {
  const auto geom = NeighborhoodGeometry::uniform(1, 1.0);
  const auto ws = build_weights(geom, {0, 2}, {3});
  // f = x^3 about x_j: C_j(0) = x_j^3, C_j(1) = 3 x_j^2
  const auto rec = ws.reconstruct([&](int j, int s) {
    const double x = geom.offsets()[static_cast<std::size_t>(j)];
    return s == 0 ? x * x * x : 3 * x * x;
  });
  EXPECT_NEAR(rec[0], 1.0, 1e-14);
}

TEST(BirkhoffOracle, FivePointSecondDerivative) {
  const double dx = 0.1;
  const auto ws = birkhoff_weights_oracle(NeighborhoodGeometry::uniform(2, dx), {0, 1}, {2});
  const double expected[] = {-1, 16, -30, 16, -1};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(2 * ws.weight(0, j, 0), expected[j] / (12 * dx * dx), 1e-10);
}

TEST(BirkhoffOracle, RandomOffsetsReproducePolynomialDerivatives) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto geom = jittered(2, 0.3, rng);
    const auto ws = birkhoff_weights_oracle(geom, {0, 2}, orders(0, 9));
    std::vector<double> p(10);
    for (double& c : p) c = u(rng);
    // C_j(s) = P^(s)(x_j) / s!
    const auto rec = ws.reconstruct([&](int j, int s) {
      const double x = geom.offsets()[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (int d = s; d < 10; ++d) acc += p[static_cast<std::size_t>(d)] * binomial(d, s) * std::pow(x, d - s);
      return acc;
    });
    for (int t = 0; t < 10; ++t) EXPECT_LE(test::rel_diff(rec[static_cast<std::size_t>(t)], p[static_cast<std::size_t>(t)]), 1e-10);
  }
}

TEST(BuildWeights, MatchesOracle) {
  std::mt19937 rng(22);
  for (int radius = 1; radius <= 5; ++radius)
    for (int q = 1; q <= 3; ++q)
      for (int base : {0, 2}) {
        const OrderBand band{base, q};
        const int cap = base + (2 * radius + 1) * q - 1;
        for (const auto& geom : {NeighborhoodGeometry::uniform(radius, 0.7), jittered(radius, 0.7, rng)}) {
          const auto ws = build_weights(geom, band, orders(base, cap));
          const auto wo = birkhoff_weights_oracle(geom, band, orders(base, cap));
          EXPECT_LE(max_row_rel_diff(ws, wo), 1e-9) << "radius " << radius << " q " << q << " base " << base;
        }
      }
}

TEST(BuildWeights, ExactForMonomialsUpToCapacity) {
  for (int radius = 1; radius <= 5; ++radius)
    for (int q = 1; q <= 3; ++q)
      for (int base : {0, 1, 2, 4}) {
        const OrderBand band{base, q};
        const int cap = base + (2 * radius + 1) * q - 1;
        // Offsets span [-1, 1]; scaling covariance carries the result to any spacing.
        const auto ws = build_weights(NeighborhoodGeometry::uniform(radius, 1.0 / radius), band, orders(base, cap));
        EXPECT_EQ(ws.capacity(), cap);
        EXPECT_LE(worst_monomial_error(ws), 1e-9) << "radius " << radius << " q " << q << " base " << base;
      }
}

TEST(BuildWeights, ScalingCovariance) {
  const double lambda = 2.5;
  const auto a = build_weights(NeighborhoodGeometry::uniform(3, 0.4), {2, 2}, orders(2, 15));
  const auto b = build_weights(NeighborhoodGeometry::uniform(3, 0.4 * lambda), {2, 2}, orders(2, 15));
  for (std::size_t t = 0; t < a.targets().size(); ++t) {
    double row_scale = 0.0;
    for (double w : b.row(t)) row_scale = std::max(row_scale, std::abs(w));
    for (int j = 0; j < 7; ++j)
      for (int s = 0; s < 2; ++s) {
        const double factor = std::pow(lambda, (2 + s) - a.targets()[t]);
        EXPECT_LE(std::abs(b.weight(t, j, s) - a.weight(t, j, s) * factor), 1e-12 * row_scale);
      }
  }
}

TEST(BuildWeights, CapacityError) {
  const auto geom = NeighborhoodGeometry::uniform(1, 1.0);
  EXPECT_THROW(build_weights(geom, {0, 1}, {3}), CapacityError);
  EXPECT_THROW(birkhoff_weights_oracle(geom, {0, 2}, {6}), CapacityError);
  EXPECT_THROW(build_weights(geom, {2, 2}, {1}), CapacityError);
  EXPECT_NO_THROW(build_weights(geom, {2, 2}, {7}));
}

TEST(BuildWeights, SourceOrdersMustBeContiguous) {
  const std::vector<int> gap{0, 2};
  EXPECT_THROW(OrderBand::from_orders(gap), CapacityError);
  const std::vector<int> ok{2, 3};
  EXPECT_EQ(OrderBand::from_orders(ok), (OrderBand{2, 2}));
}

TEST(ApplyWeights, QuadraticGridIsExact) {
  Grid grid(12, 6.0, 1, 1);
  for (auto& tower : grid) tower.stored(0, 0) = 3.0 - tower.x + 0.5 * tower.x * tower.x;
  const auto ws = build_weights(NeighborhoodGeometry::uniform(1, grid.dx()), {0, 1}, {1, 2});
  const auto rec = apply_weights(grid, 5, ws, 0, 0);
  const double x = grid[5].x;
  EXPECT_NEAR(rec[0], -1.0 + x, 1e-12);
  EXPECT_NEAR(rec[1], 0.5, 1e-12);
}

TEST(ApplyWeights, ConstantFieldGivesZero) {
  Grid grid(16, 4.0, 2, 2);
  for (auto& tower : grid) {
    tower.stored(0, 0) = 7.0;
    tower.stored(1, 0) = -2.0;
  }
  const auto ws = build_weights(NeighborhoodGeometry::uniform(3, grid.dx()), {0, 2}, orders(1, 13));
  for (int k = 0; k < 2; ++k)
    for (double v : apply_weights(grid, 0, ws, k, 0)) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(ApplyWeights, TranslationInvariance) {
  // Shifting the field by s grid points moves the reconstruction by s points.
  std::mt19937 rng(23);
  Grid a(20, 10.0, 1, 2);
  for (auto& tower : a) {
    tower.stored(0, 0) = std::uniform_real_distribution<double>(-1, 1)(rng);
    tower.stored(0, 1) = std::uniform_real_distribution<double>(-1, 1)(rng);
  }
  Grid b = a;
  for (int i = 0; i < 20; ++i) b[i].stored = a.tower(i - 3).stored;
  const auto ws = build_weights(NeighborhoodGeometry::uniform(2, a.dx()), {0, 2}, orders(2, 9));
  for (int i = 0; i < 20; ++i) EXPECT_EQ(apply_weights(a, i, ws, 0, 0), apply_weights(b, i + 3, ws, 0, 0));
}

TEST(ApplyWeights, CosineDerivativesOnCoarseGrid) {
  const WaveSystem wave(18.0);
  const Grid grid = initial_grid(wave, 16, 18.0, 2);
  const auto geom = NeighborhoodGeometry::uniform(5, grid.dx());
  const auto targets = orders(2, 21);
  const auto ws = build_weights(geom, {0, 2}, targets);
  const auto wo = birkhoff_weights_oracle(geom, {0, 2}, targets);
  for (int i : {0, 3, 7}) {
    const auto rec = apply_weights(grid, i, ws, 0, 0);
    const auto rec_oracle = apply_weights(grid, i, wo, 0, 0);
    const auto exact = wave.initial_tower(grid[i].x, 22);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double scale = std::pow(grid.dx(), targets[t]);
      EXPECT_LE(std::abs(rec[t] - exact(0, targets[t])) * scale, 1e-14) << "order " << targets[t];
      EXPECT_LE(std::abs(rec[t] - rec_oracle[t]) * scale, 1e-15) << "order " << targets[t];
    }
  }
}

TEST(ApplyWeights, MisalignedOffsetsRejected) {
  Grid grid(10, 5.0, 1, 1);
  const auto ws = build_weights(NeighborhoodGeometry::uniform(1, 0.3), {0, 1}, {2});
  EXPECT_THROW(apply_weights(grid, 0, ws, 0, 0), GeometryError);
}

TEST(WeightCache, MemoizesPerKey) {
  WeightCache cache;
  const auto geom = NeighborhoodGeometry::uniform(2, 0.5);
  const auto a = cache.get(geom, {0, 2}, {2, 3});
  const auto b = cache.get(geom, {0, 2}, {2, 3});
  EXPECT_EQ(a.get(), b.get());
  cache.get(geom, {0, 1}, {2, 3});
  EXPECT_EQ(cache.size(), 2u);
}
