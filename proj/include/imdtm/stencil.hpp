#pragma once

// Generalized finite-difference weights. Each neighbor j contributes its stored
// local DTM coefficients C_j(s) for a contiguous band of spatial orders
// s = base .. base + count - 1, and the weights give the DTM coefficients of
// the unique interpolating polynomial at the center:
//
//   F^(h_t) = sum_j sum_s w[h_t][j][s] * C_j(s)
//
// For base > 0 the band is treated as the first `count` coefficients of the
// base-th derivative, so the interpolant determines orders base and above.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "imdtm/errors.hpp"
#include "imdtm/grid.hpp"

namespace imdtm {

/// Offsets of the neighborhood points relative to the center (which is offset 0).
class NeighborhoodGeometry {
 public:
  NeighborhoodGeometry() = default;

  explicit NeighborhoodGeometry(std::vector<double> offsets) : offsets_(std::move(offsets)) {
    if (offsets_.empty()) throw GeometryError("empty neighborhood");
    for (double o : offsets_)
      if (!std::isfinite(o)) throw GeometryError("non-finite neighborhood offset");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
      if (!(offsets_[i] > offsets_[i - 1]))
        throw GeometryError("neighborhood offsets must be strictly increasing and distinct");
    const auto zeros = std::count(offsets_.begin(), offsets_.end(), 0.0);
    if (zeros != 1) throw GeometryError("neighborhood must contain the center offset 0 exactly once");
  }

  /// {-radius*dx, ..., 0, ..., radius*dx}
  static NeighborhoodGeometry uniform(int radius, double dx) {
    if (radius < 0) throw GeometryError("negative radius");
    if (!(dx > 0.0)) throw GeometryError("grid spacing must be positive");
    std::vector<double> off;
    for (int i = -radius; i <= radius; ++i) off.push_back(i * dx);
    return NeighborhoodGeometry(std::move(off));
  }

  std::span<const double> offsets() const noexcept { return offsets_; }
  int size() const noexcept { return static_cast<int>(offsets_.size()); }
  int center() const noexcept {
    return static_cast<int>(std::find(offsets_.begin(), offsets_.end(), 0.0) - offsets_.begin());
  }
  double extent() const noexcept {
    double e = 0.0;
    for (double o : offsets_) e = std::max(e, std::abs(o));
    return e;
  }

  bool operator==(const NeighborhoodGeometry&) const = default;

 private:
  std::vector<double> offsets_;
};

/// Contiguous band of spatial orders {base, ..., base + count - 1}.
struct OrderBand {
  int base = 0;
  int count = 1;

  int last() const noexcept { return base + count - 1; }
  bool operator==(const OrderBand&) const = default;

  /// Validates that `orders` is a non-empty contiguous ascending run.
  static OrderBand from_orders(std::span<const int> orders) {
    if (orders.empty()) throw CapacityError("empty source order set");
    for (std::size_t i = 0; i < orders.size(); ++i)
      if (orders[i] != orders[0] + static_cast<int>(i))
        throw CapacityError("source orders must be a contiguous ascending range");
    if (orders[0] < 0) throw CapacityError("negative source order");
    return {orders[0], static_cast<int>(orders.size())};
  }
};

class StencilWeightSet {
 public:
  StencilWeightSet(NeighborhoodGeometry geometry, OrderBand sources, std::vector<int> targets)
      : geometry_(std::move(geometry)), sources_(sources), targets_(std::move(targets)) {
    weights_.assign(targets_.size() * static_cast<std::size_t>(geometry_.size() * sources_.count), 0.0);
  }

  const NeighborhoodGeometry& geometry() const noexcept { return geometry_; }
  OrderBand sources() const noexcept { return sources_; }
  std::span<const int> targets() const noexcept { return targets_; }

  /// Highest spatial order the interpolant can represent.
  int capacity() const noexcept { return sources_.base + geometry_.size() * sources_.count - 1; }

  double& weight(std::size_t target_index, int neighbor, int source) noexcept {
    return weights_[index(target_index, neighbor, source)];
  }
  double weight(std::size_t target_index, int neighbor, int source) const noexcept {
    return weights_[index(target_index, neighbor, source)];
  }

  /// Weights of one target as a (neighbor-major, source-minor) row.
  std::span<const double> row(std::size_t target_index) const noexcept {
    const auto w = static_cast<std::size_t>(geometry_.size() * sources_.count);
    return {weights_.data() + target_index * w, w};
  }

  /// F^(target) for each target, given coeff(neighbor, source_order).
  template <typename Coeff>
  std::vector<double> reconstruct(Coeff&& coeff) const {
    std::vector<double> out(targets_.size(), 0.0);
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      double acc = 0.0;
      for (int j = 0; j < geometry_.size(); ++j)
        for (int s = 0; s < sources_.count; ++s) acc += weight(t, j, s) * coeff(j, sources_.base + s);
      out[t] = acc;
    }
    return out;
  }

 private:
  std::size_t index(std::size_t t, int j, int s) const noexcept {
    return (t * static_cast<std::size_t>(geometry_.size()) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(sources_.count) +
           static_cast<std::size_t>(s);
  }

  NeighborhoodGeometry geometry_;
  OrderBand sources_;
  std::vector<int> targets_;
  std::vector<double> weights_;
};

namespace stencil_detail {

inline void validate_targets(const NeighborhoodGeometry& geom, OrderBand sources, std::span<const int> targets) {
  if (sources.count < 1 || sources.base < 0) throw CapacityError("invalid source order band");
  if (targets.empty()) throw CapacityError("no target orders requested");
  const int capacity = sources.base + geom.size() * sources.count - 1;
  for (int t : targets) {
    if (t < sources.base)
      throw CapacityError("target order " + std::to_string(t) + " lies below the source band");
    if (t > capacity)
      throw CapacityError("target order " + std::to_string(t) + " exceeds interpolant capacity " +
                          std::to_string(capacity));
  }
}

template <typename W>
W factorial(int n) {
  W f{1};
  for (int i = 2; i <= n; ++i) f *= W(i);
  return f;
}

template <typename W>
W int_pow(W x, int e) {
  W r{1};
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

template <typename W>
std::vector<W> poly_mul(const std::vector<W>& a, const std::vector<W>& b) {
  std::vector<W> out(a.size() + b.size() - 1, W{0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace stencil_detail

/// Weights from the explicit multipoint (Lopez-Temme) Taylor expansion:
///
///   P(x) = sum_{n < q} sum_j L_j(x) a_{n,j} Omega(x)^n,   Omega = prod_k (x - x_k)
///
/// where a_{n,j} is a linear combination of the stored coefficients. Each
/// a_{n,j} needs Taylor coefficients of 1 / ((x - x_j)^[k!=j] prod_{s!=k} (x - x_s)^n)
/// about x_k; these come from the logarithmic-derivative recursion u' = u v
/// with v a sum of simple poles. Offsets are rescaled to [-1, 1] before any
/// arithmetic and the result is rescaled back.
template <typename Work = long double>
StencilWeightSet build_weights(const NeighborhoodGeometry& geom, OrderBand sources, std::vector<int> targets) {
  using namespace stencil_detail;
  validate_targets(geom, sources, targets);

  const int m = geom.size();
  const int q = sources.count;
  const int b = sources.base;
  const Work scale = geom.extent() > 0.0 ? Work(geom.extent()) : Work(1);
  std::vector<Work> y(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) y[j] = Work(geom.offsets()[j]) / scale;

  // Omega^n for n < q.
  std::vector<Work> omega{Work{1}};
  for (int k = 0; k < m; ++k) omega = poly_mul(omega, std::vector<Work>{-y[k], Work{1}});
  std::vector<std::vector<Work>> omega_pow{{Work{1}}};
  for (int n = 1; n < q; ++n) omega_pow.push_back(poly_mul(omega_pow.back(), omega));

  // Lagrange basis polynomials.
  std::vector<std::vector<Work>> lagrange(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    std::vector<Work> p{Work{1}};
    Work denom{1};
    for (int k = 0; k < m; ++k) {
      if (k == j) continue;
      p = poly_mul(p, std::vector<Work>{-y[k], Work{1}});
      denom *= y[j] - y[k];
    }
    for (auto& c : p) c /= denom;
    lagrange[j] = std::move(p);
  }

  // Scaled-coordinate weights on the derivative-shifted problem.
  const std::size_t nt = targets.size();
  std::vector<Work> scaled(nt * static_cast<std::size_t>(m * q), Work{0});
  auto at = [&](std::size_t t, int j, int s) -> Work& {
    return scaled[(t * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(q) +
                  static_cast<std::size_t>(s)];
  };

  std::vector<Work> u(static_cast<std::size_t>(q), Work{0});
  std::vector<Work> v(static_cast<std::size_t>(q), Work{0});
  for (int n = 0; n < q; ++n) {
    for (int j = 0; j < m; ++j) {
      const auto basis = poly_mul(lagrange[j], omega_pow[n]);
      for (int k = 0; k < m; ++k) {
        const int cross = k != j ? 1 : 0;
        const int alpha = n - cross;
        if (alpha < 0) continue;

        // u(x_k) and the Taylor coefficients of v = u'/u about x_k.
        Work u0{1};
        if (cross) u0 /= y[k] - y[j];
        for (int s = 0; s < m; ++s)
          if (s != k) u0 /= int_pow(y[k] - y[s], n);
        for (int i = 0; i < alpha; ++i) {
          const Work sign = (i % 2 == 0) ? Work{1} : Work{-1};
          Work vi{0};
          if (cross) vi -= sign / int_pow(y[k] - y[j], i + 1);
          for (int s = 0; s < m; ++s)
            if (s != k) vi -= Work(n) * sign / int_pow(y[k] - y[s], i + 1);
          v[i] = vi;
        }
        u[0] = u0;
        for (int r = 0; r < alpha; ++r) {
          Work acc{0};
          for (int i = 0; i <= r; ++i) acc += u[r - i] * v[i];
          u[r + 1] = acc / Work(r + 1);
        }

        // a_{n,j} = sum_k sum_{delta <= alpha} C_k(delta) U(alpha - delta)
        for (std::size_t t = 0; t < nt; ++t) {
          const int g = targets[t] - b;
          if (g >= static_cast<int>(basis.size())) continue;
          const Work c = basis[static_cast<std::size_t>(g)];
          if (c == Work{0}) continue;
          for (int delta = 0; delta <= alpha; ++delta) at(t, k, delta) += c * u[alpha - delta];
        }
      }
    }
  }

  // Undo the rescaling and the derivative shift:
  //   G_j(s) = ((b+s)!/s!) F_j(b+s),   F^(h) = G^(h-b) (h-b)!/h!.
  StencilWeightSet out(geom, sources, targets);
  for (std::size_t t = 0; t < nt; ++t) {
    const int h = targets[t];
    const int g = h - b;
    for (int j = 0; j < m; ++j)
      for (int s = 0; s < q; ++s) {
        Work w = at(t, j, s);
        w *= factorial<Work>(b + s) / factorial<Work>(s);
        w *= factorial<Work>(g) / factorial<Work>(h);
        // lambda^(s - g)
        if (s >= g)
          w *= int_pow(scale, s - g);
        else
          w /= int_pow(scale, g - s);
        out.weight(t, j, s) = static_cast<double>(w);
      }
  }
  return out;
}

/// Reference weights from a dense solve of the confluent Vandermonde system
/// that matches one polynomial to every prescribed derivative value. The
/// monomial system is badly conditioned (radius 5 with three orders loses
/// ~12 digits), so it is solved in 50-digit arithmetic by default.
template <typename Work = boost::multiprecision::cpp_bin_float_50>
StencilWeightSet birkhoff_weights_oracle(const NeighborhoodGeometry& geom, OrderBand sources,
                                         std::vector<int> targets) {
  using namespace stencil_detail;
  using std::abs;
  validate_targets(geom, sources, targets);

  const int m = geom.size();
  const int q = sources.count;
  const int b = sources.base;
  const int dim = m * q;
  const Work lambda = geom.extent() > 0.0 ? Work(geom.extent()) : Work(1);

  // The unknown is g = f^(b) written as sum_d c_d (x / lambda)^d.
  // Row (j, s): g^(s)(x_j) = sum_d c_d d!/(d-s)! y_j^(d-s) lambda^-s.
  // The lambda^-s and the 1/(b+s)! of F_j(b+s) are applied outside the solve.
  std::vector<Work> a(static_cast<std::size_t>(dim * dim), Work{0});
  auto A = [&](int r, int c) -> Work& { return a[static_cast<std::size_t>(r * dim + c)]; };
  for (int j = 0; j < m; ++j) {
    const Work yj = Work(geom.offsets()[j]) / lambda;
    for (int s = 0; s < q; ++s)
      for (int d = s; d < dim; ++d) A(j * q + s, d) = factorial<Work>(d) / factorial<Work>(d - s) * int_pow(yj, d - s);
  }

  // Row g of A^-1 solves A^T z = e_g; factor A^T once.
  std::vector<Work> at(static_cast<std::size_t>(dim * dim));
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) at[static_cast<std::size_t>(r * dim + c)] = A(c, r);
  auto AT = [&](int r, int c) -> Work& { return at[static_cast<std::size_t>(r * dim + c)]; };
  std::vector<int> perm(static_cast<std::size_t>(dim));
  std::iota(perm.begin(), perm.end(), 0);
  Work max_abs{0};
  for (auto& e : at)
    if (abs(e) > max_abs) max_abs = abs(e);
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r)
      if (abs(AT(r, col)) > abs(AT(piv, col))) piv = r;
    if (abs(AT(piv, col)) <= max_abs * Work(1e-30))
      throw GeometryError("singular interpolation system (degenerate neighborhood)");
    if (piv != col) {
      for (int c = 0; c < dim; ++c) std::swap(AT(piv, c), AT(col, c));
      std::swap(perm[piv], perm[col]);
    }
    for (int r = col + 1; r < dim; ++r) {
      const Work f = AT(r, col) / AT(col, col);
      AT(r, col) = f;
      for (int c = col + 1; c < dim; ++c) AT(r, c) -= f * AT(col, c);
    }
  }

  StencilWeightSet out(geom, sources, targets);
  std::vector<Work> z(static_cast<std::size_t>(dim));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const int h = targets[t];
    const int g = h - b;
    // Solve with rhs = e_g under the row permutation.
    for (int r = 0; r < dim; ++r) z[r] = perm[r] == g ? Work{1} : Work{0};
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < r; ++c) z[r] -= AT(r, c) * z[c];
    for (int r = dim - 1; r >= 0; --r) {
      for (int c = r + 1; c < dim; ++c) z[r] -= AT(r, c) * z[c];
      z[r] /= AT(r, r);
    }
    // F^(h) = g^(h-b)(0)/h! = c_g g! lambda^-g / h!;  F_j(b+s) = rowvalue * lambda^-s / (b+s)!.
    for (int j = 0; j < m; ++j)
      for (int s = 0; s < q; ++s) {
        Work w = z[j * q + s] * factorial<Work>(g) / factorial<Work>(h) * factorial<Work>(b + s);
        if (s >= g)
          w *= int_pow(lambda, s - g);
        else
          w /= int_pow(lambda, g - s);
        out.weight(t, j, s) = static_cast<double>(w);
      }
  }
  return out;
}

/// Reconstructed F^(k, h_t) at `center` from the grid's stored coefficients.
/// The weight set's offsets must sit on the grid spacing.
inline std::vector<double> apply_weights(const Grid& grid, int center, const StencilWeightSet& ws, int k, int base) {
  if (ws.sources().base != base) throw CapacityError("weight set was built for a different source band");
  if (k < 0 || k >= grid.temporal_order()) throw CapacityError("temporal order not stored on the grid");
  if (ws.sources().last() >= grid.stored_orders()) throw CapacityError("source orders not stored on the grid");
  const double dx = grid.dx();
  std::vector<int> index;
  for (double o : ws.geometry().offsets()) {
    const double steps = o / dx;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
      throw GeometryError("stencil offsets are not aligned with the grid spacing");
    index.push_back(center + static_cast<int>(rounded));
  }
  return ws.reconstruct([&](int j, int order) { return grid.tower(index[static_cast<std::size_t>(j)]).stored(k, order); });
}

/// Memoizes weight sets per (geometry, source band, target set).
class WeightCache {
 public:
  std::shared_ptr<const StencilWeightSet> get(const NeighborhoodGeometry& geom, OrderBand sources,
                                              const std::vector<int>& targets) {
    Key key{std::vector<double>(geom.offsets().begin(), geom.offsets().end()), sources.base, sources.count, targets};
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto ws = std::make_shared<const StencilWeightSet>(build_weights(geom, sources, targets));
    cache_.emplace(std::move(key), ws);
    return ws;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  using Key = std::tuple<std::vector<double>, int, int, std::vector<int>>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const StencilWeightSet>> cache_;
};

}  // namespace imdtm
