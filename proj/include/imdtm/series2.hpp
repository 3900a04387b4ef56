#pragma once

// Truncated bivariate (t, x) power series in differential-transform form:
// entry (k, h) holds (1 / (k! h!)) d^k/dt^k d^h/dx^h f at the expansion point.
//
// Every operation is exact up to the smallest bound shared by its operands.
// Nothing is zero-padded: a coefficient that would need data beyond a bound
// is simply not produced.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imdtm/errors.hpp"

namespace imdtm {

template <std::floating_point T>
class BasicSeries2 {
 public:
  using value_type = T;

  BasicSeries2() : BasicSeries2(0, 0) {}

  /// Zero table of (k_max + 1) x (h_max + 1) coefficients.
  BasicSeries2(int k_max, int h_max) : k_max_(k_max), h_max_(h_max) {
    if (k_max < 0 || h_max < 0) throw ShapeError("series bounds must be non-negative");
    coeffs_.assign(static_cast<std::size_t>(k_max + 1) * static_cast<std::size_t>(h_max + 1), T{0});
  }

  /// Rows are temporal orders, columns spatial orders; all rows must have equal length.
  static BasicSeries2 from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    if (rows.size() == 0 || rows.begin()->size() == 0) throw ShapeError("empty coefficient table");
    const auto width = rows.begin()->size();
    BasicSeries2 s(static_cast<int>(rows.size()) - 1, static_cast<int>(width) - 1);
    int k = 0;
    for (const auto& row : rows) {
      if (row.size() != width) throw ShapeError("ragged coefficient table");
      std::copy(row.begin(), row.end(), s.row(k).begin());
      ++k;
    }
    return s;
  }

  static BasicSeries2 constant(T value, int k_max, int h_max) {
    BasicSeries2 s(k_max, h_max);
    s(0, 0) = value;
    return s;
  }

  /// Table of the monomial t^m_t x^m_x (zero if it falls outside the bounds).
  static BasicSeries2 monomial(int m_t, int m_x, int k_max, int h_max) {
    BasicSeries2 s(k_max, h_max);
    if (m_t <= k_max && m_x <= h_max) s(m_t, m_x) = T{1};
    return s;
  }

  int k_max() const noexcept { return k_max_; }
  int h_max() const noexcept { return h_max_; }
  int rows() const noexcept { return k_max_ + 1; }
  int cols() const noexcept { return h_max_ + 1; }

  T& operator()(int k, int h) noexcept { return coeffs_[index(k, h)]; }
  const T& operator()(int k, int h) const noexcept { return coeffs_[index(k, h)]; }

  T& at(int k, int h) {
    check(k, h);
    return (*this)(k, h);
  }
  const T& at(int k, int h) const {
    check(k, h);
    return (*this)(k, h);
  }

  std::span<T> row(int k) noexcept { return {coeffs_.data() + index(k, 0), static_cast<std::size_t>(cols())}; }
  std::span<const T> row(int k) const noexcept {
    return {coeffs_.data() + index(k, 0), static_cast<std::size_t>(cols())};
  }

  std::span<T> data() noexcept { return coeffs_; }
  std::span<const T> data() const noexcept { return coeffs_; }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](T v) { return std::isfinite(v); });
  }

  /// Copy restricted to the leading (k_max + 1) x (h_max + 1) block.
  BasicSeries2 truncated(int k_max, int h_max) const {
    if (k_max > k_max_ || h_max > h_max_) throw ShapeError("truncation bounds exceed the table");
    BasicSeries2 out(k_max, h_max);
    for (int k = 0; k <= k_max; ++k)
      for (int h = 0; h <= h_max; ++h) out(k, h) = (*this)(k, h);
    return out;
  }

  /// Spatial series of temporal layer k evaluated at offset x.
  T evaluate_x(int k, T x) const noexcept {
    T acc{0};
    for (int h = h_max_; h >= 0; --h) acc = acc * x + (*this)(k, h);
    return acc;
  }

  bool operator==(const BasicSeries2&) const = default;

 private:
  std::size_t index(int k, int h) const noexcept {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(h_max_ + 1) + static_cast<std::size_t>(h);
  }

  void check(int k, int h) const {
    if (k < 0 || k > k_max_ || h < 0 || h > h_max_)
      throw ShapeError("coefficient (" + std::to_string(k) + "," + std::to_string(h) + ") out of bounds");
  }

  int k_max_;
  int h_max_;
  std::vector<T> coeffs_;
};

using Series2 = BasicSeries2<double>;

namespace series {

namespace detail {

template <typename T>
BasicSeries2<T> finite_or_throw(BasicSeries2<T> s, const char* op) {
  if (!s.all_finite()) throw DomainError(std::string(op) + ": non-finite coefficient produced");
  return s;
}

// For the self-referential recurrences a derivative direction with a nonzero
// index has to be picked. The temporal index is used whenever k > 0, the
// spatial one otherwise. The sum then runs over l_a in [0, k_a - 1] with the
// other index unrestricted, weighted by (k_a - l_a).
struct Direction {
  bool temporal;
  int order;  // k_a

  Direction(int k, int h) : temporal(k > 0), order(k > 0 ? k : h) {}

  int lk_end(int k) const noexcept { return temporal ? k : k + 1; }
  int lh_end(int h) const noexcept { return temporal ? h + 1 : h; }
  int weight(int k, int h, int lk, int lh) const noexcept { return temporal ? k - lk : h - lh; }
};

template <typename T>
void require_positive_leading(const BasicSeries2<T>& a, const char* op) {
  if (!(a(0, 0) > T{0})) throw DomainError(std::string(op) + ": leading coefficient must be positive");
}

}  // namespace detail

template <typename T>
BasicSeries2<T> add(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  if (a.k_max() != b.k_max() || a.h_max() != b.h_max()) throw ShapeError("add: truncation bounds differ");
  BasicSeries2<T> out(a.k_max(), a.h_max());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] + y[i];
  return detail::finite_or_throw(std::move(out), "add");
}

template <typename T>
BasicSeries2<T> subtract(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  if (a.k_max() != b.k_max() || a.h_max() != b.h_max()) throw ShapeError("subtract: truncation bounds differ");
  BasicSeries2<T> out(a.k_max(), a.h_max());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] - y[i];
  return detail::finite_or_throw(std::move(out), "subtract");
}

template <typename T>
BasicSeries2<T> scale(const BasicSeries2<T>& a, T c) {
  BasicSeries2<T> out = a;
  for (auto& v : out.data()) v *= c;
  return detail::finite_or_throw(std::move(out), "scale");
}

/// Derivative d^r_t/dt^r_t d^r_x/dx^r_x. Bounds shrink by (r_t, r_x).
template <typename T>
BasicSeries2<T> shift_deriv(const BasicSeries2<T>& a, int r_t, int r_x) {
  if (r_t < 0 || r_x < 0) throw EmptyResultError("shift_deriv: negative derivative order");
  if (r_t > a.k_max() || r_x > a.h_max()) throw EmptyResultError("shift_deriv: derivative order exceeds bounds");
  BasicSeries2<T> out(a.k_max() - r_t, a.h_max() - r_x);
  for (int k = 0; k <= out.k_max(); ++k) {
    T fk{1};
    for (int i = 1; i <= r_t; ++i) fk *= static_cast<T>(k + i);
    for (int h = 0; h <= out.h_max(); ++h) {
      T fh{1};
      for (int i = 1; i <= r_x; ++i) fh *= static_cast<T>(h + i);
      out(k, h) = fk * fh * a(k + r_t, h + r_x);
    }
  }
  return detail::finite_or_throw(std::move(out), "shift_deriv");
}

/// Two-dimensional Cauchy product.
template <typename T>
BasicSeries2<T> mul(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  const int K = std::min(a.k_max(), b.k_max());
  const int H = std::min(a.h_max(), b.h_max());
  BasicSeries2<T> out(K, H);
  for (int k = 0; k <= K; ++k)
    for (int h = 0; h <= H; ++h) {
      T acc{0};
      for (int lk = 0; lk <= k; ++lk)
        for (int lh = 0; lh <= h; ++lh) acc += a(lk, lh) * b(k - lk, h - lh);
      out(k, h) = acc;
    }
  return detail::finite_or_throw(std::move(out), "mul");
}

template <typename T>
BasicSeries2<T> div(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  if (b(0, 0) == T{0}) throw DomainError("div: divisor has zero leading coefficient");
  const int K = std::min(a.k_max(), b.k_max());
  const int H = std::min(a.h_max(), b.h_max());
  BasicSeries2<T> w(K, H);
  const T inv = T{1} / b(0, 0);
  for (int k = 0; k <= K; ++k)
    for (int h = 0; h <= H; ++h) {
      T acc = a(k, h);
      for (int lk = 0; lk <= k; ++lk)
        for (int lh = 0; lh <= h; ++lh) {
          if (lk == 0 && lh == 0) continue;
          acc -= b(lk, lh) * w(k - lk, h - lh);
        }
      w(k, h) = acc * inv;
    }
  return detail::finite_or_throw(std::move(w), "div");
}

template <typename T>
BasicSeries2<T> sqrt(const BasicSeries2<T>& a) {
  detail::require_positive_leading(a, "sqrt");
  BasicSeries2<T> w(a.k_max(), a.h_max());
  w(0, 0) = std::sqrt(a(0, 0));
  const T inv = T{1} / (T{2} * w(0, 0));
  for (int k = 0; k <= a.k_max(); ++k)
    for (int h = 0; h <= a.h_max(); ++h) {
      if (k == 0 && h == 0) continue;
      T acc = a(k, h);
      for (int lk = 0; lk <= k; ++lk)
        for (int lh = 0; lh <= h; ++lh) {
          if ((lk == 0 && lh == 0) || (lk == k && lh == h)) continue;
          acc -= w(lk, lh) * w(k - lk, h - lh);
        }
      w(k, h) = acc * inv;
    }
  return detail::finite_or_throw(std::move(w), "sqrt");
}

template <typename T>
BasicSeries2<T> exp(const BasicSeries2<T>& a) {
  BasicSeries2<T> w(a.k_max(), a.h_max());
  w(0, 0) = std::exp(a(0, 0));
  for (int k = 0; k <= a.k_max(); ++k)
    for (int h = 0; h <= a.h_max(); ++h) {
      if (k == 0 && h == 0) continue;
      const detail::Direction dir(k, h);
      T acc{0};
      for (int lk = 0; lk < dir.lk_end(k); ++lk)
        for (int lh = 0; lh < dir.lh_end(h); ++lh)
          acc += static_cast<T>(dir.weight(k, h, lk, lh)) * w(lk, lh) * a(k - lk, h - lh);
      w(k, h) = acc / static_cast<T>(dir.order);
    }
  return detail::finite_or_throw(std::move(w), "exp");
}

template <typename T>
BasicSeries2<T> log(const BasicSeries2<T>& a) {
  detail::require_positive_leading(a, "log");
  BasicSeries2<T> w(a.k_max(), a.h_max());
  w(0, 0) = std::log(a(0, 0));
  const T inv = T{1} / a(0, 0);
  for (int k = 0; k <= a.k_max(); ++k)
    for (int h = 0; h <= a.h_max(); ++h) {
      if (k == 0 && h == 0) continue;
      const detail::Direction dir(k, h);
      T acc{0};
      for (int lk = 0; lk < dir.lk_end(k); ++lk)
        for (int lh = 0; lh < dir.lh_end(h); ++lh) {
          if (lk == 0 && lh == 0) continue;
          acc += static_cast<T>(dir.weight(k, h, lk, lh)) * a(lk, lh) * w(k - lk, h - lh);
        }
      w(k, h) = (a(k, h) - acc / static_cast<T>(dir.order)) * inv;
    }
  return detail::finite_or_throw(std::move(w), "log");
}

/// Real power y^s on the principal branch.
template <typename T>
BasicSeries2<T> pow(const BasicSeries2<T>& a, T s) {
  detail::require_positive_leading(a, "pow");
  BasicSeries2<T> w(a.k_max(), a.h_max());
  w(0, 0) = std::pow(a(0, 0), s);
  const T inv = T{1} / a(0, 0);
  for (int k = 0; k <= a.k_max(); ++k)
    for (int h = 0; h <= a.h_max(); ++h) {
      if (k == 0 && h == 0) continue;
      const detail::Direction dir(k, h);
      T acc{0};
      for (int lk = 0; lk < dir.lk_end(k); ++lk)
        for (int lh = 0; lh < dir.lh_end(h); ++lh) {
          if (lk == 0 && lh == 0) continue;
          const T wt = static_cast<T>(dir.weight(k, h, lk, lh));
          acc += wt * (s * w(lk, lh) * a(k - lk, h - lh) - a(lk, lh) * w(k - lk, h - lh));
        }
      w(k, h) = (s * w(0, 0) * a(k, h) + acc / static_cast<T>(dir.order)) * inv;
    }
  return detail::finite_or_throw(std::move(w), "pow");
}

/// Returns (sin(a), cos(a)); the two recurrences feed each other.
template <typename T>
std::pair<BasicSeries2<T>, BasicSeries2<T>> sin_cos(const BasicSeries2<T>& a) {
  BasicSeries2<T> s(a.k_max(), a.h_max());
  BasicSeries2<T> c(a.k_max(), a.h_max());
  s(0, 0) = std::sin(a(0, 0));
  c(0, 0) = std::cos(a(0, 0));
  for (int k = 0; k <= a.k_max(); ++k)
    for (int h = 0; h <= a.h_max(); ++h) {
      if (k == 0 && h == 0) continue;
      const detail::Direction dir(k, h);
      T acc_s{0};
      T acc_c{0};
      for (int lk = 0; lk < dir.lk_end(k); ++lk)
        for (int lh = 0; lh < dir.lh_end(h); ++lh) {
          const T wy = static_cast<T>(dir.weight(k, h, lk, lh)) * a(k - lk, h - lh);
          acc_s += wy * c(lk, lh);
          acc_c += wy * s(lk, lh);
        }
      s(k, h) = acc_s / static_cast<T>(dir.order);
      c(k, h) = -acc_c / static_cast<T>(dir.order);
    }
  return {detail::finite_or_throw(std::move(s), "sin"), detail::finite_or_throw(std::move(c), "cos")};
}

}  // namespace series

template <typename T>
BasicSeries2<T> operator+(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  return series::add(a, b);
}
template <typename T>
BasicSeries2<T> operator-(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  return series::subtract(a, b);
}
template <typename T>
BasicSeries2<T> operator-(const BasicSeries2<T>& a) {
  return series::scale(a, T{-1});
}
template <typename T>
BasicSeries2<T> operator*(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  return series::mul(a, b);
}
template <typename T>
BasicSeries2<T> operator*(T c, const BasicSeries2<T>& a) {
  return series::scale(a, c);
}
template <typename T>
BasicSeries2<T> operator/(const BasicSeries2<T>& a, const BasicSeries2<T>& b) {
  return series::div(a, b);
}

}  // namespace imdtm
