#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "imdtm/series2.hpp"

namespace imdtm {

inline void PrintTo(const Series2& s, std::ostream* os) {
  *os << "Series2(" << s.k_max() << "," << s.h_max() << ") {";
  for (int k = 0; k <= s.k_max(); ++k) {
    *os << (k ? ", {" : "{");
    for (int h = 0; h <= s.h_max(); ++h) *os << (h ? ", " : "") << s(k, h);
    *os << "}";
  }
  *os << "}";
}

}  // namespace imdtm

namespace imdtm::test {

inline double rel_diff(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double binomial(double s, int n) {
  double c = 1.0;
  for (int i = 0; i < n; ++i) c *= (s - i) / (i + 1);
  return c;
}

inline Series2 random_series(std::mt19937& rng, int k_max, int h_max, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Series2 s(k_max, h_max);
  for (double& v : s.data()) v = u(rng);
  return s;
}

/// Max over entries of the relative difference, with denominators floored at `floor`.
inline double max_rel_diff(const Series2& a, const Series2& b, double floor = 1.0) {
  EXPECT_EQ(a.k_max(), b.k_max());
  EXPECT_EQ(a.h_max(), b.h_max());
  double worst = 0.0;
  for (int k = 0; k <= std::min(a.k_max(), b.k_max()); ++k)
    for (int h = 0; h <= std::min(a.h_max(), b.h_max()); ++h) worst = std::max(worst, rel_diff(a(k, h), b(k, h), floor));
  return worst;
}

}  // namespace imdtm::test
