#pragma once

#include <cmath>
#include <random>

#include "apcone/symcore.hpp"

namespace apcone::test {

inline double max_entry_diff(const SymMat<double>& a, const SymMat<double>& b) {
  double m = 0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline SymMat<double> random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  SymMat<double> m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, g(rng));
  return m;
}

inline SymMat<double> rows(std::vector<std::vector<double>> r) {
  return SymMat<double>::from_rows(r);
}

}  // namespace apcone::test
