#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>

namespace apcone {

// 50 decimal digits. Expression templates are off so that `auto` and Eigen
// behave like they do for double.
using HighPrec = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

template <class T>
struct precision_traits;

template <>
struct precision_traits<double> {
  // eigenvalues at or below rank_tol * max(1, lambda_max) are dropped by
  // the PSD projection
  static double rank_tol() { return 1e-12; }
  static double newton_tol() { return 1e-12; }
};

template <>
struct precision_traits<HighPrec> {
  static HighPrec rank_tol() {
    return HighPrec(1e4) * std::numeric_limits<HighPrec>::epsilon();
  }
  static HighPrec newton_tol() { return HighPrec("1e-40"); }
};

template <class T>
T eps() {
  return std::numeric_limits<T>::epsilon();
}

template <class T>
T ipow(T x, int n) {
  T r(1);
  bool neg = n < 0;
  unsigned m = neg ? unsigned(-n) : unsigned(n);
  while (m) {
    if (m & 1u) r *= x;
    x *= x;
    m >>= 1;
  }
  return neg ? T(1) / r : r;
}

inline double to_double(double x) { return x; }
inline double to_double(const HighPrec& x) { return x.convert_to<double>(); }

}  // namespace apcone
