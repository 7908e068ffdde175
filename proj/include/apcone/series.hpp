#pragma once

#include <array>
#include <vector>

#include "apcone/planes.hpp"

namespace apcone {

// Power series in t truncated after degree `cap`.
class TruncSeries {
 public:
  static constexpr int kDefaultCap = 12;

  TruncSeries() : TruncSeries(kDefaultCap) {}
  explicit TruncSeries(int cap);
  TruncSeries(int cap, std::vector<double> coeffs);  // missing entries are 0
  static TruncSeries constant(double c, int cap = kDefaultCap);
  static TruncSeries variable(int cap = kDefaultCap);  // t

  int cap() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int d) const { return d <= cap() ? c_[d] : 0.0; }
  double& operator[](int d) { return c_.at(d); }
  const std::vector<double>& coeffs() const { return c_; }
  double eval(double t) const;  // Horner

  TruncSeries& operator+=(const TruncSeries& o);
  TruncSeries& operator-=(const TruncSeries& o);
  TruncSeries& operator*=(double s);
  friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
  friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }
  friend TruncSeries operator-(TruncSeries a) { return a *= -1.0; }
  friend TruncSeries operator*(TruncSeries a, double s) { return a *= s; }
  friend TruncSeries operator*(double s, TruncSeries a) { return a *= s; }
  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b);
  // Throws DomainError if b has a zero constant term.
  friend TruncSeries operator/(const TruncSeries& a, const TruncSeries& b);

 private:
  void check_cap(const TruncSeries& o) const;
  std::vector<double> c_;
};

TruncSeries operator+(TruncSeries a, double s);
TruncSeries operator+(double s, TruncSeries a);
TruncSeries operator-(TruncSeries a, double s);
TruncSeries operator-(double s, const TruncSeries& a);
TruncSeries operator/(const TruncSeries& a, double s);
TruncSeries operator/(double s, const TruncSeries& a);

// a(b(t)); b must have zero constant term.
TruncSeries compose(const TruncSeries& a, const TruncSeries& b);

struct CurveSeries {
  TruncSeries w, g13, g23;
};

CurveSeries expand_curve(const PlaneSpec& spec, int cap = TruncSeries::kDefaultCap);

// Entries (row-major, full 3x3) of G(t) as series, in the unrotated frame.
std::array<std::array<TruncSeries, 3>, 3> curve_matrix_series(const PlaneSpec& spec,
                                                               int cap = TruncSeries::kDefaultCap);

// max over degrees 0..5 of |w - (1 - 2c1 t + 2c2 g13 - 2c3 g23)|
double check_lemma64(const PlaneSpec& spec, int cap = TruncSeries::kDefaultCap);

// det G(t) by cofactor expansion over series. cap must be at least 11.
TruncSeries det_series(const PlaneSpec& spec, int cap = TruncSeries::kDefaultCap);

// Rounding scale for det_series: the same cofactor expansion applied to
// coefficientwise absolute values.
TruncSeries det_series_scale(const PlaneSpec& spec, int cap = TruncSeries::kDefaultCap);

// Moment-curve instance c1 = c4 = 1: expands G(t)/(1-2t), substitutes
// t = s/(1+2s) and returns the largest deviation through degree 7 from the
// moment pattern plus its s^6/s^7 corrections.
double moment_curve_check(int cap = 8);

}  // namespace apcone
