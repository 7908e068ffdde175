#include "apcone/series.hpp"

#include <algorithm>
#include <cmath>

namespace apcone {

TruncSeries::TruncSeries(int cap) {
  if (cap < 0) throw DomainError("TruncSeries: cap must be nonnegative");
  c_.assign(static_cast<std::size_t>(cap) + 1, 0.0);
}

TruncSeries::TruncSeries(int cap, std::vector<double> coeffs) : TruncSeries(cap) {
  if (static_cast<int>(coeffs.size()) > cap + 1)
    throw DomainError("TruncSeries: more coefficients than the cap allows");
  std::copy(coeffs.begin(), coeffs.end(), c_.begin());
}

TruncSeries TruncSeries::constant(double c, int cap) {
  TruncSeries s(cap);
  s.c_[0] = c;
  return s;
}

TruncSeries TruncSeries::variable(int cap) {
  TruncSeries s(cap);
  if (cap >= 1) s.c_[1] = 1.0;
  return s;
}

double TruncSeries::eval(double t) const {
  double r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
  return r;
}

void TruncSeries::check_cap(const TruncSeries& o) const {
  if (o.cap() != cap()) throw DomainError("TruncSeries: mismatched caps");
}

TruncSeries& TruncSeries::operator+=(const TruncSeries& o) {
  check_cap(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TruncSeries& TruncSeries::operator-=(const TruncSeries& o) {
  check_cap(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

TruncSeries& TruncSeries::operator*=(double s) {
  for (auto& x : c_) x *= s;
  return *this;
}

TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
  a.check_cap(b);
  const int n = a.cap();
  TruncSeries r(n);
  for (int i = 0; i <= n; ++i) {
    if (a.c_[i] == 0) continue;
    for (int j = 0; i + j <= n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return r;
}

TruncSeries operator/(const TruncSeries& a, const TruncSeries& b) {
  a.check_cap(b);
  if (!(std::abs(b.c_[0]) > 1e-300))
    throw DomainError("TruncSeries: division by a series with zero constant term");
  const int n = a.cap();
  TruncSeries q(n);
  for (int k = 0; k <= n; ++k) {
    double s = a.c_[k];
    for (int j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
    q.c_[k] = s / b.c_[0];
  }
  return q;
}

TruncSeries operator+(TruncSeries a, double s) {
  a[0] += s;
  return a;
}
TruncSeries operator+(double s, TruncSeries a) { return std::move(a) + s; }
TruncSeries operator-(TruncSeries a, double s) {
  a[0] -= s;
  return a;
}
TruncSeries operator-(double s, const TruncSeries& a) { return -a + s; }
TruncSeries operator/(const TruncSeries& a, double s) { return a * (1.0 / s); }
TruncSeries operator/(double s, const TruncSeries& a) {
  return TruncSeries::constant(s, a.cap()) / a;
}

TruncSeries compose(const TruncSeries& a, const TruncSeries& b) {
  if (a.cap() != b.cap()) throw DomainError("compose: mismatched caps");
  if (b[0] != 0) throw DomainError("compose: inner series must have zero constant term");
  TruncSeries r = TruncSeries::constant(a[a.cap()], a.cap());
  for (int d = a.cap() - 1; d >= 0; --d) r = r * b + a[d];
  return r;
}

namespace {

double type2_c(const PlaneSpec& spec, int i) {
  if (spec.kind != PlaneKind::type2) throw DomainError("series: spec is not Type 2");
  spec.validate();
  if (spec.ci(4) == 0) throw DomainError("series: requires c4 != 0");
  return spec.ci(i);
}

TruncSeries pow_series(const TruncSeries& x, int k) {
  TruncSeries r = TruncSeries::constant(1.0, x.cap());
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

using SeriesMat = std::array<std::array<TruncSeries, 3>, 3>;

TruncSeries det3(const SeriesMat& g) {
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

}  // namespace

CurveSeries expand_curve(const PlaneSpec& spec, int cap) {
  const double c1 = type2_c(spec, 1), c2 = type2_c(spec, 2), c3 = type2_c(spec, 3),
               c4 = type2_c(spec, 4), c5 = type2_c(spec, 5);
  const auto b = type2_basis<double>(spec);
  const double b11 = frob_inner(b[0], b[0]), b21 = frob_inner(b[1], b[0]),
               b31 = frob_inner(b[2], b[0]);

  const TruncSeries t = TruncSeries::variable(cap);
  const TruncSeries t2 = t * t, t3 = t2 * t, t6 = pow_series(t, 6), t7 = t6 * t;
  const TruncSeries a = 1.0 - 2 * c1 * t;
  const TruncSeries inner = a + c2 * t2 / (c4 * a + c5 * t) + c3 / c4 * t3;
  const TruncSeries bb = a + c2 / c4 * t2;
  CurveSeries out{a + c2 * t2 / (c4 * inner + c5 * t) + c3 * t3 / ((c4 * bb + c5 * t) * bb),
                  TruncSeries(cap), TruncSeries(cap)};

  const TruncSeries d = 2 * c4 * out.w + 2 * c5 * t;
  const TruncSeries d4 = pow_series(d, 4);
  const TruncSeries g13t = t2 / d - 2 * (2 * c5 * c5 + 1) * t6 / (d4 * d);
  const double r0 = (c4 * b31 + c5 * b21) / (8 * std::pow(c4, 5) * b11) + 1 / (8 * std::pow(c4, 3));
  const TruncSeries r13 = (c5 / c4 * r0 + b21 / (16 * std::pow(c4, 6) * b11)) * t7;
  const TruncSeries r23 = -2 * c5 * t6 / (d4 * out.w) + r0 * t7;
  out.g13 = g13t + r13;
  out.g23 = -(g13t * t) / out.w + r23;
  return out;
}

SeriesMat curve_matrix_series(const PlaneSpec& spec, int cap) {
  const auto cs = expand_curve(spec, cap);
  const auto b = type2_basis<double>(spec);
  const TruncSeries t = TruncSeries::variable(cap);
  SeriesMat g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      g[i][j] = TruncSeries::constant(i == 0 && j == 0 ? 1.0 : 0.0, cap) + b[0](i, j) * t +
                b[1](i, j) * cs.g13 + b[2](i, j) * cs.g23;
  return g;
}

double check_lemma64(const PlaneSpec& spec, int cap) {
  if (cap < 5) throw DomainError("check_lemma64: cap must be at least 5");
  const auto cs = expand_curve(spec, cap);
  const TruncSeries t = TruncSeries::variable(cap);
  const TruncSeries rhs = 1.0 - 2 * spec.ci(1) * t + 2 * spec.ci(2) * cs.g13 -
                          2 * spec.ci(3) * cs.g23;
  double worst = 0;
  for (int d = 0; d <= 5; ++d) worst = std::max(worst, std::abs(cs.w[d] - rhs[d]));
  return worst;
}

TruncSeries det_series(const PlaneSpec& spec, int cap) {
  if (cap < 11) throw DomainError("det_series: cap must be at least 11");
  return det3(curve_matrix_series(spec, cap));
}

TruncSeries det_series_scale(const PlaneSpec& spec, int cap) {
  if (cap < 11) throw DomainError("det_series_scale: cap must be at least 11");
  auto g = curve_matrix_series(spec, cap);
  for (auto& row : g)
    for (auto& e : row)
      for (int d = 0; d <= cap; ++d) e[d] = std::abs(e[d]);
  // all six cofactor products with a plus sign
  return g[0][0] * (g[1][1] * g[2][2] + g[1][2] * g[2][1]) +
         g[0][1] * (g[1][0] * g[2][2] + g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] + g[1][1] * g[2][0]);
}

double moment_curve_check(int cap) {
  if (cap < 7) throw DomainError("moment_curve_check: cap must be at least 7");
  const PlaneSpec spec = PlaneSpec::type2(1, 0, 0, 1, 0);
  const auto g = curve_matrix_series(spec, cap);
  const TruncSeries t = TruncSeries::variable(cap);
  const TruncSeries w = 1.0 - 2 * t;
  const TruncSeries t_of_s = t / (1.0 + 2 * t);

  std::array<std::array<std::vector<double>, 3>, 3> want;
  want[0][0] = {1};
  want[0][1] = {0, 1};
  want[1][1] = {0, 0, 1, 0, 0, 0, -1.0 / 8};
  want[0][2] = {0, 0, -0.5, 0, 0, 0, 1.0 / 16};
  want[1][2] = {0, 0, 0, -0.5, 0, 0, 0, 3.0 / 16};
  want[2][2] = {};
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const TruncSeries e = compose(g[i][j] / w, t_of_s);
      for (int d = 0; d <= 7; ++d) {
        const double expect = d < static_cast<int>(want[i][j].size()) ? want[i][j][d] : 0.0;
        worst = std::max(worst, std::abs(e[d] - expect));
      }
    }
  return worst;
}

}  // namespace apcone
