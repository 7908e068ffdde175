#include "apcone/slowcurve.hpp"

#include <algorithm>
#include <cmath>

namespace apcone {

namespace {

struct Coeffs {
  double c1, c2, c3, c4, c5;
};

Coeffs type2_coeffs(const PlaneSpec& spec) {
  if (spec.kind != PlaneKind::type2) throw DomainError("slow curve: spec is not Type 2");
  spec.validate();
  if (spec.ci(4) == 0) throw DomainError("slow curve: requires c4 != 0");
  return {spec.ci(1), spec.ci(2), spec.ci(3), spec.ci(4), spec.ci(5)};
}

template <class T>
T det3(const SymMat<T>& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) -
         m(0, 1) * (m(0, 1) * m(2, 2) - m(1, 2) * m(0, 2)) +
         m(0, 2) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
}

template <class T>
void check_denominator(const T& d, const T& d0) {
  using std::abs;
  if (abs(d) <= T(1e-8) * abs(d0)) throw DomainError("slow curve: vanishing denominator");
}

}  // namespace

template <class T>
BasisProducts<T> basis_products(const PlaneSpec& spec) {
  const auto b = type2_basis<T>(spec);
  return {frob_inner(b[0], b[0]), frob_inner(b[1], b[0]), frob_inner(b[2], b[0])};
}

template <class T>
std::array<T, 6> denominator_ratios(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const T c1(k.c1), c2(k.c2), c3(k.c3), c4(k.c4), c5(k.c5);
  const T a = T(1) - T(2) * c1 * t;
  const T d1 = c4 * a + c5 * t;
  const T inner = a + c2 * t * t / d1 + c3 * t * t * t / c4;
  const T d2 = c4 * inner + c5 * t;
  const T b = a + c2 * t * t / c4;
  const T d3 = c4 * b + c5 * t;
  const T w = a + c2 * t * t / d2 + c3 * t * t * t / (d3 * b);
  const T big_d = T(2) * c4 * w + T(2) * c5 * t;
  return {d1 / c4, d2 / c4, d3 / c4, b, w, big_d / (T(2) * c4)};
}

template <class T>
T w_rational(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const T c1(k.c1), c2(k.c2), c3(k.c3), c4(k.c4), c5(k.c5);
  const T a = T(1) - T(2) * c1 * t;
  const T d1 = c4 * a + c5 * t;
  check_denominator(d1, c4);
  const T inner = a + c2 * t * t / d1 + c3 * t * t * t / c4;
  const T d2 = c4 * inner + c5 * t;
  check_denominator(d2, c4);
  const T b = a + c2 * t * t / c4;
  check_denominator(b, T(1));
  const T d3 = c4 * b + c5 * t;
  check_denominator(d3, c4);
  return a + c2 * t * t / d2 + c3 * t * t * t / (d3 * b);
}

template <class T>
CurvePoint<T> curve_point(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const T c4(k.c4), c5(k.c5);
  const auto bp = basis_products<T>(spec);

  CurvePoint<T> cp;
  cp.t = t;
  cp.w = w_rational(spec, t);
  check_denominator(cp.w, T(1));
  const T d = T(2) * c4 * cp.w + T(2) * c5 * t;
  check_denominator(d, T(2) * c4);
  const T t6 = ipow(t, 6), t7 = t6 * t;
  const T d4 = ipow(d, 4);

  cp.g13_tilde = t * t / d - T(2) * (T(2) * c5 * c5 + T(1)) * t6 / (d4 * d);
  cp.r0 = (c4 * bp.b31 + c5 * bp.b21) / (T(8) * ipow(c4, 5) * bp.b11) + T(1) / (T(8) * ipow(c4, 3));
  cp.r13 = c5 / c4 * cp.r0 * t7 + bp.b21 * t7 / (T(16) * ipow(c4, 6) * bp.b11);
  cp.r23 = T(-2) * c5 * t6 / (d4 * cp.w) + cp.r0 * t7;
  cp.g13 = cp.g13_tilde + cp.r13;
  cp.g23 = -cp.g13_tilde * t / cp.w + cp.r23;
  cp.h = T(2) * t6 / (d4 * cp.w);

  const auto b = type2_basis<T>(spec);
  SymMat<T> g = intersection_point<T>();
  g.axpy(t, b[0]);
  g.axpy(cp.g13, b[1]);
  g.axpy(cp.g23, b[2]);
  cp.G = conjugate(spec, g);
  return cp;
}

template <class T>
SymMat<T> psd_correction(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const T c4(k.c4), c5(k.c5);
  const auto bp = basis_products<T>(spec);
  const auto cp = curve_point(spec, t);
  const T t7 = ipow(t, 7);
  const T kk = bp.b21 * t7 / (T(8) * ipow(c4, 5) * bp.b11);
  SymMat<T> m(3);
  m.set(1, 0, -t7 / (T(8) * ipow(c4, 4)));
  m.set(1, 1, cp.h - kk);
  m.set(2, 0, c4 * cp.h);
  m.set(2, 1, c5 * cp.h - c5 * kk - bp.b31 * t7 / (T(8) * ipow(c4, 4) * bp.b11));
  m.set(2, 2, cp.g13 * cp.g13 / cp.w);
  return conjugate(spec, m);
}

template <class T>
SymMat<T> psd_projection_formula(const PlaneSpec& spec, const T& t) {
  return curve_point(spec, t).G + psd_correction(spec, t);
}

template <class T>
T ap_shift(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const auto bp = basis_products<T>(spec);
  return t - ipow(t, 7) / (T(4) * ipow(T(k.c4), 4) * bp.b11);
}

template <class T>
SymMat<T> ap_image_formula(const PlaneSpec& spec, const T& t) {
  return curve_point(spec, ap_shift(spec, t)).G;
}

template <class T>
double residual_order(const std::function<SymMat<T>(const T&)>& f,
                      const std::function<SymMat<T>(const T&)>& g, const T& t0, int halvings) {
  using std::log2;
  if (!(t0 > 0)) throw DomainError("residual_order: t0 must be positive");
  if (halvings < 2) throw DomainError("residual_order: need at least 2 halvings");
  std::vector<T> d;
  T t = t0;
  for (int j = 0; j <= halvings; ++j, t /= 2) {
    d.push_back(frob_norm(f(t) - g(t)));
    if (d.back() <= T(100) * eps<T>())
      throw NumericalError("residual_order: difference is at rounding level; enlarge t0 or precision");
  }
  double s = 0;
  for (int j = 0; j < halvings; ++j) s += to_double(log2(d[j] / d[j + 1]));
  return s / halvings;
}

double valid_t_max(const PlaneSpec& spec) {
  type2_coeffs(spec);
  auto ok = [&](double td) {
    const HighPrec t(td);
    try {
      for (const auto& r : denominator_ratios(spec, t))
        if (!(r > HighPrec(0.1))) return false;
      return det3(curve_point(spec, t).G) > 0;
    } catch (const DomainError&) {
      return false;
    }
  };
  constexpr int kGrid = 200;
  constexpr double kTop = 0.2;
  double lo = 0, hi = -1;
  for (int j = 1; j <= kGrid; ++j) {
    const double t = kTop * j / kGrid;
    if (!ok(t)) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0) return kTop;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

template <class T>
std::array<T, 3> slowest_field(const AffineSubspace<T>& e, const std::array<T, 3>& x) {
  const RankOneParam<T> rx(x);
  const auto m = m_matrix(e, rx);
  const auto g = grad_half_dist2_psi(e, rx);
  std::vector<T> a;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) a.push_back(m[k][i]);
  const auto f = solve_dense<T>(a, std::vector<T>(g.begin(), g.end()));
  return {f[0], f[1], f[2]};
}

template <class T>
SlowestPoint<T> newton_slowest_point(const AffineSubspace<T>& e, const T& t,
                                     std::optional<std::array<T, 3>> guess, std::optional<T> tol) {
  using std::abs;
  using std::cbrt;
  using std::max;
  if (e.ambient() != 3 || e.dim() != 3)
    throw DimensionError("newton_slowest_point: E must be a 3-plane in S^3");
  const T target = tol ? *tol : precision_traits<T>::newton_tol();

  {
    const auto m = m_matrix(e, RankOneParam<T>({T(1), T(0), T(0)}));
    const T det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                  m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    T scale(1);
    for (const auto& b : e.basis()) scale *= frob_norm(b);
    if (abs(det) <= T(1e-10) * scale)
      throw DomainError("newton_slowest_point: det M(x_*) = 0");
  }

  std::array<T, 3> x = guess ? *guess : std::array<T, 3>{T(1), t, T(0)};
  x[1] = t;
  auto resid = [&](const std::array<T, 3>& y) {
    const auto f = slowest_field(e, y);
    return std::array<T, 2>{f[1], f[2]};
  };
  auto norm = [](const std::array<T, 2>& r) { return max(abs(r[0]), abs(r[1])); };

  SlowestPoint<T> out;
  auto r = resid(x);
  int it = 0;
  for (; norm(r) > target; ++it) {
    if (it == 50) throw NumericalError("newton_slowest_point: no convergence in 50 steps");
    // Jacobian of (F2, F3) in (x1, x3)
    T jac[2][2];
    const int var[2] = {0, 2};
    for (int c = 0; c < 2; ++c) {
      const T h = cbrt(eps<T>()) * max(T(1), abs(x[var[c]]));
      auto xp = x, xm = x;
      xp[var[c]] += h;
      xm[var[c]] -= h;
      const auto rp = resid(xp), rm = resid(xm);
      for (int q = 0; q < 2; ++q) jac[q][c] = (rp[q] - rm[q]) / (T(2) * h);
    }
    const std::vector<T> a = {jac[0][0], jac[0][1], jac[1][0], jac[1][1]};
    const auto step = solve_dense<T>(a, std::vector<T>{-r[0], -r[1]});
    T lambda(1);
    bool improved = false;
    for (int k = 0; k < 30; ++k, lambda /= 2) {
      auto y = x;
      y[0] += lambda * step[0];
      y[2] += lambda * step[1];
      if (y[0] == 0) continue;
      const auto ry = resid(y);
      if (norm(ry) < norm(r)) {
        x = y;
        r = ry;
        improved = true;
        break;
      }
    }
    if (!improved) throw NumericalError("newton_slowest_point: damped step made no progress");
  }
  out.x = x;
  out.iterations = it;
  out.residual = norm(r);
  const auto f = slowest_field(e, x);
  const auto pt = coords_in(e, psi(RankOneParam<T>(x)));
  for (int i = 0; i < 3; ++i) out.p[i] = pt[i] + f[i];
  return out;
}

template <class T>
SlowestPoint<T> newton_slowest_point(const PlaneSpec& spec, const T& t) {
  const auto k = type2_coeffs(spec);
  const auto plane = build_plane<T>(spec);
  return newton_slowest_point<T>(plane.e, t, std::array<T, 3>{T(1), t, -t * t / (T(2) * T(k.c4))});
}

PerturbGain perturb_gain(const PlaneSpec& spec) {
  type2_coeffs(spec);
  const auto c = orthogonalize(build_plane<double>(spec).e).basis();
  auto tilde = [](SymMat<double> m) {
    for (int j = 0; j < 3; ++j) m.set(0, j, 0.0);
    return m;
  };
  const auto t2 = tilde(c[1]), t3 = tilde(c[2]);
  const double n2 = frob_norm(c[1]), n3 = frob_norm(c[2]);
  PerturbGain g;
  g.R[0][0] = 1 - frob_inner(t2, t2) / (n2 * n2);
  g.R[0][1] = g.R[1][0] = -frob_inner(t2, t3) / (n2 * n3);
  g.R[1][1] = 1 - frob_inner(t3, t3) / (n3 * n3);
  const double mean = 0.5 * (g.R[0][0] + g.R[1][1]);
  const double rad = std::hypot(0.5 * (g.R[0][0] - g.R[1][1]), g.R[0][1]);
  g.spectral_norm = std::max(std::abs(mean + rad), std::abs(mean - rad));
  return g;
}

TubeReport tube_check(const PlaneSpec& spec, double t0, double beta, double gamma, long steps,
                      double eps_tube) {
  const auto k = type2_coeffs(spec);
  TubeReport rep;
  rep.t_final = t0;
  if (t0 == 0) {
    rep.passed = true;
    return rep;
  }
  if (!(t0 > 0)) throw DomainError("tube_check: t0 must be nonnegative");
  if (steps < 1) throw DomainError("tube_check: steps must be positive");

  const auto plane = build_plane<double>(spec);
  const auto c = orthogonalize(plane.e).basis();
  SymMat<double> offset = beta * c[1];
  offset.axpy(gamma, c[2]);
  if (!(frob_norm(offset) < eps_tube))
    throw DomainError("tube_check: ||beta C2 + gamma C3|| must be below eps");

  const SymMat<double> ustar = intersection_point<double>();
  const double c1n2 = frob_inner(c[0], c[0]);
  const double rate = 1.0 / (4 * std::pow(k.c4, 4) * c1n2);
  auto p1 = [&](double t) { return frob_inner(curve_point(spec, t).G - ustar, c[0]) / c1n2; };
  // inverse of p1 by Newton, starting from the predicted parameter
  auto invert = [&](double a, double start) {
    double s = start;
    for (int it = 0; it < 50; ++it) {
      const double f = p1(s) - a;
      const double h = 1e-7 * std::max(s, 1e-12);
      const double df = (p1(s + h) - p1(s - h)) / (2 * h);
      if (!(std::abs(df) > 0)) break;
      const double ds = f / df;
      s -= ds;
      if (std::abs(ds) <= 1e-14 * std::abs(s)) {
        // one polishing step
        return s - (p1(s) - a) / df;
      }
    }
    throw NumericalError("tube_check: cannot recover the curve parameter (left the chart)");
  };

  SymMat<double> u = curve_point(spec, t0).G;
  u.axpy(std::pow(t0, 7), offset);
  double t = t0;
  std::vector<double> bracket;
  for (long step = 1; step <= steps; ++step) {
    u = ap_step(plane.e, u).next;
    const double predicted = t - rate * std::pow(t, 7);
    const double a = frob_inner(u - ustar, c[0]) / c1n2;
    const double s = invert(a, predicted);
    rep.steps = step;
    if (!(s > 0 && s < t)) {
      rep.failure = "curve parameter did not decrease at step " + std::to_string(step);
      return rep;
    }
    const double trans = frob_norm(u - curve_point(spec, s).G) / std::pow(s, 7);
    rep.max_transverse = std::max(rep.max_transverse, trans);
    if (!(trans < eps_tube)) {
      rep.failure = "left the tube at step " + std::to_string(step);
      return rep;
    }
    bracket.push_back(std::abs(s - predicted) / std::pow(t, 8));
    t = s;
  }
  rep.t_final = t;
  const std::size_t calib = std::max<std::size_t>(1, bracket.size() / 10);
  rep.fitted_k = 2 * *std::max_element(bracket.begin(), bracket.begin() + calib);
  rep.max_bracket = *std::max_element(bracket.begin(), bracket.end());
  if (rep.max_bracket > rep.fitted_k) {
    rep.failure = "parameter step left the t - c t^7 +- K t^8 bracket";
    return rep;
  }
  rep.passed = true;
  return rep;
}

#define APCONE_INSTANTIATE(T)                                                              \
  template BasisProducts<T> basis_products<T>(const PlaneSpec&);                           \
  template std::array<T, 6> denominator_ratios<T>(const PlaneSpec&, const T&);            \
  template T w_rational<T>(const PlaneSpec&, const T&);                                    \
  template CurvePoint<T> curve_point<T>(const PlaneSpec&, const T&);                       \
  template SymMat<T> psd_correction<T>(const PlaneSpec&, const T&);                        \
  template SymMat<T> psd_projection_formula<T>(const PlaneSpec&, const T&);                \
  template T ap_shift<T>(const PlaneSpec&, const T&);                                      \
  template SymMat<T> ap_image_formula<T>(const PlaneSpec&, const T&);                      \
  template double residual_order<T>(const std::function<SymMat<T>(const T&)>&,             \
                                    const std::function<SymMat<T>(const T&)>&, const T&, int); \
  template std::array<T, 3> slowest_field<T>(const AffineSubspace<T>&, const std::array<T, 3>&); \
  template SlowestPoint<T> newton_slowest_point<T>(const AffineSubspace<T>&, const T&,     \
                                                   std::optional<std::array<T, 3>>,        \
                                                   std::optional<T>);                      \
  template SlowestPoint<T> newton_slowest_point<T>(const PlaneSpec&, const T&);

APCONE_INSTANTIATE(double)
APCONE_INSTANTIATE(HighPrec)

}  // namespace apcone
