#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "apcone/apengine.hpp"
#include "apcone/planes.hpp"

namespace apcone {

// Point of the rational slowest curve G(t) of a Type-2 plane with c4 != 0.
template <class T>
struct CurvePoint {
  T t{}, w{};
  T g13_tilde{}, r0{}, r13{}, r23{};
  T g13{}, g23{}, h{};
  SymMat<T> G;  // U_* + t B1 + g13 B2 + g23 B3, in the frame of `spec`
};

// Inner products of the Type-2 basis used throughout the curve formulas.
template <class T>
struct BasisProducts {
  T b11{};  // ||B1||^2
  T b21{};  // <B2, B1>
  T b31{};  // <B3, B1>
};

template <class T>
BasisProducts<T> basis_products(const PlaneSpec& spec);

// Nested rational w(t). Throws DomainError when a denominator vanishes.
template <class T>
T w_rational(const PlaneSpec& spec, const T& t);

// Every denominator of w and of the curve divided by its value at t = 0.
template <class T>
std::array<T, 6> denominator_ratios(const PlaneSpec& spec, const T& t);

template <class T>
CurvePoint<T> curve_point(const PlaneSpec& spec, const T& t);

// Correction added to G(t) to obtain P_psd(G(t)) up to O(t^8), in the frame
// of `spec`.
template <class T>
SymMat<T> psd_correction(const PlaneSpec& spec, const T& t);

template <class T>
SymMat<T> psd_projection_formula(const PlaneSpec& spec, const T& t);

// t - t^7 / (4 c4^4 ||B1||^2)
template <class T>
T ap_shift(const PlaneSpec& spec, const T& t);

template <class T>
SymMat<T> ap_image_formula(const PlaneSpec& spec, const T& t);

// Mean of log2(|f-g|(t_j) / |f-g|(t_{j+1})) over t_j = t0 / 2^j,
// j = 0..halvings-1. Throws NumericalError when a difference is within
// 100 eps of zero, since the estimate would then measure rounding.
template <class T>
double residual_order(const std::function<SymMat<T>(const T&)>& f,
                      const std::function<SymMat<T>(const T&)>& g, const T& t0, int halvings);

// Largest t <= 0.2 (found on a grid, refined by bisection) where det G > 0
// and every denominator keeps at least 10% of its value at t = 0.
double valid_t_max(const PlaneSpec& spec);

template <class T>
struct SlowestPoint {
  std::array<T, 3> x{};
  std::array<T, 3> p{};
  int iterations = 0;
  T residual{};  // max |F_2|, |F_3| at the solution
};

// F(x) = M(x)^{-1} grad 1/2 d^2(psi(x), E)
template <class T>
std::array<T, 3> slowest_field(const AffineSubspace<T>& e, const std::array<T, 3>& x);

// Solves F_2 = F_3 = 0 over (x1, x3) with x2 = t by damped Newton with a
// finite-difference Jacobian, then returns p = coords(P_E psi(x)) + F(x).
template <class T>
SlowestPoint<T> newton_slowest_point(const AffineSubspace<T>& e, const T& t,
                                     std::optional<std::array<T, 3>> guess = std::nullopt,
                                     std::optional<T> tol = std::nullopt);

// Same, on the plane of a Type-2 spec, starting from (1, t, -t^2/(2 c4)).
template <class T>
SlowestPoint<T> newton_slowest_point(const PlaneSpec& spec, const T& t);

struct PerturbGain {
  std::array<std::array<double, 2>, 2> R{};
  double spectral_norm = 0;
};

PerturbGain perturb_gain(const PlaneSpec& spec);

struct TubeReport {
  bool passed = false;
  long steps = 0;
  double max_transverse = 0;  // max ||U_k - G(t_k)|| / t_k^7
  double fitted_k = 0;        // bracket constant K
  double max_bracket = 0;     // max |t_{k+1} - (t_k - c t_k^7)| / t_k^8
  double t_final = 0;
  std::string failure;
};

// Runs AP from G(t0) + t0^7 (beta C2 + gamma C3) and checks that every
// iterate stays within eps (scaled by t^7) of the curve and that the curve
// parameter follows t - c t^7 up to K t^8, with K fitted on the first 10%
// of steps.
TubeReport tube_check(const PlaneSpec& spec, double t0, double beta, double gamma, long steps,
                      double eps);

}  // namespace apcone
