#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "apcone/symcore.hpp"

namespace apcone {

template <class T>
struct ApStep {
  SymMat<T> next;         // P_E(P_psd(U))
  std::vector<T> coeffs;  // coordinates of `next` in E
  int psd_rank = 0;       // rank of the intermediate PSD projection
};

// One alternating projection step U -> P_E(P_psd(U)).
template <class T>
ApStep<T> ap_step(const AffineSubspace<T>& e, const SymMat<T>& u);

enum class StopReason { max_iter, tol, stagnation };
std::string to_string(StopReason r);

struct TraceRow {
  long k = 0;
  double dist = 0;    // ||U_k - U_*||_F with U_* the anchor of E
  int psd_rank = 0;   // rank of P_psd(U_k)
  std::vector<double> p;  // only kept every `stride` rows
};

struct APTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iter;
};

struct RunOptions {
  long max_iter = 1000;
  double tol = 0.0;
  // 0 selects 1 for max_iter <= 1000 and 1000 otherwise
  long stride = 0;
  // consecutive steps with relative decrease below 1e-16 before giving up
  int stagnation_window = 100;
};

// Runs AP from phi(p0). Stops once dist <= tol, after max_iter steps, or on
// stagnation.
APTrace run_ap(const AffineSubspace<double>& e, std::span<const double> p0,
               const RunOptions& opt);

// Coefficients after one step via the eigenvalue formula, with the
// derivative of the negative-eigenvalue energy taken by central finite
// differences plus one Richardson extrapolation. The basis must be
// orthogonal. Throws NumericalError when the set of negative eigenvalues
// changes across the stencil even after 10 halvings of fd_step.
std::vector<double> eig_formula_step(const AffineSubspace<double>& e_orth,
                                     std::span<const double> p, double fd_step = 1e-5);

// 1/2 * sum of squared negative eigenvalues of phi(p).
double negative_energy(const AffineSubspace<double>& e, std::span<const double> p,
                       int* negative_count = nullptr);

// Rank-one chart psi(x) = x x^T / x1 on S^3.
template <class T>
struct RankOneParam {
  std::array<T, 3> x{};
  RankOneParam() = default;
  explicit RankOneParam(std::array<T, 3> v);
};

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <class T>
SymMat<T> psi(const RankOneParam<T>& x);
// Derivative of psi along x_k, k in {0,1,2}.
template <class T>
SymMat<T> psi_partial(const RankOneParam<T>& x, int k);
// M(x)_{k,i} = <d_k psi(x), B_i>. E must be a 3-plane in S^3.
template <class T>
Mat3<T> m_matrix(const AffineSubspace<T>& e, const RankOneParam<T>& x);
// Gradient of 1/2 dist^2(psi(x), E) in x.
template <class T>
std::array<T, 3> grad_half_dist2_psi(const AffineSubspace<T>& e, const RankOneParam<T>& x);

// ||M(x)(p~ - p) + grad|| where V = P_psd(phi(p)) = psi(x) and p~ are the
// coordinates of P_E(V). Throws DomainError if V does not have rank one or
// if x cannot be extracted stably.
template <class T>
T thm41_residual(const AffineSubspace<T>& e, std::span<const T> p);

// x with psi(x) = V for a rank-one PSD V given by its top eigenpair.
template <class T>
RankOneParam<T> extract_rank_one(const EigDecomp<T>& eig);

}  // namespace apcone
