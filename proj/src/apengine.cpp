#include "apcone/apengine.hpp"

#include <cmath>

namespace apcone {

template <class T>
ApStep<T> ap_step(const AffineSubspace<T>& e, const SymMat<T>& u) {
  auto psd = project_psd(u);
  auto proj = project_affine(e, psd.matrix);
  return {std::move(proj.point), std::move(proj.coeffs), psd.rank};
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iter:
      return "max_iter";
    case StopReason::tol:
      return "tol";
    case StopReason::stagnation:
      return "stagnation";
  }
  return "unknown";
}

APTrace run_ap(const AffineSubspace<double>& e, std::span<const double> p0,
               const RunOptions& opt) {
  if (opt.max_iter < 1) throw DomainError("run_ap: max_iter must be at least 1");
  if (opt.tol < 0) throw DomainError("run_ap: tol must be nonnegative");
  if (static_cast<int>(p0.size()) != e.dim())
    throw DimensionError("run_ap: start has the wrong number of coefficients");
  const long stride = opt.stride > 0 ? opt.stride : (opt.max_iter <= 1000 ? 1 : 1000);

  APTrace trace;
  std::vector<double> p(p0.begin(), p0.end());
  SymMat<double> u = e.point(p);
  double prev = 0;
  int flat = 0;
  for (long k = 0;; ++k) {
    // distance from the coefficients, not from U - U_*, to avoid cancellation
    const double dist = frob_norm(e.direction(p));
    auto step = ap_step(e, u);
    TraceRow row{k, dist, step.psd_rank, {}};

    bool stop = false;
    if (dist <= opt.tol) {
      trace.converged = true;
      trace.stop_reason = StopReason::tol;
      stop = true;
    } else if (k >= opt.max_iter) {
      trace.stop_reason = StopReason::max_iter;
      stop = true;
    } else if (k > 0) {
      flat = (prev - dist < 1e-16 * prev) ? flat + 1 : 0;
      if (flat >= opt.stagnation_window) {
        trace.stop_reason = StopReason::stagnation;
        stop = true;
      }
    }
    if (stop || k % stride == 0) row.p = p;
    trace.rows.push_back(std::move(row));
    if (stop) break;

    prev = dist;
    u = std::move(step.next);
    p = std::move(step.coeffs);
  }
  return trace;
}

double negative_energy(const AffineSubspace<double>& e, std::span<const double> p,
                       int* negative_count) {
  const auto eig = eig_sym(e.point(p));
  const double tau = rank_tolerance(eig);
  double f = 0;
  int count = 0;
  for (double l : eig.values) {
    if (l < 0) f += 0.5 * l * l;
    if (l < -tau) ++count;
  }
  if (negative_count) *negative_count = count;
  return f;
}

std::vector<double> eig_formula_step(const AffineSubspace<double>& e_orth,
                                     std::span<const double> p, double fd_step) {
  if (!(fd_step > 0)) throw DomainError("eig_formula_step: fd_step must be positive");
  if (!e_orth.has_orthogonal_basis())
    throw DomainError("eig_formula_step: basis must be orthogonal");
  const int m = e_orth.dim();
  if (static_cast<int>(p.size()) != m) throw DimensionError("eig_formula_step: size mismatch");

  int n0 = 0;
  negative_energy(e_orth, p, &n0);
  std::vector<double> out(p.begin(), p.end());
  std::vector<double> q(p.begin(), p.end());
  for (int i = 0; i < m; ++i) {
    double h = fd_step;
    bool ok = false;
    double deriv = 0;
    for (int attempt = 0; attempt <= 10 && !ok; ++attempt, h *= 0.5) {
      double f[4];
      const double offs[4] = {h, -h, h / 2, -h / 2};
      ok = true;
      for (int s = 0; s < 4 && ok; ++s) {
        q[i] = p[i] + offs[s];
        int cnt = 0;
        f[s] = negative_energy(e_orth, q, &cnt);
        ok = cnt == n0;
      }
      q[i] = p[i];
      if (!ok) continue;
      const double d1 = (f[0] - f[1]) / (2 * h);
      const double d2 = (f[2] - f[3]) / h;
      deriv = (4 * d2 - d1) / 3;
    }
    if (!ok)
      throw NumericalError("eig_formula_step: eigenvalue crosses zero inside the FD stencil");
    out[i] = p[i] - deriv / e_orth.gram()[i * m + i];
  }
  return out;
}

template <class T>
RankOneParam<T>::RankOneParam(std::array<T, 3> v) : x(v) {
  if (x[0] == 0) throw DomainError("RankOneParam: x1 must be nonzero");
}

template <class T>
SymMat<T> psi(const RankOneParam<T>& p) {
  const auto& x = p.x;
  if (x[0] == 0) throw DomainError("psi: x1 must be nonzero");
  SymMat<T> m(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) m.set(i, j, x[i] * x[j] / x[0]);
  return m;
}

template <class T>
SymMat<T> psi_partial(const RankOneParam<T>& p, int k) {
  const auto& x = p.x;
  if (x[0] == 0) throw DomainError("psi_partial: x1 must be nonzero");
  if (k < 0 || k > 2) throw DomainError("psi_partial: k must be 0, 1 or 2");
  SymMat<T> m(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T v(0);
      if (k == i) v += x[j];
      if (k == j) v += x[i];
      v /= x[0];
      if (k == 0) v -= x[i] * x[j] / (x[0] * x[0]);
      m.set(i, j, v);
    }
  return m;
}

template <class T>
Mat3<T> m_matrix(const AffineSubspace<T>& e, const RankOneParam<T>& x) {
  if (e.ambient() != 3 || e.dim() != 3)
    throw DimensionError("m_matrix: E must be a 3-plane in S^3");
  Mat3<T> m{};
  for (int k = 0; k < 3; ++k) {
    const auto d = psi_partial(x, k);
    for (int i = 0; i < 3; ++i) m[k][i] = frob_inner(d, e.basis()[i]);
  }
  return m;
}

template <class T>
std::array<T, 3> grad_half_dist2_psi(const AffineSubspace<T>& e, const RankOneParam<T>& x) {
  if (e.ambient() != 3) throw DimensionError("grad_half_dist2_psi: E must live in S^3");
  const SymMat<T> r0 = psi(x) - e.anchor();
  // psi(x) - P_E(psi(x)) expanded in the orthonormal complement
  SymMat<T> r(3);
  for (const auto& c : e.complement()) r.axpy(frob_inner(c, r0), c);
  std::array<T, 3> g{};
  for (int k = 0; k < 3; ++k) g[k] = frob_inner(r, psi_partial(x, k));
  return g;
}

template <class T>
RankOneParam<T> extract_rank_one(const EigDecomp<T>& eig) {
  using std::abs;
  const T lam = eig.values.front();
  const auto& u = eig.vectors.front();
  if (abs(u[0]) < T(1e-8)) throw DomainError("extract_rank_one: leading eigenvector has u1 ~ 0");
  // x = lam*u1*u gives x1 = lam*u1^2 > 0 whatever the sign of u
  const T s = lam * u[0];
  return RankOneParam<T>({s * u[0], s * u[1], s * u[2]});
}

template <class T>
T thm41_residual(const AffineSubspace<T>& e, std::span<const T> p) {
  using std::sqrt;
  const auto eig = eig_sym(e.point(p));
  const T tau = rank_tolerance(eig);
  int rank = 0;
  for (const auto& l : eig.values)
    if (l > tau) ++rank;
  if (rank != 1) throw DomainError("thm41_residual: PSD projection does not have rank one");
  const auto x = extract_rank_one(eig);
  const auto pt = coords_in(e, psi(x));
  const auto m = m_matrix(e, x);
  const auto g = grad_half_dist2_psi(e, x);
  T s(0);
  for (int k = 0; k < 3; ++k) {
    T r = g[k];
    for (int i = 0; i < 3; ++i) r += m[k][i] * (pt[i] - p[i]);
    s += r * r;
  }
  return sqrt(s);
}

#define APCONE_INSTANTIATE(T)                                                              \
  template ApStep<T> ap_step<T>(const AffineSubspace<T>&, const SymMat<T>&);               \
  template struct RankOneParam<T>;                                                         \
  template SymMat<T> psi<T>(const RankOneParam<T>&);                                       \
  template SymMat<T> psi_partial<T>(const RankOneParam<T>&, int);                          \
  template Mat3<T> m_matrix<T>(const AffineSubspace<T>&, const RankOneParam<T>&);         \
  template std::array<T, 3> grad_half_dist2_psi<T>(const AffineSubspace<T>&,               \
                                                   const RankOneParam<T>&);                \
  template RankOneParam<T> extract_rank_one<T>(const EigDecomp<T>&);                       \
  template T thm41_residual<T>(const AffineSubspace<T>&, std::span<const T>);

APCONE_INSTANTIATE(double)
APCONE_INSTANTIATE(HighPrec)

}  // namespace apcone
