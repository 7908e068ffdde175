#include "apcone/symcore.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/eigen.hpp>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace apcone {

namespace {

template <class T>
using DenseMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using DenseVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

constexpr int kMaxSweeps = 100;
// Complement candidates with a smaller residual norm are discarded.
constexpr double kComplementDrop = 1e-10;

// Orthonormal basis of S^n: E_ii, then (E_ij + E_ji)/sqrt(2) for i < j.
template <class T>
std::vector<SymMat<T>> standard_basis(int n) {
  using std::sqrt;
  std::vector<SymMat<T>> out;
  for (int i = 0; i < n; ++i) {
    SymMat<T> e(n);
    e.set(i, i, T(1));
    out.push_back(std::move(e));
  }
  const T r = T(1) / sqrt(T(2));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      SymMat<T> e(n);
      e.set(i, j, r);
      out.push_back(std::move(e));
    }
  return out;
}

// Removes the components along an orthonormal family, twice for stability.
template <class T>
void strip(SymMat<T>& x, const std::vector<SymMat<T>>& q) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : q) x.axpy(-frob_inner(x, u), u);
}

}  // namespace

template <class T>
T frob_inner(const SymMat<T>& a, const SymMat<T>& b) {
  if (a.dim() != b.dim()) throw DimensionError("frob_inner: dimension mismatch");
  const int n = a.dim();
  T diag(0), off(0);
  for (int i = 0; i < n; ++i) {
    diag += a(i, i) * b(i, i);
    for (int j = i + 1; j < n; ++j) off += a(i, j) * b(i, j);
  }
  return diag + T(2) * off;
}

template <class T>
T frob_norm(const SymMat<T>& a) {
  using std::sqrt;
  return sqrt(frob_inner(a, a));
}

template <class T>
EigDecomp<T> eig_sym(const SymMat<T>& m) {
  using std::abs;
  using std::sqrt;
  const int n = m.dim();
  std::vector<T> a(static_cast<std::size_t>(n) * n), v(a.size(), T(0));
  auto A = [&](int i, int j) -> T& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> T& { return v[static_cast<std::size_t>(i) * n + j]; };
  std::vector<T> d(n), b(n), z(n, T(0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = m(i, j);
    V(i, i) = T(1);
    d[i] = b[i] = A(i, i);
  }

  auto rotate = [](T& x, T& y, const T& s, const T& tau) {
    const T g = x, h = y;
    x = g - s * (h + g * tau);
    y = h + s * (g - h * tau);
  };

  // Off-diagonal entries are annihilated only when negligible relative to
  // both diagonal entries they couple, which keeps small eigenvalues
  // accurate to full relative precision.
  bool done = false;
  for (int sweep = 1; sweep <= kMaxSweeps && !done; ++sweep) {
    T off(0);
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += abs(A(p, q));
    if (off == 0) {
      done = true;
      break;
    }
    const T thresh = sweep < 4 ? T(0.2) * off / T(n * n) : T(0);
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const T g = T(100) * abs(A(p, q));
        if (sweep > 4 && abs(d[p]) + g == abs(d[p]) && abs(d[q]) + g == abs(d[q])) {
          A(p, q) = T(0);
        } else if (abs(A(p, q)) > thresh) {
          T h = d[q] - d[p];
          T t;
          if (abs(h) + g == abs(h)) {
            t = A(p, q) / h;
          } else {
            const T theta = T(0.5) * h / A(p, q);
            t = T(1) / (abs(theta) + sqrt(T(1) + theta * theta));
            if (theta < 0) t = -t;
          }
          const T c = T(1) / sqrt(T(1) + t * t);
          const T s = t * c;
          const T tau = s / (T(1) + c);
          h = t * A(p, q);
          z[p] -= h;
          z[q] += h;
          d[p] -= h;
          d[q] += h;
          A(p, q) = T(0);
          for (int j = 0; j < p; ++j) rotate(A(j, p), A(j, q), s, tau);
          for (int j = p + 1; j < q; ++j) rotate(A(p, j), A(j, q), s, tau);
          for (int j = q + 1; j < n; ++j) rotate(A(p, j), A(q, j), s, tau);
          for (int j = 0; j < n; ++j) rotate(V(j, p), V(j, q), s, tau);
        }
      }
    }
    for (int p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = T(0);
    }
  }
  if (!done) throw NumericalError("eig_sym: Jacobi iteration did not converge in 100 sweeps");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] > d[y]; });

  EigDecomp<T> out;
  for (int l : order) {
    out.values.push_back(d[l]);
    std::vector<T> col(n);
    for (int i = 0; i < n; ++i) col[i] = V(i, l);
    auto first = std::find_if(col.begin(), col.end(), [](const T& x) { return x != 0; });
    if (first != col.end() && *first < 0)
      for (auto& x : col) x = -x;
    out.vectors.push_back(std::move(col));
  }
  return out;
}

template <class T>
T rank_tolerance(const EigDecomp<T>& eig) {
  using std::max;
  const T top = eig.values.empty() ? T(0) : eig.values.front();
  return precision_traits<T>::rank_tol() * max(T(1), top);
}

template <class T>
PsdProjection<T> project_psd(const SymMat<T>& a) {
  const auto eig = eig_sym(a);
  const T tau = rank_tolerance(eig);
  PsdProjection<T> out{SymMat<T>(a.dim()), 0};
  for (std::size_t l = 0; l < eig.values.size(); ++l) {
    if (eig.values[l] <= tau) break;
    out.matrix += SymMat<T>::outer(eig.vectors[l], eig.values[l]);
    ++out.rank;
  }
  return out;
}

template <class T>
AffineSubspace<T> AffineSubspace<T>::make(SymMat<T> anchor, std::vector<SymMat<T>> basis) {
  using std::sqrt;
  const int n = anchor.dim();
  const int m = static_cast<int>(basis.size());
  if (m == 0) throw DomainError("AffineSubspace: empty basis");
  if (m > n * (n + 1) / 2) throw DimensionError("AffineSubspace: too many basis elements");
  for (const auto& b : basis)
    if (b.dim() != n) throw DimensionError("AffineSubspace: basis dimension mismatch");

  AffineSubspace e;
  e.gram_.assign(static_cast<std::size_t>(m) * m, T(0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) e.gram_[i * m + j] = frob_inner(basis[i], basis[j]);

  Eigen::Map<const DenseMat<T>> h(e.gram_.data(), m, m);
  Eigen::LLT<DenseMat<T>> llt(h);
  if (llt.info() != Eigen::Success) throw NumericalError("AffineSubspace: dependent basis");
  DenseMat<T> l = llt.matrixL();
  T hmax(0);
  for (int i = 0; i < m; ++i) hmax = std::max(hmax, h(i, i));
  for (int i = 0; i < m; ++i)
    if (l(i, i) * l(i, i) <= T(1e-14) * hmax)
      throw NumericalError("AffineSubspace: dependent basis");
  e.chol_.assign(l.data(), l.data() + static_cast<std::size_t>(m) * m);

  std::vector<SymMat<T>> q;
  for (const auto& b : basis) {
    SymMat<T> x = b;
    strip(x, q);
    x *= T(1) / frob_norm(x);
    q.push_back(std::move(x));
  }
  const int want = n * (n + 1) / 2 - m;
  for (auto cand : standard_basis<T>(n)) {
    if (static_cast<int>(e.complement_.size()) == want) break;
    strip(cand, q);
    strip(cand, e.complement_);
    const T nrm = frob_norm(cand);
    if (nrm < T(kComplementDrop)) continue;
    cand *= T(1) / nrm;
    e.complement_.push_back(std::move(cand));
  }
  if (static_cast<int>(e.complement_.size()) != want)
    throw NumericalError("AffineSubspace: complement construction failed");

  e.anchor_ = std::move(anchor);
  e.basis_ = std::move(basis);
  return e;
}

template <class T>
SymMat<T> AffineSubspace<T>::direction(std::span<const T> p) const {
  if (static_cast<int>(p.size()) != dim())
    throw DimensionError("AffineSubspace: coefficient count mismatch");
  SymMat<T> x(ambient());
  for (int i = 0; i < dim(); ++i) x.axpy(p[i], basis_[i]);
  return x;
}

template <class T>
SymMat<T> AffineSubspace<T>::point(std::span<const T> p) const {
  return anchor_ + direction(p);
}

template <class T>
std::vector<T> AffineSubspace<T>::solve_gram(std::span<const T> rhs) const {
  const int m = dim();
  if (static_cast<int>(rhs.size()) != m) throw DimensionError("solve_gram: size mismatch");
  Eigen::Map<const DenseMat<T>> l(chol_.data(), m, m);
  DenseVec<T> r(m);
  for (int i = 0; i < m; ++i) r(i) = rhs[i];
  DenseVec<T> y = l.template triangularView<Eigen::Lower>().solve(r);
  DenseVec<T> s = l.transpose().template triangularView<Eigen::Upper>().solve(y);
  return std::vector<T>(s.data(), s.data() + m);
}

template <class T>
bool AffineSubspace<T>::has_orthogonal_basis(double rel_tol) const {
  using std::abs;
  using std::sqrt;
  const int m = dim();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (abs(gram_[i * m + j]) > T(rel_tol) * sqrt(gram_[i * m + i] * gram_[j * m + j]))
        return false;
  return true;
}

template <class T>
AffineProjection<T> project_affine(const AffineSubspace<T>& e, const SymMat<T>& x) {
  if (x.dim() != e.ambient()) throw DimensionError("project_affine: dimension mismatch");
  const SymMat<T> r = x - e.anchor();
  std::vector<T> rhs;
  for (const auto& b : e.basis()) rhs.push_back(frob_inner(b, r));
  AffineProjection<T> out;
  out.coeffs = e.solve_gram(rhs);
  out.point = e.point(out.coeffs);
  return out;
}

template <class T>
T dist2_affine(const AffineSubspace<T>& e, const SymMat<T>& x) {
  if (x.dim() != e.ambient()) throw DimensionError("dist2_affine: dimension mismatch");
  const SymMat<T> r = x - e.anchor();
  T s(0);
  for (const auto& c : e.complement()) {
    const T v = frob_inner(c, r);
    s += v * v;
  }
  return s;
}

template <class T>
AffineSubspace<T> orthogonalize(const AffineSubspace<T>& e) {
  std::vector<SymMat<T>> c;
  for (const auto& b : e.basis()) {
    SymMat<T> x = b;
    for (const auto& u : c) x.axpy(-frob_inner(x, u) / frob_inner(u, u), u);
    if (frob_norm(x) <= T(1e-10) * frob_norm(b))
      throw NumericalError("orthogonalize: rank deficient basis");
    c.push_back(std::move(x));
  }
  return AffineSubspace<T>::make(e.anchor(), std::move(c));
}

template <class T>
std::vector<T> coords_in(const AffineSubspace<T>& e, const SymMat<T>& x) {
  return project_affine(e, x).coeffs;
}

template <class T>
std::vector<T> solve_dense(std::span<const T> a, std::span<const T> b) {
  const int n = static_cast<int>(b.size());
  if (a.size() != static_cast<std::size_t>(n) * n) throw DimensionError("solve_dense: size mismatch");
  Eigen::Map<const DenseMat<T>> am(a.data(), n, n);
  Eigen::FullPivLU<DenseMat<T>> lu(am);
  if (!lu.isInvertible()) throw NumericalError("solve_dense: singular matrix");
  DenseVec<T> bv(n);
  for (int i = 0; i < n; ++i) bv(i) = b[i];
  DenseVec<T> x = lu.solve(bv);
  return std::vector<T>(x.data(), x.data() + n);
}

std::vector<SymMat<double>> read_matrices(std::istream& in) {
  std::vector<SymMat<double>> out;
  std::vector<std::vector<double>> rows;
  auto flush = [&] {
    if (rows.empty()) return;
    for (const auto& r : rows)
      if (r.size() != rows.size())
        throw DimensionError("read_matrices: block is not square");
    out.push_back(SymMat<double>::from_rows(rows));
    rows.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    bool comment = false;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
      comment = true;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw DomainError("read_matrices: bad number '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) {
      // a comment-only line does not end a block
      if (!comment) flush();
    } else {
      rows.push_back(std::move(row));
    }
  }
  flush();
  return out;
}

void write_matrix(std::ostream& out, const SymMat<double>& m) {
  char buf[32];
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  out << '\n';
}

#define APCONE_INSTANTIATE(T)                                                          \
  template T frob_inner<T>(const SymMat<T>&, const SymMat<T>&);                        \
  template T frob_norm<T>(const SymMat<T>&);                                           \
  template EigDecomp<T> eig_sym<T>(const SymMat<T>&);                                  \
  template T rank_tolerance<T>(const EigDecomp<T>&);                                   \
  template PsdProjection<T> project_psd<T>(const SymMat<T>&);                          \
  template class AffineSubspace<T>;                                                    \
  template AffineProjection<T> project_affine<T>(const AffineSubspace<T>&, const SymMat<T>&); \
  template T dist2_affine<T>(const AffineSubspace<T>&, const SymMat<T>&);              \
  template AffineSubspace<T> orthogonalize<T>(const AffineSubspace<T>&);               \
  template std::vector<T> coords_in<T>(const AffineSubspace<T>&, const SymMat<T>&);    \
  template std::vector<T> solve_dense<T>(std::span<const T>, std::span<const T>);

APCONE_INSTANTIATE(double)
APCONE_INSTANTIATE(HighPrec)

}  // namespace apcone
