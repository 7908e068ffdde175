#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apcone/errors.hpp"
#include "apcone/scalar.hpp"

namespace apcone {

// Dense real symmetric matrix. Only the upper triangle is stored (packed,
// row-major), so symmetry holds by construction.
template <class T>
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int n) : n_(n), a_(packed_size(n), T(0)) {
    if (n < 1) throw DimensionError("SymMat: dimension must be positive");
  }

  static SymMat zeros(int n) { return SymMat(n); }
  static SymMat identity(int n) {
    SymMat m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, T(1));
    return m;
  }
  static SymMat diagonal(const std::vector<T>& d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
    return m;
  }
  // Rows must form an exactly symmetric square array.
  static SymMat from_rows(const std::vector<std::vector<T>>& rows) {
    const int n = static_cast<int>(rows.size());
    SymMat m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw DimensionError("SymMat::from_rows: ragged rows");
      for (int j = i; j < n; ++j) {
        if (rows[i][j] != rows[j][i])
          throw DomainError("SymMat::from_rows: input is not symmetric");
        m.set(i, j, rows[i][j]);
      }
    }
    return m;
  }
  // scale * v v^T
  static SymMat outer(const std::vector<T>& v, const T& scale = T(1)) {
    SymMat m(static_cast<int>(v.size()));
    for (int i = 0; i < m.n_; ++i)
      for (int j = i; j < m.n_; ++j) m.set(i, j, scale * v[i] * v[j]);
    return m;
  }

  int dim() const { return n_; }
  const T& operator()(int i, int j) const { return a_[index(i, j)]; }
  void set(int i, int j, const T& v) { a_[index(i, j)] = v; }
  void add(int i, int j, const T& v) { a_[index(i, j)] += v; }
  std::span<const T> packed() const { return a_; }

  SymMat& operator+=(const SymMat& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  SymMat& operator*=(const T& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }
  // this += s * o
  SymMat& axpy(const T& s, const SymMat& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * o.a_[i];
    return *this;
  }

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(const T& s, SymMat a) { return a *= s; }
  friend SymMat operator*(SymMat a, const T& s) { return a *= s; }
  friend SymMat operator-(SymMat a) { return a *= T(-1); }
  friend bool operator==(const SymMat& a, const SymMat& b) {
    return a.n_ == b.n_ && a.a_ == b.a_;
  }

  template <class U>
  SymMat<U> cast() const {
    SymMat<U> m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) m.set(i, j, static_cast<U>((*this)(i, j)));
    return m;
  }

 private:
  static std::size_t packed_size(int n) {
    return n < 1 ? 0 : static_cast<std::size_t>(n) * (n + 1) / 2;
  }
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row i of the upper triangle starts after i rows of lengths n, n-1, ...
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
           (j - i);
  }
  void check_same(const SymMat& o) const {
    if (o.n_ != n_) throw DimensionError("SymMat: dimension mismatch");
  }

  int n_ = 0;
  std::vector<T> a_;
};

// Frobenius inner product tr(A^T B).
template <class T>
T frob_inner(const SymMat<T>& a, const SymMat<T>& b);

template <class T>
T frob_norm(const SymMat<T>& a);

template <class T>
struct EigDecomp {
  std::vector<T> values;                // descending
  std::vector<std::vector<T>> vectors;  // vectors[l] pairs with values[l]
};

// Cyclic Jacobi. Each eigenvector is signed so its first nonzero entry is
// positive. Throws NumericalError after 100 sweeps.
template <class T>
EigDecomp<T> eig_sym(const SymMat<T>& a);

template <class T>
struct PsdProjection {
  SymMat<T> matrix;
  int rank = 0;
};

template <class T>
T rank_tolerance(const EigDecomp<T>& eig);

template <class T>
PsdProjection<T> project_psd(const SymMat<T>& a);

// E = anchor + span{B_i}. The basis need not be orthogonal.
template <class T>
class AffineSubspace {
 public:
  static AffineSubspace make(SymMat<T> anchor, std::vector<SymMat<T>> basis);

  const SymMat<T>& anchor() const { return anchor_; }
  const std::vector<SymMat<T>>& basis() const { return basis_; }
  // orthonormal basis of the Frobenius complement of span{B_i} in S^n
  const std::vector<SymMat<T>>& complement() const { return complement_; }
  // row-major m x m Gram matrix <B_i, B_j>
  const std::vector<T>& gram() const { return gram_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int ambient() const { return anchor_.dim(); }

  // anchor + sum p_i B_i
  SymMat<T> point(std::span<const T> p) const;
  // sum p_i B_i
  SymMat<T> direction(std::span<const T> p) const;
  // solves H s = rhs with the Gram matrix H
  std::vector<T> solve_gram(std::span<const T> rhs) const;
  bool has_orthogonal_basis(double rel_tol = 1e-12) const;

 private:
  SymMat<T> anchor_;
  std::vector<SymMat<T>> basis_;
  std::vector<SymMat<T>> complement_;
  std::vector<T> gram_;
  std::vector<T> chol_;  // lower Cholesky factor of gram_, row-major
};

template <class T>
struct AffineProjection {
  SymMat<T> point;
  std::vector<T> coeffs;
};

template <class T>
AffineProjection<T> project_affine(const AffineSubspace<T>& e, const SymMat<T>& x);

// Squared distance from X to E, summed over the complement basis.
template <class T>
T dist2_affine(const AffineSubspace<T>& e, const SymMat<T>& x);

// Gram-Schmidt on the basis in order; the first element is kept as is.
template <class T>
AffineSubspace<T> orthogonalize(const AffineSubspace<T>& e);

// Coefficients of the basis for a point known to lie in E (least squares
// through the Gram system).
template <class T>
std::vector<T> coords_in(const AffineSubspace<T>& e, const SymMat<T>& x);

// Dense square solve A x = b with A row-major; full-pivot LU.
template <class T>
std::vector<T> solve_dense(std::span<const T> a, std::span<const T> b);

// Text format: whitespace-separated row-major entries, blank lines separate
// matrices, '#' starts a comment.
std::vector<SymMat<double>> read_matrices(std::istream& in);
void write_matrix(std::ostream& out, const SymMat<double>& m);

}  // namespace apcone
