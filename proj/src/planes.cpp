#include "apcone/planes.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace apcone {

namespace {

template <class T>
SymMat<T> sym3(T a11, T a12, T a13, T a22, T a23, T a33) {
  SymMat<T> m(3);
  m.set(0, 0, a11);
  m.set(0, 1, a12);
  m.set(0, 2, a13);
  m.set(1, 1, a22);
  m.set(1, 2, a23);
  m.set(2, 2, a33);
  return m;
}

template <class T>
std::array<SymMat<T>, 3> constraint_templates(const PlaneSpec& s) {
  auto c = [&](int i) { return T(s.ci(i)); };
  const T z(0), one(1);
  if (s.kind == PlaneKind::type1) {
    return {sym3<T>(one, c(1), c(2), c(3), c(4), z), sym3<T>(z, c(5), c(6), c(7), c(8), z),
            sym3<T>(z, z, z, T(s.mu), z, one)};
  }
  return {sym3<T>(one, c(1), c(2), z, c(3), z), sym3<T>(z, z, c(4), one, c(5), z),
          sym3<T>(z, z, z, z, z, one)};
}

}  // namespace

PlaneSpec PlaneSpec::type2(double c1, double c2, double c3, double c4, double c5) {
  PlaneSpec s;
  s.kind = PlaneKind::type2;
  s.c = {c1, c2, c3, c4, c5};
  return s;
}

void PlaneSpec::validate() const {
  for (double v : c)
    if (!std::isfinite(v)) throw DomainError("PlaneSpec: non-finite parameter");
  if (!std::isfinite(theta)) throw DomainError("PlaneSpec: non-finite theta");
  if (kind == PlaneKind::type1) {
    if (c.size() != 8) throw DomainError("PlaneSpec: Type 1 needs 8 parameters c1..c8");
    if (!(mu > 0)) throw DomainError("PlaneSpec: Type 1 needs mu > 0");
    if (c[4] == 0 && c[5] == 0 && c[6] == 0 && c[7] == 0)
      throw DomainError("PlaneSpec: Type 1 needs A2 != 0");
  } else {
    if (c.size() != 5) throw DomainError("PlaneSpec: Type 2 needs 5 parameters c1..c5");
  }
}

template <class T>
SymMat<T> intersection_point() {
  return SymMat<T>::diagonal({T(1), T(0), T(0)});
}

template <class T>
SymMat<T> conjugate(const PlaneSpec& spec, const SymMat<T>& x) {
  using std::cos;
  using std::sin;
  if (x.dim() != 3) throw DimensionError("conjugate: expects a 3x3 matrix");
  if (spec.theta == 0 && !spec.reflect) return x;
  const T th(spec.theta);
  const T co = cos(th), si = sin(th);
  const T f = spec.reflect ? T(-1) : T(1);
  // P = blockdiag(1, [[co, -si*f], [si, co*f]])
  const T p[3][3] = {{T(1), T(0), T(0)}, {T(0), co, -si * f}, {T(0), si, co * f}};
  T px[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      px[i][j] = T(0);
      for (int k = 0; k < 3; ++k) px[i][j] += p[i][k] * x(k, j);
    }
  SymMat<T> out(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T v(0);
      for (int k = 0; k < 3; ++k) v += px[i][k] * p[j][k];
      out.set(i, j, v);
    }
  return out;
}

template <class T>
std::array<SymMat<T>, 3> type2_basis(const PlaneSpec& s) {
  if (s.kind != PlaneKind::type2) throw DomainError("type2_basis: spec is not Type 2");
  s.validate();
  const T z(0), one(1);
  const T c1(s.ci(1)), c2(s.ci(2)), c3(s.ci(3)), c4(s.ci(4)), c5(s.ci(5));
  return {sym3<T>(T(-2) * c1, one, z, z, z, z), sym3<T>(T(2) * c2, z, -one, T(2) * c4, z, z),
          sym3<T>(T(-2) * c3, z, z, T(-2) * c5, one, z)};
}

template <class T>
Plane<T> build_plane(const PlaneSpec& spec) {
  spec.validate();
  const auto a = constraint_templates<T>(spec);
  const SymMat<T> ustar = intersection_point<T>();
  std::vector<SymMat<T>> basis;
  AffineSubspace<T> cons;
  try {
    cons = AffineSubspace<T>::make(ustar, {a[0], a[1], a[2]});
  } catch (const NumericalError&) {
    throw DomainError("build_plane: constraint matrices are linearly dependent");
  }
  if (spec.kind == PlaneKind::type2) {
    const auto b = type2_basis<T>(spec);
    basis.assign(b.begin(), b.end());
  } else {
    // the plane's directions are the orthogonal complement of the constraints
    basis = cons.complement();
  }
  for (auto& b : basis) b = conjugate(spec, b);
  Plane<T> out{AffineSubspace<T>::make(ustar, std::move(basis)),
               {conjugate(spec, a[0]), conjugate(spec, a[1]), conjugate(spec, a[2])}};
  return out;
}

int singularity_degree(const PlaneSpec& spec) {
  spec.validate();
  if (spec.kind == PlaneKind::type1) return 1;
  return spec.ci(4) != 0 ? 2 : 1;
}

int plucker_index(int i, int j, int k) {
  int idx = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) {
        if (a == i && b == j && c == k) return idx;
        ++idx;
      }
  throw DomainError("plucker_index: need 0 <= i < j < k < 6");
}

template <class T>
std::array<T, 20> plucker_coords(const AffineSubspace<T>& e) {
  using std::sqrt;
  if (e.ambient() != 3 || e.dim() != 3)
    throw DimensionError("plucker_coords: E must be a 3-plane in S^3");
  const T r2 = sqrt(T(2));
  T m[3][6];
  for (int r = 0; r < 3; ++r) {
    const auto& b = e.basis()[r];
    const T row[6] = {b(0, 0), b(1, 1), b(2, 2), r2 * b(0, 1), r2 * b(0, 2), r2 * b(1, 2)};
    for (int j = 0; j < 6; ++j) m[r][j] = row[j];
  }
  std::array<T, 20> out{};
  int idx = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) {
        out[idx++] = m[0][a] * (m[1][b] * m[2][c] - m[1][c] * m[2][b]) -
                     m[0][b] * (m[1][a] * m[2][c] - m[1][c] * m[2][a]) +
                     m[0][c] * (m[1][a] * m[2][b] - m[1][b] * m[2][a]);
      }
  return out;
}

double plucker_relation_residual(const std::array<double, 20>& p) {
  // antisymmetric extension to unordered triples
  auto at = [&](int a, int b, int c) {
    if (a == b || b == c || a == c) return 0.0;
    double sign = 1;
    if (a > b) std::swap(a, b), sign = -sign;
    if (b > c) std::swap(b, c), sign = -sign;
    if (a > b) std::swap(a, b), sign = -sign;
    return sign * p[plucker_index(a, b, c)];
  };
  double worst = 0;
  for (int i1 = 0; i1 < 6; ++i1)
    for (int i2 = i1 + 1; i2 < 6; ++i2)
      for (int j1 = 0; j1 < 6; ++j1)
        for (int j2 = j1 + 1; j2 < 6; ++j2)
          for (int j3 = j2 + 1; j3 < 6; ++j3)
            for (int j4 = j3 + 1; j4 < 6; ++j4) {
              const int j[4] = {j1, j2, j3, j4};
              double s = 0;
              for (int l = 0; l < 4; ++l) {
                int rest[3], r = 0;
                for (int q = 0; q < 4; ++q)
                  if (q != l) rest[r++] = j[q];
                const double term = at(i1, i2, j[l]) * at(rest[0], rest[1], rest[2]);
                s += (l % 2 ? -term : term);
              }
              worst = std::max(worst, std::abs(s));
            }
  return worst;
}

PlaneSpec random_type2_spec(std::mt19937_64& rng, const RandomSpecOptions& opt) {
  std::uniform_real_distribution<double> u(-opt.c_bound, opt.c_bound);
  std::uniform_real_distribution<double> mag(opt.c4_min, opt.c_bound);
  std::bernoulli_distribution coin(0.5);
  PlaneSpec s;
  s.kind = PlaneKind::type2;
  s.c = {u(rng), u(rng), u(rng), 0.0, u(rng)};
  s.c[3] = coin(rng) ? mag(rng) : -mag(rng);
  if (opt.c3_nonzero) s.c[2] = coin(rng) ? mag(rng) : -mag(rng);
  if (opt.random_frame) {
    std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
    s.theta = ang(rng);
    s.reflect = coin(rng);
  }
  return s;
}

PlaneSpec random_type1_spec(std::mt19937_64& rng, const RandomSpecOptions& opt) {
  std::uniform_real_distribution<double> u(-opt.c_bound, opt.c_bound);
  std::uniform_real_distribution<double> mu(0.1, opt.c_bound);
  PlaneSpec s;
  s.kind = PlaneKind::type1;
  s.c.resize(8);
  for (auto& v : s.c) v = u(rng);
  s.mu = mu(rng);
  if (opt.random_frame) {
    std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
    std::bernoulli_distribution coin(0.5);
    s.theta = ang(rng);
    s.reflect = coin(rng);
  }
  return s;
}

std::string describe(const PlaneSpec& spec) {
  std::ostringstream os;
  os << (spec.kind == PlaneKind::type1 ? "type1" : "type2") << " c=(";
  char buf[32];
  for (std::size_t i = 0; i < spec.c.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", spec.c[i]);
    os << (i ? "," : "") << buf;
  }
  os << ")";
  if (spec.kind == PlaneKind::type1) os << " mu=" << spec.mu;
  if (spec.theta != 0 || spec.reflect)
    os << " theta=" << spec.theta << (spec.reflect ? " reflect" : "");
  return os.str();
}

#define APCONE_INSTANTIATE(T)                                                      \
  template SymMat<T> intersection_point<T>();                                      \
  template SymMat<T> conjugate<T>(const PlaneSpec&, const SymMat<T>&);             \
  template std::array<SymMat<T>, 3> type2_basis<T>(const PlaneSpec&);              \
  template Plane<T> build_plane<T>(const PlaneSpec&);                              \
  template std::array<T, 20> plucker_coords<T>(const AffineSubspace<T>&);

APCONE_INSTANTIATE(double)
APCONE_INSTANTIATE(HighPrec)

}  // namespace apcone
