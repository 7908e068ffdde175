#include <cmath>
#include <random>
#include <sstream>

#include "apcone/planes.hpp"
#include "apcone/symcore.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace apcone;
using apcone::test::max_entry_diff;
using apcone::test::random_sym;
using apcone::test::rows;

namespace {

SymMat<double> ex32_point(double t) {
  return rows({{1, 0, -t}, {0, 2 * t, 0}, {-t, 0, 0}});
}

AffineSubspace<double> ex32_plane() {
  return AffineSubspace<double>::make(SymMat<double>::diagonal({1, 0, 0}),
                                      {rows({{0, 0, -1}, {0, 2, 0}, {-1, 0, 0}})});
}

double reconstruction_error(const SymMat<double>& a, const EigDecomp<double>& eig) {
  SymMat<double> r(a.dim());
  for (int l = 0; l < a.dim(); ++l) r.axpy(eig.values[l], SymMat<double>::outer(eig.vectors[l]));
  return frob_norm(r - a);
}

}  // namespace

TEST_CASE("SymMat stores one triangle and rejects bad input") {
  SymMat<double> m(3);
  m.set(2, 0, 5.0);
  CHECK(m(0, 2) == 5.0);
  CHECK(m(2, 0) == 5.0);
  CHECK_THROWS_AS(SymMat<double>(0), DimensionError);
  CHECK_THROWS_AS(rows({{1, 2}, {3, 4}}), DomainError);
  CHECK_THROWS_AS(rows({{1, 2}, {2}}), DimensionError);
  CHECK_THROWS_AS(SymMat<double>(2) + SymMat<double>(3), DimensionError);
}

TEST_CASE("frob_inner") {
  const auto i3 = SymMat<double>::identity(3);
  CHECK(frob_inner(i3, i3) == 3.0);

  // B1, B2 of the Type-2 basis with c1 = 1, c2 = 2: 4c1^2 + 2 and -4c1c2
  const auto b = type2_basis<double>(PlaneSpec::type2(1, 2, 0, 1, 0));
  CHECK(frob_inner(b[0], b[0]) == 6.0);
  CHECK(frob_inner(b[0], b[1]) == -8.0);

  // off-diagonal entries count twice
  const auto a = rows({{0, 1}, {1, 0}});
  CHECK(frob_inner(a, a) == 2.0);
  CHECK_THROWS_AS(frob_inner(SymMat<double>(2), SymMat<double>(3)), DimensionError);
}

TEST_CASE("eig_sym on closed-form cases") {
  SUBCASE("diagonal") {
    const auto eig = eig_sym(SymMat<double>::diagonal({1, 0, 0}));
    CHECK(eig.values == std::vector<double>{1, 0, 0});
  }
  SUBCASE("Example 3.2 point at t = 0.1") {
    // eigenvalues 2t and (1 +- sqrt(1 + 4t^2)) / 2
    const auto a = ex32_point(0.1);
    const auto eig = eig_sym(a);
    const double r = std::sqrt(1.04);
    CHECK(std::abs(eig.values[0] - (1 + r) / 2) < 1e-14);
    CHECK(std::abs(eig.values[1] - 0.2) < 1e-14);
    CHECK(std::abs(eig.values[2] - (1 - r) / 2) < 1e-14);
    CHECK(std::abs(eig.values[0] - 1.0099019513592786) < 1e-14);
    CHECK(std::abs(eig.values[2] + 0.0099019513592785) < 1e-14);
    CHECK(reconstruction_error(a, eig) < 1e-14);
  }
  SUBCASE("Example 3.4 point p = (r, 0) solves the quartic") {
    const double r = 0.3;
    SymMat<double> u = SymMat<double>::diagonal({1, 0, 0, 0});
    u.set(0, 2, r);
    u.set(1, 2, r);
    const auto eig = eig_sym(u);
    int nonzero = 0;
    for (double l : eig.values) {
      if (std::abs(l) < 1e-12) continue;
      ++nonzero;
      CHECK(std::abs(l * l * l - l * l - 2 * r * r * l + r * r) < 1e-10);
    }
    CHECK(nonzero == 3);
  }
}

TEST_CASE("eig_sym invariants on random input") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const auto a = random_sym(rng, n, 3.0);
    const auto eig = eig_sym(a);
    CHECK(std::is_sorted(eig.values.rbegin(), eig.values.rend()));
    CHECK(reconstruction_error(a, eig) <= 1e-12 * std::max(1.0, frob_norm(a)));
    for (int i = 0; i < n; ++i) {
      int first = 0;
      while (eig.vectors[i][first] == 0) ++first;
      CHECK(eig.vectors[i][first] > 0);
      for (int j = 0; j < n; ++j) {
        double d = 0;
        for (int k = 0; k < n; ++k) d += eig.vectors[i][k] * eig.vectors[j][k];
        CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("eig_sym in extended precision") {
  // t = 1/8 is exact in binary; eigenvalues (1 +- sqrt(1 + 4t^2))/2 and 2t
  const auto a = ex32_point(0.125).cast<HighPrec>();
  const auto eig = eig_sym(a);
  const HighPrec r = sqrt(HighPrec("1.0625"));
  CHECK(abs(eig.values[0] - (1 + r) / 2) < HighPrec("1e-45"));
  CHECK(abs(eig.values[1] - HighPrec("0.25")) < HighPrec("1e-45"));
  CHECK(abs(eig.values[2] - (1 - r) / 2) < HighPrec("1e-45"));
}

TEST_CASE("project_psd") {
  SUBCASE("clips negative eigenvalues") {
    const auto p = project_psd(SymMat<double>::diagonal({1, -1}));
    CHECK(p.matrix == SymMat<double>::diagonal({1, 0}));
    CHECK(p.rank == 1);
  }
  SUBCASE("PSD input is a fixed point") {
    const auto a = rows({{2, 1, 0}, {1, 2, 0}, {0, 0, 0}});
    const auto p = project_psd(a);
    CHECK(max_entry_diff(p.matrix, a) < 1e-15);
    CHECK(p.rank == 2);
  }
  SUBCASE("curve point of the moment-curve plane projects to rank one") {
    const auto spec = PlaneSpec::type2(1, 0, 0, 1, 0);
    const auto e = build_plane<double>(spec).e;
    // G(0.05) from its closed form with w = 1 - 2t
    const double t = 0.05, w = 1 - 2 * t;
    const double g13 = t * t / (2 * w) - std::pow(t, 6) / (16 * std::pow(w, 5));
    const double g23 = -std::pow(t, 3) / (2 * w * w) + 3 * std::pow(t, 7) / (16 * std::pow(w, 6));
    const std::vector<double> p{t, g13, g23};
    CHECK(project_psd(e.point(p)).rank == 1);
  }
  SUBCASE("idempotent, nonexpansive and minimal") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 4;
      const auto a = random_sym(rng, n);
      const auto b = random_sym(rng, n);
      const auto pa = project_psd(a).matrix;
      CHECK(frob_norm(project_psd(pa).matrix - pa) < 1e-12);
      CHECK(frob_norm(pa - project_psd(b).matrix) <= frob_norm(a - b) + 1e-12);
      const auto w = project_psd(random_sym(rng, n)).matrix;
      CHECK(frob_norm(a - pa) <= frob_norm(a - w) + 1e-12);
      for (double l : eig_sym(pa).values) CHECK(l > -1e-14);
    }
  }
}

TEST_CASE("AffineSubspace construction") {
  const auto e = ex32_plane();
  CHECK(e.dim() == 1);
  CHECK(e.ambient() == 3);
  CHECK(e.complement().size() == 5);
  for (const auto& c : e.complement()) {
    CHECK(std::abs(frob_norm(c) - 1) < 1e-14);
    CHECK(std::abs(frob_inner(c, e.basis()[0])) < 1e-12);
  }
  const std::vector<double> p{0.1};
  CHECK(e.point(p) == ex32_point(0.1));
  CHECK_THROWS_AS(AffineSubspace<double>::make(SymMat<double>(3), {e.basis()[0], 2.0 * e.basis()[0]}),
                  NumericalError);
  CHECK_THROWS_AS(AffineSubspace<double>::make(SymMat<double>(2), {e.basis()[0]}), DimensionError);
}

TEST_CASE("project_affine") {
  const auto e = build_plane<double>(PlaneSpec::type2(0.3, -0.7, 0.5, 1.2, -0.4)).e;
  SUBCASE("points of E are fixed") {
    const std::vector<double> p{0.2, -0.1, 0.4};
    const auto pr = project_affine(e, e.point(p));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(pr.coeffs[i] - p[i]) < 1e-12);
  }
  SUBCASE("complement directions project to the anchor") {
    const auto pr = project_affine(e, e.anchor() + 0.7 * e.complement()[1]);
    for (double c : pr.coeffs) CHECK(std::abs(c) < 1e-14);
    CHECK(max_entry_diff(pr.point, e.anchor()) < 1e-14);
  }
  SUBCASE("residual is orthogonal to the basis") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_sym(rng, 3, 2.0);
      const auto r = x - project_affine(e, x).point;
      for (const auto& b : e.basis()) CHECK(std::abs(frob_inner(r, b)) <= 1e-10 * frob_norm(x));
    }
  }
  SUBCASE("Example 3.2 step shrinks t by t^3/3") {
    const auto e32 = ex32_plane();
    const auto pr = project_affine(e32, project_psd(ex32_point(0.1)).matrix);
    CHECK(std::abs(pr.coeffs[0] - (0.1 - 0.001 / 3)) < 1e-4);
  }
}

TEST_CASE("dist2_affine") {
  const auto e = build_plane<double>(PlaneSpec::type2(0.3, -0.7, 0.5, 1.2, -0.4)).e;
  const std::vector<double> p{0.2, -0.1, 0.4};
  CHECK(dist2_affine(e, e.point(p)) <= 1e-20);
  CHECK(std::abs(dist2_affine(e, e.anchor() + 0.25 * e.complement()[2]) - 0.0625) < 1e-15);
  std::mt19937_64 rng(8);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_sym(rng, 3);
    const double d = frob_norm(x - project_affine(e, x).point);
    worst = std::max(worst, std::abs(dist2_affine(e, x) - d * d) / (d * d));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("orthogonalize") {
  SUBCASE("keeps B1 and the affine set") {
    const auto e = build_plane<double>(PlaneSpec::type2(1, 2, 0, 1, 0)).e;
    const auto o = orthogonalize(e);
    CHECK(o.basis()[0] == e.basis()[0]);
    CHECK(o.has_orthogonal_basis());
    CHECK(!e.has_orthogonal_basis());
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) CHECK(std::abs(frob_inner(o.basis()[i], o.basis()[j])) < 1e-12);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_sym(rng, 3);
      CHECK(max_entry_diff(project_affine(e, x).point, project_affine(o, x).point) < 1e-10);
    }
  }
  SUBCASE("orthogonal basis is unchanged") {
    const auto e = AffineSubspace<double>::make(
        SymMat<double>(3), {rows({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}), rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}})});
    const auto o = orthogonalize(e);
    for (int i = 0; i < 2; ++i) CHECK(max_entry_diff(o.basis()[i], e.basis()[i]) < 1e-14);
  }
}

TEST_CASE("solve_dense") {
  const std::vector<double> a{2, 1, 1, 3};
  const std::vector<double> b{3, 5};
  const auto x = solve_dense<double>(a, b);
  CHECK(std::abs(x[0] - 0.8) < 1e-15);
  CHECK(std::abs(x[1] - 1.4) < 1e-15);
  const std::vector<double> singular{1, 2, 2, 4};
  CHECK_THROWS_AS(solve_dense<double>(singular, b), NumericalError);
}

TEST_CASE("matrix text format") {
  std::istringstream in(
      "# two matrices\n"
      "1 2\n"
      "2 3\n"
      "# comment inside the gap does not end anything\n"
      "\n"
      "0 0 -1\n"
      "0 2 0 # trailing comment\n"
      "-1 0 0\n");
  const auto ms = read_matrices(in);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0] == rows({{1, 2}, {2, 3}}));
  CHECK(ms[1] == rows({{0, 0, -1}, {0, 2, 0}, {-1, 0, 0}}));

  std::ostringstream out;
  const auto m = rows({{0.1, 1.0 / 3}, {1.0 / 3, -2e-17}});
  write_matrix(out, m);
  std::istringstream back(out.str());
  CHECK(read_matrices(back).at(0) == m);

  std::istringstream bad("1 2\n3 4\n");
  CHECK_THROWS(read_matrices(bad));
}
