#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "apcone/symcore.hpp"

namespace apcone {

enum class PlaneKind { type1, type2 };

// Parameters of a 3-plane in S^3 meeting the PSD cone only at diag(1,0,0).
// Type 1 uses c1..c8 and mu > 0; Type 2 uses c1..c5. The plane is conjugated
// by P = blockdiag(1, R(theta) * diag(1, reflect ? -1 : 1)).
struct PlaneSpec {
  PlaneKind kind = PlaneKind::type2;
  std::vector<double> c;
  double mu = 0;
  double theta = 0;
  bool reflect = false;

  static PlaneSpec type2(double c1, double c2, double c3, double c4, double c5);
  // Throws DomainError when the parameters violate the family's constraints.
  void validate() const;
  // c_i with the usual 1-based numbering
  double ci(int i) const { return c.at(static_cast<std::size_t>(i - 1)); }
};

template <class T>
struct Plane {
  AffineSubspace<T> e;                 // anchor U_* = diag(1,0,0)
  std::array<SymMat<T>, 3> constraints;  // A1, A2, A3 after conjugation
};

template <class T>
Plane<T> build_plane(const PlaneSpec& spec);

// Type-2 basis B1, B2, B3 before conjugation.
template <class T>
std::array<SymMat<T>, 3> type2_basis(const PlaneSpec& spec);

// P X P^T for the orthogonal P given by theta and reflect.
template <class T>
SymMat<T> conjugate(const PlaneSpec& spec, const SymMat<T>& x);

template <class T>
SymMat<T> intersection_point();  // diag(1,0,0)

// Type 1 -> 1, Type 2 -> 2 when c4 != 0 and 1 otherwise.
int singularity_degree(const PlaneSpec& spec);

// 3x3 minors of the 3x6 coefficient matrix of (B1, B2, B3) in the basis
// E11, E22, E33, (E12+E21)/sqrt2, (E13+E31)/sqrt2, (E23+E32)/sqrt2, ordered
// lexicographically by index triple.
template <class T>
std::array<T, 20> plucker_coords(const AffineSubspace<T>& e);

// Position of the triple i<j<k (0-based) in the lexicographic order.
int plucker_index(int i, int j, int k);

// Largest absolute value of the quadratic Grassmann-Plucker relations.
double plucker_relation_residual(const std::array<double, 20>& p);

struct RandomSpecOptions {
  double c_bound = 2.0;   // |c_i| <= c_bound
  double c4_min = 0.5;    // |c4| >= c4_min for Type 2
  bool random_frame = false;  // draw theta and reflect as well
  bool c3_nonzero = false;    // keep |c3| >= c4_min as well
};

PlaneSpec random_type2_spec(std::mt19937_64& rng, const RandomSpecOptions& opt = {});
PlaneSpec random_type1_spec(std::mt19937_64& rng, const RandomSpecOptions& opt = {});

std::string describe(const PlaneSpec& spec);

}  // namespace apcone
