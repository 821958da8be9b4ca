#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distham/linalg.hpp"
#include "distham/smooth_map.hpp"

namespace distham {

/// Relative singular-value threshold for rank decisions on A(q).
inline constexpr double kRankTol = 1e-10;

/// Kinetic-minus-potential system on an n-chart with Pfaffian constraints
/// A(q)v = 0. The metric and constraint maps return row-major flattened
/// matrices (n*n and k*n entries).
struct MechanicalSystem {
  std::string name;
  int n = 0;
  int k = 0;
  std::vector<std::string> coordinates;
  SmoothMap metric;
  SmoothMap potential;
  SmoothMap constraints;
  Vector q_ref;
  // Column pivot pattern for the D-frame, chosen at q_ref and frozen.
  std::vector<int> pivots;
  std::vector<int> free_columns;
  std::vector<bool> periodic;

  int m() const { return n - k; }

  template <class T>
  Mat<T> G(const Vec<T>& q) const {
    const Vec<T> flat = metric(q);
    Mat<T> g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = flat[i * n + j];
    return g;
  }

  template <class T>
  Mat<T> A(const Vec<T>& q) const {
    Mat<T> a(k, n);
    if (k == 0) return a;
    const Vec<T> flat = constraints(q);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = flat[i * n + j];
    return a;
  }

  template <class T>
  T V(const Vec<T>& q) const {
    return potential(q)[0];
  }
};

struct PhasePoint {
  Vector q;
  Vector p;
};

/// Concatenate (q, p) into one 2n vector and back.
Vector to_phase_vector(const PhasePoint& z);
PhasePoint from_phase_vector(const Vector& z);

/// Validate the maps at q_ref and freeze the pivot pattern. When `pivots` is
/// given it is used instead of the greedy choice. Throws ConfigError on
/// k >= n, a non-SPD metric at q_ref, or a rank-deficient A(q_ref).
MechanicalSystem make_system(std::string name, std::vector<std::string> coordinates,
                             SmoothMap metric, SmoothMap potential, SmoothMap constraints,
                             Vector q_ref, std::optional<std::vector<int>> pivots = std::nullopt);

/// Greedy column pivots: repeatedly take the largest remaining |entry|
/// (lowest column, then lowest row, on ties) and eliminate its column.
std::vector<int> choose_pivots(const Matrix& a);

void check_dims(const MechanicalSystem& sys, const Vector& q, const char* what);

template <class T>
Vec<T> inverse_legendre_t(const MechanicalSystem& sys, const Vec<T>& q, const Vec<T>& p) {
  return solve_generic<T>(sys.G(q), p);
}

template <class T>
T hamiltonian_t(const MechanicalSystem& sys, const Vec<T>& q, const Vec<T>& p) {
  const Vec<T> v = inverse_legendre_t<T>(sys, q, p);
  return T(0.5) * dot<T>(p, v) + sys.V(q);
}

/// Basis of null A(q): B[free_j, j] = 1 and B[pivots, :] = −A_P⁻¹ A_f.
/// Throws NumericalError when A(q) loses rank or the frozen pivot block
/// degenerates.
template <class T>
Mat<T> d_basis_t(const MechanicalSystem& sys, const Vec<T>& q);

Vector legendre(const MechanicalSystem& sys, const Vector& q, const Vector& v);
Vector inverse_legendre(const MechanicalSystem& sys, const Vector& q, const Vector& p);
double hamiltonian(const MechanicalSystem& sys, const PhasePoint& z);
double lagrangian_energy(const MechanicalSystem& sys, const Vector& q, const Vector& v);

struct PhaseTangent {
  Vector qdot;
  Vector pdot;
};

/// (∂H/∂p, −∂H/∂q) by AD.
PhaseTangent hamiltonian_vector_field(const MechanicalSystem& sys, const PhasePoint& z);
/// Same as one 2n vector.
Vector hamiltonian_field_vector(const MechanicalSystem& sys, const Vector& z);

/// H as a SmoothMap R^{2n} -> R.
SmoothMap hamiltonian_map(const MechanicalSystem& sys);

Matrix d_basis(const MechanicalSystem& sys, const Vector& q);

/// The D-frame columns q ↦ B_D(q)e_i as vector fields.
std::vector<SmoothMap> d_frame_fields(const MechanicalSystem& sys);

/// Nondegeneracy of Bᵀ G B, scale free: |det|^{1/m} / (‖·‖_F/√m) > 1e-8.
bool d_regularity(const MechanicalSystem& sys, const Vector& q);
double d_regularity_ratio(const MechanicalSystem& sys, const Vector& q);

// --- implementation of the generic frame ----------------------------------

void check_constraint_rank(const MechanicalSystem& sys, const Matrix& a);

template <class T>
Mat<T> d_basis_t(const MechanicalSystem& sys, const Vec<T>& q) {
  const int n = sys.n;
  const int k = sys.k;
  const int m = n - k;
  if (q.size() != n) throw DimensionError("d_basis: expected q of length " + std::to_string(n));
  if (k == 0) return lift<T>(Matrix(Matrix::Identity(n, n)));
  const Mat<T> a = sys.A(q);
  check_constraint_rank(sys, values(a));
  Mat<T> ap(k, k);
  Mat<T> af(k, m);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) ap(i, j) = a(i, sys.pivots[j]);
    for (int j = 0; j < m; ++j) af(i, j) = a(i, sys.free_columns[j]);
  }
  const Mat<T> x = solve_generic<T>(ap, af);
  Mat<T> b(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = T(0.0);
  for (int j = 0; j < m; ++j) {
    b(sys.free_columns[j], j) = T(1.0);
    for (int i = 0; i < k; ++i) b(sys.pivots[i], j) = -x(i, j);
  }
  return b;
}

}  // namespace distham
