#pragma once

// The constraint submanifold M = FL(D) in the intrinsic chart (q, u), where
// u are the velocity coefficients in the D-frame. The embedding is
// (q, u) ↦ (q, G(q) B_D(q) u). K is represented in the chart as
// {(δq, δu) : A(q)δq = 0} with basis {(B e_i, 0)} ∪ {(0, e_j)}.

#include "distham/mechanics.hpp"

namespace distham {

struct ConstrainedChartPoint {
  Vector q;
  Vector u;
};

/// Nondegeneracy threshold for ω_K: |det|^{1/2m} over the Frobenius scale.
inline constexpr double kNondegeneracyTol = 1e-8;
/// Condition numbers above this are treated as singular.
inline constexpr double kMaxCondition = 1e12;

template <class T>
Vec<T> embed_momentum_t(const MechanicalSystem& sys, const Vec<T>& q, const Vec<T>& u) {
  const Mat<T> b = d_basis_t<T>(sys, q);
  return matvec<T>(sys.G(q), matvec<T>(b, u));
}

/// A(q) G(q)⁻¹ p.
template <class T>
Vec<T> m_residual_t(const MechanicalSystem& sys, const Vec<T>& q, const Vec<T>& p) {
  if (sys.k == 0) return Vec<T>(0);
  return matvec<T>(sys.A(q), inverse_legendre_t<T>(sys, q, p));
}

PhasePoint embed(const MechanicalSystem& sys, const ConstrainedChartPoint& x);
Vector m_residual(const MechanicalSystem& sys, const PhasePoint& z);

/// Chart coordinates of a point of M: u = (G⁻¹p) restricted to the free
/// columns. Exact inverse of embed on M.
ConstrainedChartPoint chart_of(const MechanicalSystem& sys, const PhasePoint& z);

/// (q, u) stacked into one vector of length n + m, and back.
Vector chart_vector(const ConstrainedChartPoint& x);
ConstrainedChartPoint chart_point(const MechanicalSystem& sys, const Vector& x);

/// The embedding as a SmoothMap R^{n+m} -> R^{2n}.
SmoothMap embed_map(const MechanicalSystem& sys);

struct KFrame {
  ConstrainedChartPoint base;
  Matrix d_basis;       // n × m
  Matrix k_basis;       // (n+m) × 2m, chart tangents spanning K
  Matrix omega_K;       // 2m × 2m
  Vector dH_K;          // 2m
  Matrix ambient_push;  // 2n × (n+m), Jacobian of the embedding
  double nondegeneracy = 0.0;
  double condition = 0.0;

  /// Ambient images of the K basis, 2n × 2m.
  Matrix pushed_basis() const { return ambient_push * k_basis; }
  bool nondegenerate() const {
    return nondegeneracy > kNondegeneracyTol && condition <= kMaxCondition;
  }
};

/// Assemble the frame without judging ω_K.
KFrame build_k_frame(const MechanicalSystem& sys, const ConstrainedChartPoint& x);

/// Assemble the frame; throws NumericalError (with the condition number)
/// when ω_K is singular.
KFrame k_frame(const MechanicalSystem& sys, const ConstrainedChartPoint& x);

/// ω_M = i*_M ω on the full (n+m) chart, then restricted to the K basis.
/// A second path to ω_K, used to cross-check k_frame.
Matrix omega_M(const MechanicalSystem& sys, const ConstrainedChartPoint& x);
Matrix omega_K_via_pullback(const MechanicalSystem& sys, const ConstrainedChartPoint& x);

/// Ambient basis of F at q: {(a, b) : A(q)a = 0}, 2n × (m + n).
Matrix f_basis(const MechanicalSystem& sys, const Vector& q);

/// Columns spanning the ω-orthogonal of span(basis). Throws NumericalError
/// when the basis is rank deficient.
Matrix symplectic_orthogonal(const Matrix& basis);

struct ConditionsReport {
  bool admissible = false;
  bool compatible = false;
  double omega_K_condition = 0.0;
  double nondegeneracy = 0.0;
  int rank_F = 0;
  int dim_M = 0;
  int rank_TM_plus_Fperp = 0;
};

ConditionsReport conditions_check(const MechanicalSystem& sys, const ConstrainedChartPoint& x);

/// Projection of an ambient tangent v at the frame's base onto K along the
/// ω_K-complement: the unique τ ∈ K with ω(τ, k) = ω(v, k) for all k ∈ K.
Vector tau_K(const KFrame& frame, const Vector& v);

}  // namespace distham
