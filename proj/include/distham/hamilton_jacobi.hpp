#pragma once

// Hamilton–Jacobi residuals for one-form sections γ: Q → T*Q and phase maps
// ε: T*Q → T*Q against a distributional Hamiltonian system.

#include <cstdint>

#include "distham/constraint_geometry.hpp"

namespace distham {

/// q ↦ (q, γ(q)); gamma is a SmoothMap n → n of covector coefficients.
struct OneFormSection {
  SmoothMap gamma;

  Vector operator()(const Vector& q) const { return gamma(q); }
  /// λ = γ∘π_Q evaluated at a phase point.
  PhasePoint lambda(const PhasePoint& z) const { return {z.q, gamma(z.q)}; }
};

struct PhaseMap {
  SmoothMap eps;

  PhasePoint operator()(const PhasePoint& z) const {
    return from_phase_vector(eps(to_phase_vector(z)));
  }
};

/// Points farther than this from M violate the residual hypotheses.
inline constexpr double kMembershipTol = 1e-8;
/// Largest symplecticity residual accepted for a Type II map.
inline constexpr double kSymplecticTol = 1e-8;

/// max |dγ(α_i, α_j)| over the D-frame fields at q.
double closedness_on_D(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q);

/// A(q) G(q)⁻¹ γ(q).
Vector gamma_into_M(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q);

/// max over the D-frame of the distance of Tγ·b_i from TM at γ(q). Since the
/// base of Tγ·b_i lies in D, zero means Tγ(D) ⊂ K.
double tgamma_in_K(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q);

/// |Tγ·X_H^γ − X_K·γ| at q. Throws HypothesisError when γ(q) is off M.
double type1_residual(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q);

/// |X_K(γ(q))|; zero iff the classical equation holds at q.
double classical_hj_residual(const MechanicalSystem& sys, const OneFormSection& g,
                             const Vector& q);

/// max(|DεᵀJDε − J|_max, |ω(Dε v, Dε w) − ω(v, w)| over random unit pairs).
double symplecticity_residual(const PhaseMap& e, const PhasePoint& z, int trials = 16,
                              std::uint64_t seed = 1);

/// |Tγ·X_H^ε − X_K·ε| at z. Throws HypothesisError when ε is not
/// symplectic at z, when ε(z) is off M, or when γ is off M over ε(z).
double type2_residual(const MechanicalSystem& sys, const OneFormSection& g, const PhaseMap& e,
                      const PhasePoint& z);

struct Type2Equivalence {
  double lhs_rhs_gap = 0.0;  // |τ_K·Tε·X_{H∘ε} − Tλ·X_H·ε|
  double hj_gap = 0.0;       // |Tγ·X_H^ε − X_K·ε|
  double symplecticity = 0.0;
  bool symplectic = false;
};

/// Both sides of the Type II equivalence. Does not reject non-symplectic ε;
/// it reports the flag instead. Throws HypothesisError when ε(z) is off M.
Type2Equivalence type2_equivalence_residual(const MechanicalSystem& sys,
                                            const OneFormSection& g, const PhaseMap& e,
                                            const PhasePoint& z);

struct Lemma33 {
  double r_i = 0.0;
  double r_ii = 0.0;
  double r_iii = 0.0;
};

/// v, w are phase tangents at z (length 2n).
Lemma33 lemma33_residuals(const MechanicalSystem& sys, const OneFormSection& g,
                          const PhasePoint& z, const Vector& v, const Vector& w);

/// dγ_q(x, y) = yᵀDγ x − xᵀDγ y for constant vectors x, y.
double d_gamma(const OneFormSection& g, const Vector& q, const Vector& x, const Vector& y);

/// |θ(Tγ·x) − γ(x)| with θ the canonical one-form.
double tautological_residual(const OneFormSection& g, const Vector& q, const Vector& x);

}  // namespace distham
