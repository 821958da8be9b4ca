#pragma once

// Symmetry reduction through an explicit quotient chart of M, reduced HJ
// residuals, and momentum diagnostics.

#include <functional>
#include <string>
#include <vector>

#include "distham/action.hpp"
#include "distham/dynamics.hpp"
#include "distham/hamilton_jacobi.hpp"

namespace distham {

struct QuotientChart {
  std::string name;
  std::vector<std::string> coordinates;  // reduced coordinate names
  int reduced_dim = 0;
  /// Ambient (q, p) ∈ R^{2n} restricted to M ↦ reduced coordinates.
  SmoothMap project;
  /// Optional right inverse: reduced ↦ chart (q, u) ∈ R^{n+m}. Without it,
  /// preimages are found by Gauss–Newton.
  SmoothMap section;
  /// Optional closed-form reduced field to compare against.
  SmoothMap reference;
  /// Symmetry whose orbits are the fibers of project.
  CotangentLiftedAction action;

  /// Filled by reduce.
  std::function<Vector(const Vector&)> reduced_field;
  std::function<double(const Vector&)> reduced_hamiltonian;

  bool populated() const { return static_cast<bool>(reduced_field); }
};

/// project∘embed on the (q, u) chart.
Vector project_chart(const MechanicalSystem& sys, const QuotientChart& chart,
                     const ConstrainedChartPoint& x);

/// A chart point over the reduced point xbar.
ConstrainedChartPoint lift_to_M(const MechanicalSystem& sys, const QuotientChart& chart,
                                const Vector& xbar);

struct ReductionConflict {
  int component = 0;
  std::string coordinate;
  Vector at;  // reduced point of the first disagreement
  double pushed = 0.0;
  double printed = 0.0;
};

struct ReduceReport {
  int samples = 0;
  double projection_variance = 0.0;  // |project(g·z) − project(z)| over orbit samples
  double fiber_variance = 0.0;       // spread of Dproject·X_K over a fiber
  double energy_variance = 0.0;      // spread of H over a fiber
  double membership = 0.0;           // orbit samples' distance from M
  double section_residual = 0.0;     // |project(lift(xbar)) − xbar|
  double hamiltonian_residual = 0.0; // |h∘project − H∘embed|
  double submersion_sigma_min = 0.0; // smallest singular value of Dproject restricted to TM
  double reference_gap = 0.0;        // max gap over components that agree with the reference
  std::vector<ReductionConflict> conflicts;
  bool passed = false;
  std::string failure;
};

inline constexpr double kFiberTol = 1e-10;

/// Sampling audit of the chart against the system. Never throws for audit
/// failures; the report says what failed.
ReduceReport audit_reduction(const MechanicalSystem& sys, const QuotientChart& chart,
                             int samples = 20, std::uint64_t seed = 1);

/// Populate reduced_field and reduced_hamiltonian. Throws HypothesisError
/// when the audit fails.
QuotientChart reduce(const MechanicalSystem& sys, QuotientChart chart,
                     ReduceReport* report = nullptr, int samples = 20, std::uint64_t seed = 1);

/// |Dproject·X_K(x) − reduced_field(project(x))|.
double pi_relatedness_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                               const ConstrainedChartPoint& x);

/// γ̄ = project∘γ : Q → reduced.
Vector reduced_section(const QuotientChart& chart, const OneFormSection& g, const Vector& q);

/// max_i |Dγ̄·ξ_i(q)|; zero when γ̄ is constant along orbits.
double section_invariance(const QuotientChart& chart, const OneFormSection& g, const Vector& q);

/// |Dγ̄·X_H^γ − X_K̄(γ̄(q))|. Throws HypothesisError when γ(q) is off M, γ is
/// not closed on D at q, or γ̄ is not invariant.
double reduced_type1_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                              const OneFormSection& g, const Vector& q);

/// max_i |Dε·ξ̂_i(z) − ξ̂_i(ε(z))| over the lifted generators.
double map_equivariance(const QuotientChart& chart, const PhaseMap& e, const PhasePoint& z);

struct ReducedType2 {
  double reduced = 0.0;
  double unreduced = 0.0;
};

/// Reduced and unreduced Type II residuals at z. Throws HypothesisError when ε
/// is not symplectic or not equivariant, or when ε(z) is off M.
ReducedType2 reduced_type2_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                                    const OneFormSection& g, const PhaseMap& e,
                                    const PhasePoint& z);

/// Per-component max |J_i(t) − J_i(0)| along the trajectory.
Vector momentum_drift(const Trajectory& traj, const CotangentLiftedAction& action);

/// Names accepted by builtin_chart.
std::vector<std::string> builtin_chart_names();

/// "particle-R2", "disk-R2" or "disk-SE2", built for sys (the disk charts read
/// m, I, J, R from sys). Throws ArgumentError for unknown names.
QuotientChart builtin_chart(const std::string& name, const MechanicalSystem& sys);

}  // namespace distham
