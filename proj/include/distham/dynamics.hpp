#pragma once

#include <optional>
#include <string>
#include <vector>

#include "distham/action.hpp"
#include "distham/constraint_geometry.hpp"

namespace distham {

struct FieldResult {
  Vector chart;         // (δq, δu), length n + m
  Vector ambient;       // pushed into T(T*Q), length 2n
  Vector coefficients;  // in the K basis, length 2m
};

/// X_K from i_{X_K} ω_K = dH_K, i.e. ω_Kᵀ c = dH_K with
/// omega_K[i][j] = ω(k_i, k_j).
FieldResult nonholonomic_field(const MechanicalSystem& sys, const ConstrainedChartPoint& x);
FieldResult nonholonomic_field(const KFrame& frame);

/// X_H at embed(x) split along T(T*Q) = TM ⊕ F⊥; returns the TM part.
Vector projection_field(const MechanicalSystem& sys, const ConstrainedChartPoint& x);

enum class Method { rk4, midpoint };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct Trajectory {
  std::vector<double> times;
  std::vector<ConstrainedChartPoint> states;
  std::vector<PhasePoint> phase;
  std::vector<double> energy;
  std::vector<double> constraint_residual;
  double constraint_residual_max = 0.0;
  std::optional<Matrix> momentum_series;  // dim g × steps
  std::optional<std::string> failure;     // set when the field failed mid-run
};

inline constexpr long long kMaxSteps = 100000000LL;

/// Integrate the chart ODE (q̇, u̇) = X_K with a uniform step h ≤ dt that
/// lands exactly on t_final. A solve failure mid-run stops the integration
/// and returns what was computed with `failure` set.
Trajectory integrate(const MechanicalSystem& sys, const ConstrainedChartPoint& start,
                     double t_final, double dt, Method method = Method::rk4,
                     const CotangentLiftedAction* action = nullptr);

struct Diagnostics {
  double energy_drift = 0.0;
  double constraint_max = 0.0;
  std::optional<Vector> momentum_drift;
};

Diagnostics diagnostics(const Trajectory& traj);

}  // namespace distham
