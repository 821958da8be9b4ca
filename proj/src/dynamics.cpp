#include "distham/dynamics.hpp"

#include <cmath>

namespace distham {

FieldResult nonholonomic_field(const KFrame& frame) {
  if (!frame.nondegenerate())
    throw NumericalError("distributional two-form is singular (condition " +
                             std::to_string(frame.condition) + ")",
                         frame.condition);
  FieldResult r;
  r.coefficients = solve_checked(frame.omega_K.transpose(), frame.dH_K, kMaxCondition,
                                 "distributional Hamiltonian equation");
  r.chart = frame.k_basis * r.coefficients;
  r.ambient = frame.ambient_push * r.chart;
  return r;
}

FieldResult nonholonomic_field(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  return nonholonomic_field(build_k_frame(sys, x));
}

Vector projection_field(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  const PhasePoint z = embed(sys, x);
  const Vector xh = hamiltonian_field_vector(sys, to_phase_vector(z));
  const KFrame f = build_k_frame(sys, x);
  const Matrix fperp = symplectic_orthogonal(f_basis(sys, x.q));
  const Eigen::Index tm = f.ambient_push.cols();
  Matrix split(xh.size(), tm + fperp.cols());
  split << f.ambient_push, fperp;
  if (split.cols() != split.rows())
    throw NumericalError("TM and F-perp do not split the phase tangent space");
  const Vector c = solve_checked(split, xh, kMaxCondition, "Whitney splitting TM + F-perp");
  return f.ambient_push * c.head(tm);
}

Method parse_method(const std::string& name) {
  if (name == "rk4") return Method::rk4;
  if (name == "midpoint") return Method::midpoint;
  throw ArgumentError("unknown integration method '" + name + "' (rk4 | midpoint)");
}

std::string method_name(Method m) { return m == Method::rk4 ? "rk4" : "midpoint"; }

namespace {

struct Recorder {
  const MechanicalSystem& sys;
  const CotangentLiftedAction* action;
  Trajectory& traj;
  std::vector<Vector> momenta;

  void record(double t, const Vector& x) {
    const ConstrainedChartPoint c = chart_point(sys, x);
    const PhasePoint z = embed(sys, c);
    const double res = sys.k ? m_residual(sys, z).cwiseAbs().maxCoeff() : 0.0;
    traj.times.push_back(t);
    traj.states.push_back(c);
    traj.phase.push_back(z);
    traj.energy.push_back(hamiltonian(sys, z));
    traj.constraint_residual.push_back(res);
    traj.constraint_residual_max = std::max(traj.constraint_residual_max, res);
    if (action) momenta.push_back(momentum_map(*action, z));
  }
};

}  // namespace

Trajectory integrate(const MechanicalSystem& sys, const ConstrainedChartPoint& start,
                     double t_final, double dt, Method method,
                     const CotangentLiftedAction* action) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ArgumentError("t_final must be >= 0");
  const double ratio = t_final / dt;
  if (ratio > static_cast<double>(kMaxSteps))
    throw ArgumentError("step count exceeds " + std::to_string(kMaxSteps));
  const long long steps = t_final == 0.0 ? 0 : std::max(1LL, static_cast<long long>(std::ceil(ratio - 1e-9)));
  const double h = steps ? t_final / static_cast<double>(steps) : 0.0;

  Trajectory traj;
  Recorder rec{sys, action, traj, {}};
  auto field = [&](const Vector& x) { return nonholonomic_field(sys, chart_point(sys, x)).chart; };

  Vector x = chart_vector(start);
  rec.record(0.0, x);
  try {
    for (long long i = 1; i <= steps; ++i) {
      if (method == Method::rk4) {
        const Vector k1 = field(x);
        const Vector k2 = field(x + 0.5 * h * k1);
        const Vector k3 = field(x + 0.5 * h * k2);
        const Vector k4 = field(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      } else {
        Vector next = x + h * field(x);
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
          const Vector upd = x + h * field(0.5 * (x + next));
          const double delta = (upd - next).cwiseAbs().maxCoeff();
          next = upd;
          if (delta <= 1e-14 * (1.0 + next.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
          }
        }
        if (!converged) throw NumericalError("implicit midpoint iteration did not converge");
        x = next;
      }
      if (!x.allFinite()) throw NumericalError("state became non-finite");
      rec.record(i == steps ? t_final : static_cast<double>(i) * h, x);
    }
  } catch (const NumericalError& e) {
    traj.failure = std::string(e.what()) + " at t = " + std::to_string(traj.times.back());
  }
  if (action) {
    Matrix series(action->dim(), static_cast<Eigen::Index>(rec.momenta.size()));
    for (std::size_t j = 0; j < rec.momenta.size(); ++j)
      series.col(static_cast<Eigen::Index>(j)) = rec.momenta[j];
    traj.momentum_series = series;
  }
  return traj;
}

Diagnostics diagnostics(const Trajectory& traj) {
  Diagnostics d;
  if (traj.energy.empty()) return d;
  for (double e : traj.energy) d.energy_drift = std::max(d.energy_drift, std::abs(e - traj.energy[0]));
  d.constraint_max = traj.constraint_residual_max;
  if (traj.momentum_series) {
    const Matrix& s = *traj.momentum_series;
    Vector drift = Vector::Zero(s.rows());
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      drift = drift.cwiseMax((s.col(j) - s.col(0)).cwiseAbs());
    d.momentum_drift = drift;
  }
  return d;
}

}  // namespace distham
