#include "distham/reduction.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "distham/builtin.hpp"
#include "distham/calculus.hpp"

namespace distham {

namespace {

template <class X>
using S = typename std::decay_t<X>::Scalar;

void require_populated(const QuotientChart& chart) {
  if (!chart.populated())
    throw ArgumentError("chart '" + chart.name + "' has not been reduced yet");
}

Matrix project_push(const MechanicalSystem& sys, const QuotientChart& chart,
                    const ConstrainedChartPoint& x) {
  const SmoothMap& proj = chart.project;
  const auto& s = sys;
  return jacobian_of(
      [&proj, &s](const auto& xv) {
        using T = S<decltype(xv)>;
        const Vec<T> q = xv.head(s.n);
        const Vec<T> u = xv.tail(s.m());
        Vec<T> z(2 * s.n);
        z << q, embed_momentum_t<T>(s, q, u);
        return proj(z);
      },
      chart_vector(x));
}

Vector pushed_field(const MechanicalSystem& sys, const QuotientChart& chart,
                    const ConstrainedChartPoint& x) {
  const Vector z = to_phase_vector(embed(sys, x));
  return jacobian(chart.project, z) * nonholonomic_field(sys, x).ambient;
}

// Time-s flow of the lifted generator by RK4; exact for translations.
Vector orbit_point(const SmoothMap& xi, Vector z, double s) {
  constexpr int steps = 200;
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = lifted_generator(xi, z);
    const Vector k2 = lifted_generator(xi, z + 0.5 * h * k1);
    const Vector k3 = lifted_generator(xi, z + 0.5 * h * k2);
    const Vector k4 = lifted_generator(xi, z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

void check_chart_dims(const MechanicalSystem& sys, const QuotientChart& chart) {
  if (chart.project.input_dim() != 2 * sys.n || chart.project.output_dim() != chart.reduced_dim)
    throw DimensionError("chart '" + chart.name + "': project must map R^" +
                         std::to_string(2 * sys.n) + " to R^" + std::to_string(chart.reduced_dim));
  if (!chart.section.empty() && (chart.section.input_dim() != chart.reduced_dim ||
                                 chart.section.output_dim() != sys.n + sys.m()))
    throw DimensionError("chart '" + chart.name + "': section must map R^" +
                         std::to_string(chart.reduced_dim) + " to R^" +
                         std::to_string(sys.n + sys.m()));
  if (!chart.reference.empty() && (chart.reference.input_dim() != chart.reduced_dim ||
                                   chart.reference.output_dim() != chart.reduced_dim))
    throw DimensionError("chart '" + chart.name + "': reference field has the wrong shape");
  for (const auto& g : chart.action.generators)
    if (g.input_dim() != sys.n || g.output_dim() != sys.n)
      throw DimensionError("chart '" + chart.name + "': generator has the wrong shape");
}

void require_hypothesis(bool ok, const std::string& what, double value) {
  if (!ok) throw HypothesisError(what + " (residual " + std::to_string(value) + ")");
}

}  // namespace

Vector project_chart(const MechanicalSystem& sys, const QuotientChart& chart,
                     const ConstrainedChartPoint& x) {
  return chart.project(to_phase_vector(embed(sys, x)));
}

ConstrainedChartPoint lift_to_M(const MechanicalSystem& sys, const QuotientChart& chart,
                                const Vector& xbar) {
  if (xbar.size() != chart.reduced_dim)
    throw DimensionError("reduced point must have length " + std::to_string(chart.reduced_dim));
  if (!chart.section.empty()) return chart_point(sys, chart.section(xbar));
  // Minimum-norm Gauss–Newton on project∘embed(x) = xbar from the origin.
  ConstrainedChartPoint x{sys.q_ref, Vector::Zero(sys.m())};
  const double tol = 1e-13 * (1.0 + xbar.cwiseAbs().maxCoeff());
  for (int it = 0; it < 100; ++it) {
    const Vector f = project_chart(sys, chart, x) - xbar;
    if (f.cwiseAbs().maxCoeff() <= tol) return x;
    const Matrix jac = project_push(sys, chart, x);
    const Vector step = jac.completeOrthogonalDecomposition().solve(f);
    x = chart_point(sys, chart_vector(x) - step);
  }
  throw NumericalError("no preimage found for the reduced point in chart '" + chart.name + "'");
}

ReduceReport audit_reduction(const MechanicalSystem& sys, const QuotientChart& chart, int samples,
                             std::uint64_t seed) {
  check_chart_dims(sys, chart);
  ReduceReport rep;
  rep.samples = samples;
  rep.submersion_sigma_min = INFINITY;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(-2.0, 2.0);
  std::uniform_real_distribution<double> us(-1.0, 1.0);

  std::vector<double> worst_ref(chart.reduced_dim, 0.0);
  std::vector<ReductionConflict> first(chart.reduced_dim);

  auto fail = [&rep](const std::string& why) {
    if (rep.failure.empty()) rep.failure = why;
  };

  try {
    for (int s = 0; s < samples; ++s) {
      ConstrainedChartPoint x{Vector(sys.n), Vector(sys.m())};
      for (auto& v : x.q) v = uq(rng);
      for (auto& v : x.u) v = uq(rng);
      const Vector z = to_phase_vector(embed(sys, x));
      const Vector xbar = chart.project(z);
      const Vector v0 = pushed_field(sys, chart, x);
      const double h0 = hamiltonian(sys, from_phase_vector(z));
      const double scale = 1.0 + v0.cwiseAbs().maxCoeff();

      const Eigen::JacobiSVD<Matrix> svd(project_push(sys, chart, x));
      const Vector sv = svd.singularValues();
      rep.submersion_sigma_min = std::min(
          rep.submersion_sigma_min, sv.size() < chart.reduced_dim ? 0.0 : sv[sv.size() - 1]);

      auto compare_fiber_point = [&](const ConstrainedChartPoint& y) {
        rep.fiber_variance =
            std::max(rep.fiber_variance, (pushed_field(sys, chart, y) - v0).cwiseAbs().maxCoeff() / scale);
        rep.energy_variance =
            std::max(rep.energy_variance, std::abs(hamiltonian(sys, embed(sys, y)) - h0));
      };

      const ConstrainedChartPoint lifted = lift_to_M(sys, chart, xbar);
      rep.section_residual = std::max(
          rep.section_residual, (project_chart(sys, chart, lifted) - xbar).cwiseAbs().maxCoeff());
      rep.hamiltonian_residual =
          std::max(rep.hamiltonian_residual, std::abs(hamiltonian(sys, embed(sys, lifted)) - h0));
      compare_fiber_point(lifted);

      Vector combined = z;
      std::vector<Vector> orbit;
      for (const auto& xi : chart.action.generators) {
        const double t = us(rng);
        orbit.push_back(orbit_point(xi, z, t));
        combined = orbit_point(xi, combined, us(rng));
      }
      if (!chart.action.generators.empty()) orbit.push_back(combined);
      for (const Vector& zo : orbit) {
        rep.projection_variance =
            std::max(rep.projection_variance, (chart.project(zo) - xbar).cwiseAbs().maxCoeff());
        const PhasePoint po = from_phase_vector(zo);
        const double mres = sys.k ? m_residual(sys, po).cwiseAbs().maxCoeff() : 0.0;
        rep.membership = std::max(rep.membership, mres);
        if (mres <= kMembershipTol) compare_fiber_point(chart_of(sys, po));
      }

      if (!chart.reference.empty()) {
        const Vector ref = chart.reference(xbar);
        for (int c = 0; c < chart.reduced_dim; ++c) {
          const double gap = std::abs(v0[c] - ref[c]);
          if (gap > worst_ref[c]) {
            if (worst_ref[c] <= 1e-9 && gap > 1e-9) {
              const std::string cname =
                  c < static_cast<int>(chart.coordinates.size()) ? chart.coordinates[c] : "";
              first[c] = {c, cname, xbar, v0[c], ref[c]};
            }
            worst_ref[c] = gap;
          }
        }
      }
    }
  } catch (const Error& e) {
    fail(std::string("audit could not evaluate the chart: ") + e.what());
  }

  for (int c = 0; c < chart.reduced_dim; ++c) {
    if (worst_ref[c] > 1e-9)
      rep.conflicts.push_back(first[c]);
    else
      rep.reference_gap = std::max(rep.reference_gap, worst_ref[c]);
  }

  if (!(rep.projection_variance <= kFiberTol))
    fail("project is not constant on orbits (" + std::to_string(rep.projection_variance) + ")");
  if (!(rep.membership <= kMembershipTol))
    fail("the action does not preserve M (" + std::to_string(rep.membership) + ")");
  if (!(rep.fiber_variance <= kFiberTol))
    fail("X_K does not push down consistently (" + std::to_string(rep.fiber_variance) + ")");
  if (!(rep.energy_variance <= 1e-12 && rep.hamiltonian_residual <= 1e-12))
    fail("H is not constant on fibers (" +
         std::to_string(std::max(rep.energy_variance, rep.hamiltonian_residual)) + ")");
  if (!(rep.section_residual <= 1e-10))
    fail("section is not a right inverse of project (" + std::to_string(rep.section_residual) + ")");
  if (!(rep.submersion_sigma_min > 1e-8)) fail("project is not a submersion on M");
  rep.passed = rep.failure.empty();
  return rep;
}

QuotientChart reduce(const MechanicalSystem& sys, QuotientChart chart, ReduceReport* report,
                     int samples, std::uint64_t seed) {
  const ReduceReport rep = audit_reduction(sys, chart, samples, seed);
  if (report) *report = rep;
  if (!rep.passed) throw HypothesisError("reduction audit failed for '" + chart.name + "': " + rep.failure);
  const QuotientChart base = chart;
  chart.reduced_field = [sys, base](const Vector& xbar) {
    return pushed_field(sys, base, lift_to_M(sys, base, xbar));
  };
  chart.reduced_hamiltonian = [sys, base](const Vector& xbar) {
    return hamiltonian(sys, embed(sys, lift_to_M(sys, base, xbar)));
  };
  return chart;
}

double pi_relatedness_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                               const ConstrainedChartPoint& x) {
  require_populated(chart);
  return (pushed_field(sys, chart, x) - chart.reduced_field(project_chart(sys, chart, x))).norm();
}

namespace {

Matrix reduced_section_jacobian(const QuotientChart& chart, const OneFormSection& g,
                                const Vector& q) {
  const SmoothMap& proj = chart.project;
  const SmoothMap& gam = g.gamma;
  return jacobian_of(
      [&proj, &gam](const auto& qv) {
        using T = S<decltype(qv)>;
        Vec<T> z(2 * qv.size());
        z << qv, gam(Vec<T>(qv));
        return proj(z);
      },
      q);
}

}  // namespace

Vector reduced_section(const QuotientChart& chart, const OneFormSection& g, const Vector& q) {
  Vector z(2 * q.size());
  z << q, g(q);
  return chart.project(z);
}

double section_invariance(const QuotientChart& chart, const OneFormSection& g, const Vector& q) {
  const Matrix dg = reduced_section_jacobian(chart, g, q);
  double worst = 0.0;
  for (const auto& xi : chart.action.generators)
    worst = std::max(worst, (dg * xi(q)).cwiseAbs().maxCoeff());
  return worst;
}

double reduced_type1_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                              const OneFormSection& g, const Vector& q) {
  require_populated(chart);
  const double mres = sys.k ? gamma_into_M(sys, g, q).cwiseAbs().maxCoeff() : 0.0;
  require_hypothesis(mres <= kMembershipTol, "gamma(q) is off M", mres);
  const double closed = closedness_on_D(sys, g, q);
  require_hypothesis(closed <= kMembershipTol, "gamma is not closed on D", closed);
  const double inv = section_invariance(chart, g, q);
  require_hypothesis(inv <= kMembershipTol, "reduced section is not invariant", inv);
  const Vector xh = inverse_legendre(sys, q, g(q));
  const Vector lhs = reduced_section_jacobian(chart, g, q) * xh;
  return (lhs - chart.reduced_field(reduced_section(chart, g, q))).norm();
}

double map_equivariance(const QuotientChart& chart, const PhaseMap& e, const PhasePoint& z) {
  const Vector x = to_phase_vector(z);
  const Vector ex = e.eps(x);
  const Matrix de = jacobian(e.eps, x);
  double worst = 0.0;
  for (const auto& xi : chart.action.generators)
    worst = std::max(worst,
                     (de * lifted_generator(xi, x) - lifted_generator(xi, ex)).cwiseAbs().maxCoeff());
  return worst;
}

ReducedType2 reduced_type2_residual(const MechanicalSystem& sys, const QuotientChart& chart,
                                    const OneFormSection& g, const PhaseMap& e,
                                    const PhasePoint& z) {
  require_populated(chart);
  const double symp = symplecticity_residual(e, z);
  require_hypothesis(symp <= kSymplecticTol, "phase map is not symplectic", symp);
  const double eq = map_equivariance(chart, e, z);
  require_hypothesis(eq <= kMembershipTol, "phase map is not equivariant", eq);
  ReducedType2 r;
  r.unreduced = type2_residual(sys, g, e, z);
  const PhasePoint ez = e(z);
  const double inv = section_invariance(chart, g, ez.q);
  require_hypothesis(inv <= kMembershipTol, "reduced section is not invariant", inv);
  const Vector xh = inverse_legendre(sys, ez.q, ez.p);
  const Vector lhs = reduced_section_jacobian(chart, g, ez.q) * xh;
  r.reduced = (lhs - chart.reduced_field(chart.project(to_phase_vector(ez)))).norm();
  return r;
}

Vector momentum_drift(const Trajectory& traj, const CotangentLiftedAction& action) {
  Vector drift = Vector::Zero(action.dim());
  if (traj.phase.empty()) return drift;
  const Vector j0 = momentum_map(action, traj.phase.front());
  for (const auto& z : traj.phase) drift = drift.cwiseMax((momentum_map(action, z) - j0).cwiseAbs());
  return drift;
}

std::vector<std::string> builtin_chart_names() { return {"particle-R2", "disk-R2", "disk-SE2"}; }

namespace {

DiskParameters disk_parameters_of(const MechanicalSystem& sys) {
  if (sys.n != 4 || sys.k != 2)
    throw ArgumentError("disk charts need a 4-coordinate system with 2 constraints");
  const Vector q0 = Vector::Zero(4);
  const Matrix g = sys.G<double>(q0);
  const Matrix a = sys.A<double>(q0);
  return {g(0, 0), g(2, 2), g(3, 3), -a(0, 2)};
}

QuotientChart particle_r2() {
  QuotientChart c;
  c.name = "particle-R2";
  c.coordinates = {"y", "p_x", "p_y"};
  c.reduced_dim = 3;
  c.project = SmoothMap::from(6, 3, [](const auto& z) {
    using T = S<decltype(z)>;
    Vec<T> r(3);
    r << z[1], z[3], z[4];
    return r;
  }, "project");
  c.section = SmoothMap::from(3, 5, [](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(5);
    r << T(0.0), x[0], T(0.0), x[1], x[2];
    return r;
  }, "section");
  // ẏ = 0, ṗ_x = 0, ṗ_y = −σσ′p_x² with σ(y) = y.
  c.reference = SmoothMap::from(3, 3, [](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(3);
    r << T(0.0), T(0.0), -x[0] * x[1] * x[1];
    return r;
  }, "reference");
  c.action = particle_translation_action();
  return c;
}

QuotientChart disk_r2(const DiskParameters& dp) {
  QuotientChart c;
  c.name = "disk-R2";
  c.coordinates = {"theta", "phi", "p_theta", "p_phi"};
  c.reduced_dim = 4;
  c.project = SmoothMap::from(8, 4, [](const auto& z) {
    using T = S<decltype(z)>;
    Vec<T> r(4);
    r << z[2], z[3], z[6], z[7];
    return r;
  }, "project");
  c.section = SmoothMap::from(4, 6, [dp](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(6);
    r << T(0.0), T(0.0), x[0], x[1], x[2] / T(dp.I), x[3] / T(dp.J);
    return r;
  }, "section");
  c.reference = SmoothMap::from(4, 4, [dp](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(4);
    r << x[2] / T(dp.I), x[3] / T(dp.J), T(0.0), T(0.0);
    return r;
  }, "reference");
  c.action = disk_translation_action();
  return c;
}

QuotientChart disk_se2(const DiskParameters& dp) {
  QuotientChart c;
  c.name = "disk-SE2";
  c.coordinates = {"theta", "p_theta", "p_phi"};
  c.reduced_dim = 3;
  c.project = SmoothMap::from(8, 3, [](const auto& z) {
    using T = S<decltype(z)>;
    Vec<T> r(3);
    r << z[2], z[6], z[7];
    return r;
  }, "project");
  c.section = SmoothMap::from(3, 6, [dp](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(6);
    r << T(0.0), T(0.0), x[0], T(0.0), x[1] / T(dp.I), x[2] / T(dp.J);
    return r;
  }, "section");
  c.reference = SmoothMap::from(3, 3, [dp](const auto& x) {
    using T = S<decltype(x)>;
    Vec<T> r(3);
    r << x[1] / T(dp.I), T(0.0), T(0.0);
    return r;
  }, "reference");
  c.action = disk_se2_action();
  return c;
}

}  // namespace

QuotientChart builtin_chart(const std::string& name, const MechanicalSystem& sys) {
  if (name == "particle-R2") {
    if (sys.n != 3 || sys.k != 1)
      throw ArgumentError("particle-R2 needs a 3-coordinate system with 1 constraint");
    return particle_r2();
  }
  if (name == "disk-R2") return disk_r2(disk_parameters_of(sys));
  if (name == "disk-SE2") return disk_se2(disk_parameters_of(sys));
  throw ArgumentError("unknown chart '" + name + "' (particle-R2 | disk-R2 | disk-SE2)");
}

}  // namespace distham
