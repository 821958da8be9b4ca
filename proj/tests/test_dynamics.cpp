#include <doctest.h>

#include <cmath>
#include <random>

#include "distham/builtin.hpp"
#include "distham/dynamics.hpp"
#include "support.hpp"

using namespace distham;
using distham::testing::random_chart_point;
using distham::testing::vec;

TEST_CASE("nonholonomic field oracles") {
  const auto particle = particle_system();
  const auto r = nonholonomic_field(particle, {vec({0, 1, 0}), vec({2, 3})});
  CHECK((r.ambient - vec({2, 3, 2, -3, 0, 3})).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.chart.size() == 5);

  const auto disk = disk_system();
  const auto d = nonholonomic_field(disk, {vec({0, 0, 0, 0}), vec({1, 3})});
  // u = (θ̇, φ̇), so q̇ = (R θ̇ cos φ, R θ̇ sin φ, θ̇, φ̇) and the chart momenta stay fixed.
  CHECK((d.ambient.head(4) - vec({1, 0, 1, 3})).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(d.chart.tail(2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("agreement with the Lagrange-d'Alembert equations") {
  std::mt19937_64 rng(31);
  const auto particle = particle_system();
  const auto disk = disk_system({1.3, 0.8, 2.0, 0.6});
  const auto cc = distham::testing::curved_constrained_system();
  for (const auto* sys : {&particle, &disk, &cc}) {
    for (int t = 0; t < 100; ++t) {
      const auto x = random_chart_point(*sys, 2, 2, rng);
      const auto r = nonholonomic_field(*sys, x);
      const PhasePoint z = embed(*sys, x);
      const Vector v = inverse_legendre(*sys, z.q, z.p);
      const Vector ld = distham::testing::lagrange_dalembert(*sys, z.q, v);
      CHECK((r.ambient - ld).cwiseAbs().maxCoeff() <= 1e-9 * (1 + ld.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("field properties") {
  std::mt19937_64 rng(32);
  const auto particle = particle_system();
  const auto disk = disk_system();
  const auto cc = distham::testing::curved_constrained_system();
  for (const auto* sys : {&particle, &disk, &cc}) {
    for (int t = 0; t < 100; ++t) {
      const auto x = random_chart_point(*sys, 2, 2, rng);
      const KFrame f = k_frame(*sys, x);
      const auto r = nonholonomic_field(f);
      // Projection along F⊥.
      const Vector pr = projection_field(*sys, x);
      CHECK((pr - r.ambient).cwiseAbs().maxCoeff() <= 1e-9);
      // Tangent to M.
      const MechanicalSystem& s = *sys;
      const auto res = SmoothMap::from(2 * s.n, s.k, [&s](const auto& z) {
        using T = typename std::decay_t<decltype(z)>::Scalar;
        return m_residual_t<T>(s, Vec<T>(z.head(s.n)), Vec<T>(z.tail(s.n)));
      });
      const Vector base = to_phase_vector(embed(s, x));
      CHECK((jacobian(res, base) * r.ambient).cwiseAbs().maxCoeff() <= 1e-10);
      // Base in D.
      const Vector qdot = r.ambient.head(sys->n);
      CHECK((sys->A<double>(x.q) * qdot).cwiseAbs().maxCoeff() <= 1e-10);
      // Energy conserved.
      CHECK(std::abs(gradient(hamiltonian_map(s), base).dot(r.ambient)) <= 1e-10);
      CHECK(std::abs(f.dH_K.dot(r.coefficients)) <= 1e-10);
    }
  }
}

TEST_CASE("unconstrained systems reduce to Hamilton's equations") {
  std::mt19937_64 rng(33);
  const auto curved = curved_free_system();
  for (int t = 0; t < 50; ++t) {
    const auto x = random_chart_point(curved, 2, 2, rng);
    const Vector z = to_phase_vector(embed(curved, x));
    const Vector xh = hamiltonian_field_vector(curved, z);
    CHECK((nonholonomic_field(curved, x).ambient - xh).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("particle trajectory against the closed form") {
  const auto particle = particle_system();
  const auto traj = integrate(particle, {vec({0, 0, 0}), vec({2, 3})}, 1.0, 1e-3);
  REQUIRE_FALSE(traj.failure);
  CHECK(traj.times.back() == 1.0);
  CHECK(traj.times.size() == 1001);
  // u1 = c/√(1+y²), y = 3t, x = (c/3) asinh(3t), z = (c/3)(√(1+9t²) − 1) with c = 2.
  const PhasePoint& end = traj.phase.back();
  const Vector expected_q = vec({2.0 / 3.0 * std::asinh(3.0), 3.0, 2.0 / 3.0 * (std::sqrt(10.0) - 1)});
  CHECK((end.q - expected_q).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(traj.states.back().u[0] == doctest::Approx(2.0 / std::sqrt(10.0)).epsilon(1e-12));
  CHECK(traj.states.back().u[1] == doctest::Approx(3.0).epsilon(1e-12));
  const auto d = diagnostics(traj);
  CHECK(d.energy_drift <= 1e-10);
  CHECK(d.constraint_max <= 1e-12);

  const auto mid = integrate(particle, {vec({0, 0, 0}), vec({2, 3})}, 1.0, 1e-3, Method::midpoint);
  REQUIRE_FALSE(mid.failure);
  CHECK((mid.phase.back().q - expected_q).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("long particle run conserves energy and constraints") {
  const auto particle = particle_system();
  const auto traj = integrate(particle, {vec({0, 0, 0}), vec({1, 0.5})}, 10.0, 1e-3);
  REQUIRE_FALSE(traj.failure);
  const auto d = diagnostics(traj);
  CHECK(d.energy_drift <= 1e-8);
  CHECK(d.constraint_max <= 1e-12);
}

TEST_CASE("disk rolls in a straight line with fixed heading") {
  const DiskParameters dp{1, 2, 1, 1};
  const auto disk = disk_system(dp);
  const auto traj = integrate(disk, {vec({0, 0, 0, 0}), vec({3, 0})}, 2.0, 0.01);
  REQUIRE_FALSE(traj.failure);
  const double thetadot = 3.0;
  const Vector q = traj.phase.back().q;
  CHECK((q - vec({dp.R * thetadot * 2, 0, thetadot * 2, 0})).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("integration edge cases") {
  const auto particle = particle_system();
  const ConstrainedChartPoint x0{vec({0, 0, 0}), vec({1, 1})};
  const auto zero = integrate(particle, x0, 0.0, 0.1);
  CHECK(zero.times.size() == 1);
  CHECK(zero.states.size() == 1);

  const auto uneven = integrate(particle, x0, 1.0, 0.3);
  CHECK(uneven.times.size() == 5);
  CHECK(uneven.times.back() == 1.0);

  CHECK_THROWS_AS(integrate(particle, x0, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(integrate(particle, x0, 1.0, -1.0), ArgumentError);
  CHECK_THROWS_AS(integrate(particle, x0, -1.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(integrate(particle, x0, 1e9, 1e-3), ArgumentError);
  CHECK_THROWS_AS(parse_method("euler"), ArgumentError);
  CHECK(parse_method("midpoint") == Method::midpoint);
  CHECK(method_name(Method::rk4) == "rk4");
}

TEST_CASE("a run that leaves the regular region stops with a partial trajectory") {
  // Constraint (y − 1) ẋ = 0 loses rank on the plane y = 1.
  auto constraint = SmoothMap::from(3, 3, [](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> a(3);
    a << q[1] - T(1.0), T(0.0), T(0.0);
    return a;
  });
  const auto sys = make_system("wall", {"x", "y", "z"},
                               SmoothMap::constant(3, vec({1, 0, 0, 0, 1, 0, 0, 0, 1})),
                               SmoothMap::constant(3, Vector::Zero(1)), constraint,
                               Vector::Zero(3));
  const auto traj = integrate(sys, {vec({0, 0, 0}), vec({1, 0})}, 2.0, 0.5);
  REQUIRE(traj.failure);
  CHECK(traj.times.size() >= 1);
  CHECK(traj.times.back() < 1.0);
  CHECK(traj.failure->find("t = ") != std::string::npos);
}

TEST_CASE("momentum series of a symmetric run") {
  const auto disk = disk_system();
  const auto action = disk_translation_action();
  const auto traj = integrate(disk, {vec({0, 0, 0, 0.3}), vec({1, 0.5})}, 1.0, 0.01,
                              Method::rk4, &action);
  REQUIRE(traj.momentum_series);
  CHECK(traj.momentum_series->rows() == 2);
  CHECK(traj.momentum_series->cols() == static_cast<Eigen::Index>(traj.times.size()));
  const auto d = diagnostics(traj);
  REQUIRE(d.momentum_drift);
  // Translations are not conserved once the disk turns.
  CHECK(d.momentum_drift->maxCoeff() > 1e-3);
  CHECK(d.energy_drift <= 1e-10);
}
