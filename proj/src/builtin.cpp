#include "distham/builtin.hpp"

#include <cmath>

namespace distham {

namespace {

template <class T>
using S = typename std::decay_t<T>::Scalar;

SmoothMap identity_metric(int n) {
  Vector flat = Vector::Zero(n * n);
  for (int i = 0; i < n; ++i) flat[i * n + i] = 1.0;
  return SmoothMap::constant(n, flat, "G");
}

SmoothMap zero_potential(int n) { return SmoothMap::constant(n, Vector::Zero(1), "V"); }

SmoothMap coordinate_field(int n, int i, const std::string& name) {
  Vector v = Vector::Zero(n);
  v[i] = 1.0;
  return SmoothMap::constant(n, v, name);
}

}  // namespace

MechanicalSystem particle_system() {
  auto constraints = SmoothMap::from(
      3, 3,
      [](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> a(3);
        a << -q[1], T(0.0), T(1.0);
        return a;
      },
      "A");
  return make_system("particle", {"x", "y", "z"}, identity_metric(3), zero_potential(3),
                     constraints, Vector::Zero(3));
}

MechanicalSystem disk_system(const DiskParameters& p) {
  auto metric = SmoothMap::constant(
      4,
      [&] {
        Vector g = Vector::Zero(16);
        g[0] = p.m;
        g[5] = p.m;
        g[10] = p.I;
        g[15] = p.J;
        return g;
      }(),
      "G");
  const double r = p.R;
  auto constraints = SmoothMap::from(
      4, 8,
      [r](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> a(8);
        a << T(1.0), T(0.0), -r * cos(q[3]), T(0.0), T(0.0), T(1.0), -r * sin(q[3]), T(0.0);
        return a;
      },
      "A");
  return make_system("disk", {"x", "y", "theta", "phi"}, metric, zero_potential(4), constraints,
                     Vector::Zero(4), std::vector<int>{0, 1});
}

MechanicalSystem harmonic_system(int n) {
  auto potential = SmoothMap::from(
      n, 1,
      [](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> v(1);
        v[0] = T(0.5) * dot<T>(q, q);
        return v;
      },
      "V");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("q" + std::to_string(i + 1));
  return make_system("harmonic", names, identity_metric(n), potential, SmoothMap(),
                     Vector::Zero(n));
}

MechanicalSystem curved_free_system() {
  auto metric = SmoothMap::from(
      2, 4,
      [](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> g(4);
        g << T(1.0), T(0.0), T(0.0), T(1.0) + q[0] * q[0];
        return g;
      },
      "G");
  auto potential = SmoothMap::from(
      2, 1,
      [](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> v(1);
        v[0] = q[0] * q[0] + cos(q[1]);
        return v;
      },
      "V");
  return make_system("curved", {"q1", "q2"}, metric, potential, SmoothMap(), Vector::Zero(2));
}

CotangentLiftedAction particle_translation_action() {
  return {{"x", "z"}, {coordinate_field(3, 0, "dx"), coordinate_field(3, 2, "dz")}};
}

CotangentLiftedAction disk_translation_action() {
  return {{"x", "y"}, {coordinate_field(4, 0, "dx"), coordinate_field(4, 1, "dy")}};
}

CotangentLiftedAction disk_se2_action() {
  auto rotation = SmoothMap::from(
      4, 4,
      [](const auto& q) {
        using T = S<decltype(q)>;
        Vec<T> v(4);
        v << -q[1], q[0], T(0.0), T(1.0);
        return v;
      },
      "rot");
  return {{"x", "y", "rot"},
          {coordinate_field(4, 0, "dx"), coordinate_field(4, 1, "dy"), rotation}};
}

}  // namespace distham
