#pragma once

// Shared helpers for the unit tests: random polynomials and finite differences.

#include <random>
#include <vector>

#include <Eigen/LU>

#include "distham/builtin.hpp"
#include "distham/calculus.hpp"
#include "distham/constraint_geometry.hpp"
#include "distham/hamilton_jacobi.hpp"

namespace distham::testing {

struct Term {
  double coef;
  std::vector<int> powers;
};

struct Poly {
  int nvars = 0;
  std::vector<Term> terms;

  template <class T>
  T eval(const Vec<T>& x) const {
    T s(0.0);
    for (const auto& t : terms) {
      T m(t.coef);
      for (int i = 0; i < nvars; ++i)
        if (t.powers[i] > 0) m = m * ipow(x[i], t.powers[i]);
      s = s + m;
    }
    return s;
  }

  Poly derivative(int var) const {
    Poly d{nvars, {}};
    for (const auto& t : terms) {
      if (t.powers[var] == 0) continue;
      Term nt = t;
      nt.coef *= t.powers[var];
      nt.powers[var] -= 1;
      d.terms.push_back(nt);
    }
    return d;
  }

  static Poly random(int nvars, int max_degree, int nterms, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> var(0, nvars - 1);
    std::uniform_int_distribution<int> deg(0, max_degree);
    Poly p{nvars, {}};
    for (int t = 0; t < nterms; ++t) {
      Term term{coef(rng), std::vector<int>(nvars, 0)};
      const int d = deg(rng);
      for (int k = 0; k < d; ++k) term.powers[var(rng)] += 1;
      p.terms.push_back(term);
    }
    return p;
  }

  /// Map R^n -> R^{polys.size()} evaluating each polynomial.
  static SmoothMap map_of(std::vector<Poly> polys, int nvars) {
    const int out = static_cast<int>(polys.size());
    return SmoothMap::from(nvars, out, [polys](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      Vec<T> y(static_cast<Eigen::Index>(polys.size()));
      for (std::size_t i = 0; i < polys.size(); ++i) y[static_cast<Eigen::Index>(i)] = polys[i].eval<T>(x);
      return y;
    });
  }

  SmoothMap gradient_map() const {
    std::vector<Poly> parts;
    for (int i = 0; i < nvars; ++i) parts.push_back(derivative(i));
    return map_of(parts, nvars);
  }

  static SmoothMap random_field(int n, int max_degree, int nterms, std::mt19937_64& rng) {
    std::vector<Poly> parts;
    for (int i = 0; i < n; ++i) parts.push_back(random(n, max_degree, nterms, rng));
    return map_of(parts, n);
  }
};

inline Matrix central_difference(const SmoothMap& f, const Vector& x, double h) {
  Matrix jac(f.output_dim(), f.input_dim());
  for (int j = 0; j < f.input_dim(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return jac;
}

inline Vector random_vector(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Constrained system with a position-dependent metric and a potential:
/// G = diag(1, 1 + x², 2), V = cos y + z², A = [sin z, 1, x].
inline MechanicalSystem curved_constrained_system() {
  auto metric = SmoothMap::from(3, 9, [](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> g(9);
    g << T(1.0), T(0.0), T(0.0), T(0.0), T(1.0) + q[0] * q[0], T(0.0), T(0.0), T(0.0), T(2.0);
    return g;
  });
  auto potential = SmoothMap::from(3, 1, [](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> v(1);
    v[0] = cos(q[1]) + q[2] * q[2];
    return v;
  });
  auto constraints = SmoothMap::from(3, 3, [](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> a(3);
    a << sin(q[2]), T(1.0), q[0];
    return a;
  });
  return make_system("curved-constrained", {"x", "y", "z"}, metric, potential, constraints,
                     Vector::Zero(3));
}

/// Lagrange–d'Alembert equations solved for the multiplier, written
/// independently of the distributional machinery. Returns the ambient
/// (q̇, ṗ) at (q, v) with A(q)v = 0.
inline Vector lagrange_dalembert(const MechanicalSystem& sys, const Vector& q, const Vector& v) {
  const int n = sys.n;
  const Matrix g = sys.G<double>(q);
  const Matrix dg = jacobian(sys.metric, q);  // (n*n) × n
  const Vector grad_v = gradient(sys.potential, q);
  Vector dl(n);  // ∂L/∂q
  Matrix gdot = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Matrix di(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) di(r, c) = dg(r * n + c, i);
    dl[i] = 0.5 * v.dot(di * v) - grad_v[i];
    gdot += di * v[i];
  }
  const Vector f = dl - gdot * v;
  const Eigen::PartialPivLU<Matrix> glu(g);
  Vector pdot = dl;
  if (sys.k > 0) {
    const Matrix a = sys.A<double>(q);
    const Matrix da = jacobian(sys.constraints, q);  // (k*n) × n
    Matrix adot = Matrix::Zero(sys.k, n);
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < sys.k; ++r)
        for (int c = 0; c < n; ++c) adot(r, c) += da(r * n + c, i) * v[i];
    const Matrix ginv_at = glu.solve(Matrix(a.transpose()));
    const Vector rhs = -adot * v - a * glu.solve(f);
    const Vector lambda = (a * ginv_at).partialPivLu().solve(rhs);
    pdot += a.transpose() * lambda;
  }
  Vector out(2 * n);
  out << v, pdot;
  return out;
}

inline ConstrainedChartPoint random_chart_point(const MechanicalSystem& sys, double qr, double ur,
                                                std::mt19937_64& rng) {
  return {random_vector(sys.n, -qr, qr, rng), random_vector(sys.m(), -ur, ur, rng)};
}

/// Particle section γ = (c/√(1+y²), h, y·c/√(1+y²)). Lies in M and is closed
/// on D for any c, h; Type I holds when c and h are constants.
inline OneFormSection particle_section(double c, double h) {
  return {SmoothMap::from(3, 3, [c, h](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    const T s = sqrt(T(1.0) + q[1] * q[1]);
    Vec<T> g(3);
    g << T(c) / s, T(h), q[1] * T(c) / s;
    return g;
  })};
}

/// Same family with c = x: closed on D and in M, but d(H∘γ) ∉ D°.
inline OneFormSection particle_section_cx(double h) {
  return {SmoothMap::from(3, 3, [h](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    const T s = sqrt(T(1.0) + q[1] * q[1]);
    Vec<T> g(3);
    g << q[0] / s, T(h), q[1] * q[0] / s;
    return g;
  })};
}

/// γ = a dx + b dy + a·y dz with constant a, b.
inline OneFormSection particle_linear_section(double a, double b) {
  return {SmoothMap::from(3, 3, [a, b](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> g(3);
    g << T(a), T(b), T(a) * q[1];
    return g;
  })};
}

/// Disk section with constant (γ_θ, γ_φ) and p_x, p_y fixed by M.
inline OneFormSection disk_section(const DiskParameters& dp, double gt, double gp) {
  return {SmoothMap::from(4, 4, [dp, gt, gp](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    const double c = dp.m * dp.R / dp.I * gt;
    Vec<T> g(4);
    g << T(c) * cos(q[3]), T(c) * sin(q[3]), T(gt), T(gp);
    return g;
  })};
}

/// Phase map (q + shift, p).
inline PhaseMap base_translation(const Vector& shift) {
  return {SmoothMap::from(2 * static_cast<int>(shift.size()), 2 * static_cast<int>(shift.size()),
                          [shift](const auto& z) {
                            using T = typename std::decay_t<decltype(z)>::Scalar;
                            Vec<T> r = z;
                            for (Eigen::Index i = 0; i < shift.size(); ++i) r[i] = r[i] + T(shift[i]);
                            return r;
                          })};
}

inline PhaseMap identity_map(int n) { return base_translation(Vector::Zero(n)); }

/// (q, s·p).
inline PhaseMap momentum_scaling(int n, double s) {
  return {SmoothMap::from(2 * n, 2 * n, [n, s](const auto& z) {
    using T = typename std::decay_t<decltype(z)>::Scalar;
    Vec<T> r = z;
    for (int i = n; i < 2 * n; ++i) r[i] = r[i] * T(s);
    return r;
  })};
}

/// Cotangent lift of (x, y, z) ↦ (x, y, z + x²).
inline PhaseMap particle_shear_lift() {
  return {SmoothMap::from(6, 6, [](const auto& w) {
    using T = typename std::decay_t<decltype(w)>::Scalar;
    Vec<T> r = w;
    r[2] = w[2] + w[0] * w[0];
    r[3] = w[3] - T(2.0) * w[0] * w[5];
    return r;
  })};
}

/// Fiber translation p ↦ p + a·d(x + yz); preserves the particle's M.
inline PhaseMap particle_fiber_shift(double a) {
  return {SmoothMap::from(6, 6, [a](const auto& w) {
    using T = typename std::decay_t<decltype(w)>::Scalar;
    Vec<T> r = w;
    r[3] = w[3] + T(a);
    r[4] = w[4] + T(a) * w[2];
    r[5] = w[5] + T(a) * w[1];
    return r;
  })};
}

}  // namespace distham::testing
