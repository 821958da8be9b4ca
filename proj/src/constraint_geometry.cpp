#include "distham/constraint_geometry.hpp"

#include <cmath>

#include <Eigen/LU>

#include "distham/calculus.hpp"

namespace distham {

PhasePoint embed(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  check_dims(sys, x.q, "embed q");
  if (x.u.size() != sys.m())
    throw DimensionError("embed: expected u of length " + std::to_string(sys.m()));
  return {x.q, embed_momentum_t<double>(sys, x.q, x.u)};
}

Vector m_residual(const MechanicalSystem& sys, const PhasePoint& z) {
  check_dims(sys, z.q, "m_residual q");
  check_dims(sys, z.p, "m_residual p");
  return m_residual_t<double>(sys, z.q, z.p);
}

ConstrainedChartPoint chart_of(const MechanicalSystem& sys, const PhasePoint& z) {
  check_dims(sys, z.q, "chart_of q");
  check_dims(sys, z.p, "chart_of p");
  const Vector v = inverse_legendre(sys, z.q, z.p);
  Vector u(sys.m());
  for (int j = 0; j < sys.m(); ++j) u[j] = v[sys.free_columns[j]];
  return {z.q, u};
}

Vector chart_vector(const ConstrainedChartPoint& x) {
  Vector v(x.q.size() + x.u.size());
  v << x.q, x.u;
  return v;
}

ConstrainedChartPoint chart_point(const MechanicalSystem& sys, const Vector& x) {
  if (x.size() != sys.n + sys.m()) throw DimensionError("chart vector has the wrong length");
  return {x.head(sys.n), x.tail(sys.m())};
}

namespace {

// (q, u) ↦ (q, p, H(q, p)).
template <class T>
Vec<T> embed_with_energy(const MechanicalSystem& sys, const Vec<T>& x) {
  const int n = sys.n;
  const Vec<T> q = x.head(n);
  const Vec<T> u = x.tail(sys.m());
  const Vec<T> p = embed_momentum_t<T>(sys, q, u);
  Vec<T> out(2 * n + 1);
  out.head(n) = q;
  out.segment(n, n) = p;
  out[2 * n] = hamiltonian_t<T>(sys, q, p);
  return out;
}

Matrix k_basis_of(const Matrix& b, int n, int m) {
  Matrix kb = Matrix::Zero(n + m, 2 * m);
  kb.topLeftCorner(n, m) = b;
  kb.bottomRightCorner(m, m) = Matrix::Identity(m, m);
  return kb;
}

double nondegeneracy_of(const Matrix& w) {
  const double dim = static_cast<double>(w.rows());
  const double scale = w.norm() / std::sqrt(dim);
  if (!(scale > 0.0)) return 0.0;
  return std::pow(std::abs(w.determinant()), 1.0 / dim) / scale;
}

}  // namespace

SmoothMap embed_map(const MechanicalSystem& sys) {
  const int n = sys.n;
  return SmoothMap::from(
      n + sys.m(), 2 * n,
      [sys](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::Scalar;
        const Vec<T> full = embed_with_energy<T>(sys, x);
        return Vec<T>(full.head(2 * sys.n));
      },
      "embed");
}

KFrame build_k_frame(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  check_dims(sys, x.q, "k_frame q");
  if (x.u.size() != sys.m())
    throw DimensionError("k_frame: expected u of length " + std::to_string(sys.m()));
  const int n = sys.n;
  const int m = sys.m();
  KFrame f;
  f.base = x;
  const Matrix jac = jacobian_of(
      [&](const Vec<Dual>& xd) { return embed_with_energy<Dual>(sys, xd); }, chart_vector(x));
  f.ambient_push = jac.topRows(2 * n);
  const Vector grad = jac.row(2 * n).transpose();
  f.d_basis = d_basis(sys, x.q);
  f.k_basis = k_basis_of(f.d_basis, n, m);
  const Matrix pc = f.pushed_basis();
  f.omega_K = pc.transpose() * canonical_j(n) * pc;
  f.dH_K = f.k_basis.transpose() * grad;
  f.nondegeneracy = nondegeneracy_of(f.omega_K);
  f.condition = condition_number(f.omega_K);
  return f;
}

KFrame k_frame(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  KFrame f = build_k_frame(sys, x);
  if (!f.nondegenerate())
    throw NumericalError("distributional two-form is singular (condition " +
                             std::to_string(f.condition) + ")",
                         f.condition);
  return f;
}

Matrix omega_M(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  const Matrix push = jacobian(embed_map(sys), chart_vector(x));
  const int n = sys.n;
  // ω(Pa, Pb) = (Pa)_q·(Pb)_p − (Pb)_q·(Pa)_p, summed entrywise.
  const Matrix pq = push.topRows(n);
  const Matrix pp = push.bottomRows(n);
  return pq.transpose() * pp - pp.transpose() * pq;
}

Matrix omega_K_via_pullback(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  const Matrix wm = omega_M(sys, x);
  const Matrix kb = k_basis_of(d_basis(sys, x.q), sys.n, sys.m());
  return kb.transpose() * wm * kb;
}

Matrix f_basis(const MechanicalSystem& sys, const Vector& q) {
  const int n = sys.n;
  const int m = sys.m();
  Matrix f = Matrix::Zero(2 * n, m + n);
  f.topLeftCorner(n, m) = d_basis(sys, q);
  f.bottomRightCorner(n, n) = Matrix::Identity(n, n);
  return f;
}

Matrix symplectic_orthogonal(const Matrix& basis) {
  if (basis.rows() % 2 != 0) throw DimensionError("symplectic_orthogonal: odd ambient dimension");
  const int n = static_cast<int>(basis.rows() / 2);
  if (basis.cols() == 0) return Matrix::Identity(2 * n, 2 * n);
  if (numerical_rank(basis, kRankTol) < basis.cols())
    throw NumericalError("symplectic_orthogonal: basis is rank deficient");
  const Matrix jb = canonical_j(n) * basis;
  return null_space(jb.transpose(), kRankTol);
}

ConditionsReport conditions_check(const MechanicalSystem& sys, const ConstrainedChartPoint& x) {
  ConditionsReport r;
  const int n = sys.n;
  const int m = sys.m();
  r.dim_M = n + m;
  try {
    const Matrix fb = f_basis(sys, x.q);
    r.rank_F = numerical_rank(fb, kRankTol);
    r.admissible = r.rank_F == r.dim_M;
    const KFrame f = build_k_frame(sys, x);
    r.omega_K_condition = f.condition;
    r.nondegeneracy = f.nondegeneracy;
    r.compatible = f.nondegenerate();
    // TM ∩ F⊥ = {0} directly: TM and F⊥ together span T(T*Q).
    const Matrix fperp = symplectic_orthogonal(fb);
    Matrix both(2 * n, f.ambient_push.cols() + fperp.cols());
    both << f.ambient_push, fperp;
    r.rank_TM_plus_Fperp = numerical_rank(both, kRankTol);
  } catch (const NumericalError&) {
    r.admissible = false;
    r.compatible = false;
  }
  return r;
}

Vector tau_K(const KFrame& frame, const Vector& v) {
  const Matrix pc = frame.pushed_basis();
  if (v.size() != pc.rows()) throw DimensionError("tau_K: tangent has the wrong length");
  Vector rhs(pc.cols());
  for (Eigen::Index j = 0; j < pc.cols(); ++j) rhs[j] = omega(v, pc.col(j));
  const Vector c =
      solve_checked(frame.omega_K.transpose(), rhs, kMaxCondition, "tau_K projection");
  return pc * c;
}

}  // namespace distham
