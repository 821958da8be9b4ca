#include "distham/hamilton_jacobi.hpp"

#include <cmath>
#include <random>

#include "distham/calculus.hpp"
#include "distham/dynamics.hpp"

namespace distham {

namespace {

void check_section(const MechanicalSystem& sys, const OneFormSection& g) {
  if (g.gamma.input_dim() != sys.n || g.gamma.output_dim() != sys.n)
    throw DimensionError("gamma must map R^" + std::to_string(sys.n) + " to R^" +
                         std::to_string(sys.n));
}

// Jacobian of z ↦ A(q)G(q)⁻¹p, k × 2n.
Matrix m_residual_jacobian(const MechanicalSystem& sys, const Vector& z) {
  const int n = sys.n;
  return jacobian_of(
      [&sys, n](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::Scalar;
        return m_residual_t<T>(sys, Vec<T>(x.head(n)), Vec<T>(x.tail(n)));
      },
      z);
}

void require_on_M(const MechanicalSystem& sys, const PhasePoint& z, const char* what) {
  if (sys.k == 0) return;
  const double r = m_residual(sys, z).cwiseAbs().maxCoeff();
  if (!(r <= kMembershipTol))
    throw HypothesisError(std::string(what) + " is off M (residual " + std::to_string(r) + ")");
}

Vector tangent_of_section(const OneFormSection& g, const Vector& q, const Vector& base) {
  Vector t(2 * q.size());
  t << base, jacobian(g.gamma, q) * base;
  return t;
}

Vector base_hamiltonian_velocity(const MechanicalSystem& sys, const PhasePoint& z) {
  return inverse_legendre(sys, z.q, z.p);
}

Vector x_k_ambient(const MechanicalSystem& sys, const PhasePoint& z) {
  return nonholonomic_field(sys, chart_of(sys, z)).ambient;
}

}  // namespace

double d_gamma(const OneFormSection& g, const Vector& q, const Vector& x, const Vector& y) {
  const Matrix dg = jacobian(g.gamma, q);
  return y.dot(dg * x) - x.dot(dg * y);
}

double closedness_on_D(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q) {
  check_section(sys, g);
  const auto fields = d_frame_fields(sys);
  double worst = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j)
      worst = std::max(worst, std::abs(d_oneform(g.gamma, q, fields[i], fields[j])));
  return worst;
}

Vector gamma_into_M(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q) {
  check_section(sys, g);
  return m_residual(sys, {q, g(q)});
}

double tgamma_in_K(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q) {
  check_section(sys, g);
  if (sys.k == 0) return 0.0;
  const PhasePoint z{q, g(q)};
  const Matrix dm = m_residual_jacobian(sys, to_phase_vector(z));
  const Matrix b = d_basis(sys, q);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.cols(); ++i)
    worst = std::max(worst, (dm * tangent_of_section(g, q, b.col(i))).cwiseAbs().maxCoeff());
  return worst;
}

double type1_residual(const MechanicalSystem& sys, const OneFormSection& g, const Vector& q) {
  check_section(sys, g);
  const PhasePoint z{q, g(q)};
  require_on_M(sys, z, "gamma(q)");
  const Vector lhs = tangent_of_section(g, q, base_hamiltonian_velocity(sys, z));
  return (lhs - x_k_ambient(sys, z)).norm();
}

double classical_hj_residual(const MechanicalSystem& sys, const OneFormSection& g,
                             const Vector& q) {
  check_section(sys, g);
  const PhasePoint z{q, g(q)};
  require_on_M(sys, z, "gamma(q)");
  return x_k_ambient(sys, z).norm();
}

double symplecticity_residual(const PhaseMap& e, const PhasePoint& z, int trials,
                              std::uint64_t seed) {
  const Vector x = to_phase_vector(z);
  const int dim = static_cast<int>(x.size());
  if (e.eps.input_dim() != dim || e.eps.output_dim() != dim)
    throw DimensionError("phase map must be R^" + std::to_string(dim) + " -> R^" +
                         std::to_string(dim));
  const Matrix de = jacobian(e.eps, x);
  const Matrix j = canonical_j(dim / 2);
  double worst = (de.transpose() * j * de - j).cwiseAbs().maxCoeff();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    Vector v(dim), w(dim);
    for (int i = 0; i < dim; ++i) {
      v[i] = normal(rng);
      w[i] = normal(rng);
    }
    v.normalize();
    w.normalize();
    worst = std::max(worst, std::abs(omega(de * v, de * w) - omega(v, w)));
  }
  return worst;
}

double type2_residual(const MechanicalSystem& sys, const OneFormSection& g, const PhaseMap& e,
                      const PhasePoint& z) {
  check_section(sys, g);
  const double s = symplecticity_residual(e, z);
  if (!(s <= kSymplecticTol))
    throw HypothesisError("phase map is not symplectic (residual " + std::to_string(s) + ")");
  const PhasePoint ez = e(z);
  require_on_M(sys, ez, "eps(point)");
  require_on_M(sys, {ez.q, g(ez.q)}, "gamma over eps(point)");
  const Vector lhs = tangent_of_section(g, ez.q, base_hamiltonian_velocity(sys, ez));
  return (lhs - x_k_ambient(sys, ez)).norm();
}

Type2Equivalence type2_equivalence_residual(const MechanicalSystem& sys,
                                            const OneFormSection& g, const PhaseMap& e,
                                            const PhasePoint& z) {
  check_section(sys, g);
  Type2Equivalence r;
  r.symplecticity = symplecticity_residual(e, z);
  r.symplectic = r.symplecticity <= kSymplecticTol;
  const PhasePoint ez = e(z);
  require_on_M(sys, ez, "eps(point)");

  const int n = sys.n;
  const Vector x = to_phase_vector(z);
  // X_{H∘ε} = J∇(H∘ε) in the (∂H/∂p, −∂H/∂q) convention.
  const Vector grad = jacobian_of(
                          [&sys, &e, n](const auto& w) {
                            using T = typename std::decay_t<decltype(w)>::Scalar;
                            const Vec<T> y = e.eps(w);
                            Vec<T> h(1);
                            h[0] = hamiltonian_t<T>(sys, Vec<T>(y.head(n)), Vec<T>(y.tail(n)));
                            return h;
                          },
                          x)
                          .row(0)
                          .transpose();
  Vector xhe(2 * n);
  xhe << grad.tail(n), -grad.head(n);
  const Vector pushed = jacobian(e.eps, x) * xhe;
  const KFrame frame = k_frame(sys, chart_of(sys, ez));
  const Vector projected = tau_K(frame, pushed);

  const Vector t_lambda = tangent_of_section(g, ez.q, base_hamiltonian_velocity(sys, ez));
  r.lhs_rhs_gap = (projected - t_lambda).norm();
  r.hj_gap = (t_lambda - nonholonomic_field(frame).ambient).norm();
  return r;
}

Lemma33 lemma33_residuals(const MechanicalSystem& sys, const OneFormSection& g,
                          const PhasePoint& z, const Vector& v, const Vector& w) {
  check_section(sys, g);
  const int n = sys.n;
  if (v.size() != 2 * n || w.size() != 2 * n)
    throw DimensionError("lemma33: tangents must have length " + std::to_string(2 * n));
  // Tλ = [[I, 0], [Dγ, 0]].
  const Matrix dg = jacobian(g.gamma, z.q);
  Matrix dl = Matrix::Zero(2 * n, 2 * n);
  dl.topLeftCorner(n, n).setIdentity();
  dl.bottomLeftCorner(n, n) = dg;
  const Vector lv = dl * v;
  const Vector lw = dl * w;
  const Vector vq = v.head(n);
  const Vector wq = w.head(n);
  const double dgamma = wq.dot(dg * vq) - vq.dot(dg * wq);

  Lemma33 r;
  r.r_i = std::abs(omega(lv, lw) + dgamma);
  r.r_ii = std::abs(omega(lv, w) - omega(v, w - lw) + dgamma);
  if (sys.k > 0) {
    const PhasePoint lz = g.lambda(z);
    r.r_iii = (sys.A<double>(lz.q) * base_hamiltonian_velocity(sys, lz)).cwiseAbs().maxCoeff();
  }
  return r;
}

double tautological_residual(const OneFormSection& g, const Vector& q, const Vector& x) {
  const Vector gq = g(q);
  const Vector t = tangent_of_section(g, q, x);
  // θ_(q,p)(δq, δp) = p·δq.
  return std::abs(gq.dot(t.head(q.size())) - gq.dot(x));
}

}  // namespace distham
