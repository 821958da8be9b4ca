#include "distham/mechanics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "distham/calculus.hpp"

namespace distham {

Vector to_phase_vector(const PhasePoint& z) {
  if (z.q.size() != z.p.size()) throw DimensionError("phase point: q and p lengths differ");
  Vector v(z.q.size() * 2);
  v << z.q, z.p;
  return v;
}

PhasePoint from_phase_vector(const Vector& z) {
  if (z.size() % 2 != 0) throw DimensionError("phase vector has odd length");
  const Eigen::Index n = z.size() / 2;
  return {z.head(n), z.tail(n)};
}

void check_dims(const MechanicalSystem& sys, const Vector& q, const char* what) {
  if (q.size() != sys.n)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(sys.n) +
                         ", got " + std::to_string(q.size()));
}

std::vector<int> choose_pivots(const Matrix& a0) {
  Matrix a = a0;
  const Eigen::Index k = a.rows();
  const Eigen::Index n = a.cols();
  std::vector<bool> row_used(k, false), col_used(n, false);
  std::vector<int> pivots;
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    Eigen::Index br = -1, bc = -1;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (col_used[c]) continue;
      for (Eigen::Index r = 0; r < k; ++r) {
        if (row_used[r]) continue;
        if (std::abs(a(r, c)) > best) {
          best = std::abs(a(r, c));
          br = r;
          bc = c;
        }
      }
    }
    if (best <= 0.0) break;
    row_used[br] = true;
    col_used[bc] = true;
    pivots.push_back(static_cast<int>(bc));
    for (Eigen::Index r = 0; r < k; ++r) {
      if (r == br) continue;
      const double f = a(r, bc) / a(br, bc);
      a.row(r) -= f * a.row(br);
    }
  }
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

void check_constraint_rank(const MechanicalSystem& sys, const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  if (!(smax > 0.0) || !(smin > kRankTol * smax))
    throw NumericalError("constraint matrix A(q) is rank deficient",
                         smin > 0.0 ? smax / smin : INFINITY);
  Matrix ap(sys.k, sys.k);
  for (int j = 0; j < sys.k; ++j) ap.col(j) = a.col(sys.pivots[j]);
  Eigen::JacobiSVD<Matrix> psvd(ap);
  const auto& ps = psvd.singularValues();
  if (!(ps[ps.size() - 1] > kRankTol * smax))
    throw NumericalError("frozen pivot pattern of the D-frame is invalid here; use another chart",
                         smax / std::max(ps[ps.size() - 1], 1e-300));
}

MechanicalSystem make_system(std::string name, std::vector<std::string> coordinates,
                             SmoothMap metric, SmoothMap potential, SmoothMap constraints,
                             Vector q_ref, std::optional<std::vector<int>> pivots) {
  MechanicalSystem s;
  s.name = std::move(name);
  s.n = static_cast<int>(coordinates.size());
  s.coordinates = std::move(coordinates);
  const int n = s.n;
  if (n == 0) throw ConfigError("system has no coordinates");
  if (q_ref.size() == 0) q_ref = Vector::Zero(n);
  if (q_ref.size() != n) throw ConfigError("reference point has the wrong length");
  if (metric.input_dim() != n || metric.output_dim() != n * n)
    throw ConfigError("metric must map R^n to n x n matrices");
  if (potential.input_dim() != n || potential.output_dim() != 1)
    throw ConfigError("potential must map R^n to a scalar");
  if (constraints.empty()) {
    s.k = 0;
    constraints = SmoothMap::constant(n, Vector(0), "constraints");
  } else {
    if (constraints.input_dim() != n || constraints.output_dim() % n != 0)
      throw ConfigError("constraints must map R^n to k x n matrices");
    s.k = constraints.output_dim() / n;
  }
  if (s.k >= n)
    throw ConfigError("number of constraint rows (" + std::to_string(s.k) +
                      ") must be less than the chart dimension (" + std::to_string(n) + ")");
  s.metric = std::move(metric);
  s.potential = std::move(potential);
  s.constraints = std::move(constraints);
  s.q_ref = q_ref;
  s.periodic.assign(n, false);

  const Matrix g = s.G<double>(q_ref);
  if (!g.allFinite() || (g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.norm()))
    throw ConfigError("metric is not symmetric at the reference point");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw ConfigError("metric is not positive definite at the reference point");

  if (s.k > 0) {
    const Matrix a = s.A<double>(q_ref);
    if (!a.allFinite()) throw ConfigError("constraint matrix is not finite at the reference point");
    if (numerical_rank(a, kRankTol) < s.k)
      throw ConfigError("constraint matrix is rank deficient at the reference point");
    if (pivots) {
      std::vector<int> pv = *pivots;
      std::sort(pv.begin(), pv.end());
      if (static_cast<int>(pv.size()) != s.k || std::adjacent_find(pv.begin(), pv.end()) != pv.end() ||
          pv.front() < 0 || pv.back() >= n)
        throw ConfigError("pivots must name " + std::to_string(s.k) + " distinct coordinates");
      s.pivots = pv;
    } else {
      s.pivots = choose_pivots(a);
    }
  }
  for (int j = 0; j < n; ++j)
    if (std::find(s.pivots.begin(), s.pivots.end(), j) == s.pivots.end())
      s.free_columns.push_back(j);
  if (s.k > 0) {
    try {
      check_constraint_rank(s, s.A<double>(q_ref));
    } catch (const NumericalError& e) {
      throw ConfigError(std::string("at the reference point: ") + e.what());
    }
  }
  return s;
}

Vector legendre(const MechanicalSystem& sys, const Vector& q, const Vector& v) {
  check_dims(sys, q, "legendre q");
  check_dims(sys, v, "legendre v");
  return sys.G<double>(q) * v;
}

Vector inverse_legendre(const MechanicalSystem& sys, const Vector& q, const Vector& p) {
  check_dims(sys, q, "inverse_legendre q");
  check_dims(sys, p, "inverse_legendre p");
  const Matrix g = sys.G<double>(q);
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite");
  return llt.solve(p);
}

double hamiltonian(const MechanicalSystem& sys, const PhasePoint& z) {
  check_dims(sys, z.q, "hamiltonian q");
  check_dims(sys, z.p, "hamiltonian p");
  return hamiltonian_t<double>(sys, z.q, z.p);
}

double lagrangian_energy(const MechanicalSystem& sys, const Vector& q, const Vector& v) {
  return 0.5 * v.dot(sys.G<double>(q) * v) + sys.V<double>(q);
}

SmoothMap hamiltonian_map(const MechanicalSystem& sys) {
  const int n = sys.n;
  return SmoothMap::from(
      2 * n, 1,
      [sys, n](const auto& z) {
        using T = typename std::decay_t<decltype(z)>::Scalar;
        Vec<T> out(1);
        out[0] = hamiltonian_t<T>(sys, Vec<T>(z.head(n)), Vec<T>(z.tail(n)));
        return out;
      },
      "H");
}

Vector hamiltonian_field_vector(const MechanicalSystem& sys, const Vector& z) {
  const int n = sys.n;
  if (z.size() != 2 * n) throw DimensionError("hamiltonian field: expected a 2n phase vector");
  const Vector grad = gradient(hamiltonian_map(sys), z);
  Vector x(2 * n);
  x << grad.tail(n), -grad.head(n);
  return x;
}

PhaseTangent hamiltonian_vector_field(const MechanicalSystem& sys, const PhasePoint& z) {
  const Vector x = hamiltonian_field_vector(sys, to_phase_vector(z));
  return {x.head(sys.n), x.tail(sys.n)};
}

Matrix d_basis(const MechanicalSystem& sys, const Vector& q) { return d_basis_t<double>(sys, q); }

std::vector<SmoothMap> d_frame_fields(const MechanicalSystem& sys) {
  std::vector<SmoothMap> fields;
  for (int i = 0; i < sys.m(); ++i) {
    fields.push_back(SmoothMap::from(
        sys.n, sys.n,
        [sys, i](const auto& q) {
          using T = typename std::decay_t<decltype(q)>::Scalar;
          return Vec<T>(d_basis_t<T>(sys, q).col(i));
        },
        "D" + std::to_string(i + 1)));
  }
  return fields;
}

double d_regularity_ratio(const MechanicalSystem& sys, const Vector& q) {
  const Matrix b = d_basis(sys, q);
  const Matrix h = b.transpose() * sys.G<double>(q) * b;
  const double m = static_cast<double>(h.rows());
  const double scale = h.norm() / std::sqrt(m);
  if (!(scale > 0.0)) return 0.0;
  const double det = std::abs(h.determinant());
  return std::pow(det, 1.0 / m) / scale;
}

bool d_regularity(const MechanicalSystem& sys, const Vector& q) {
  return d_regularity_ratio(sys, q) > 1e-8;
}

}  // namespace distham
