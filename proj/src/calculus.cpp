#include "distham/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace distham {

Matrix jacobian(const SmoothMap& f, const Vector& x) {
  if (x.size() != f.input_dim())
    throw DimensionError("jacobian: expected point of length " + std::to_string(f.input_dim()) +
                         ", got " + std::to_string(x.size()));
  try {
    return jacobian_of([&](const Vec<Dual>& xd) { return f(xd); }, x);
  } catch (const NumericalError&) {
    throw NumericalError((f.name().empty() ? std::string("map") : f.name()) +
                         ": non-finite output");
  }
}

Vector gradient(const SmoothMap& f, const Vector& x) {
  if (f.output_dim() != 1) throw DimensionError("gradient: map is not scalar");
  return jacobian(f, x).row(0).transpose();
}

Vector lie_bracket(const SmoothMap& x, const SmoothMap& y, const Vector& q) {
  if (x.input_dim() != x.output_dim() || y.input_dim() != y.output_dim() ||
      x.input_dim() != y.input_dim())
    throw DimensionError("lie_bracket: fields must be vector fields on the same chart");
  return lie_bracket_at<double>(x, y, q);
}

SmoothMap lie_bracket_field(const SmoothMap& x, const SmoothMap& y) {
  if (x.input_dim() != x.output_dim() || y.input_dim() != y.output_dim() ||
      x.input_dim() != y.input_dim())
    throw DimensionError("lie_bracket_field: fields must be vector fields on the same chart");
  const int n = x.input_dim();
  return SmoothMap::from(
      n, n,
      [x, y](const auto& q) {
        using T = typename std::decay_t<decltype(q)>::Scalar;
        if constexpr (has_next_tan<T>) {
          return lie_bracket_at<T>(x, y, q);
        } else {
          throw DimensionError("bracket nesting deeper than the supported tangent levels");
          return Vec<T>(q);
        }
      },
      "[" + x.name() + "," + y.name() + "]");
}

SmoothMap constant_field(const Vector& v) {
  return SmoothMap::constant(static_cast<int>(v.size()), v, "const");
}

double d_oneform(const SmoothMap& gamma, const Vector& q, const SmoothMap& x, const SmoothMap& y) {
  const int n = gamma.input_dim();
  if (gamma.output_dim() != n || x.input_dim() != n || x.output_dim() != n ||
      y.input_dim() != n || y.output_dim() != n || q.size() != n)
    throw DimensionError("d_oneform: dimension mismatch");
  // Derivative of q ↦ γ(q)·Z(q) along W(q).
  auto pair_along = [&](const SmoothMap& z, const Vector& w) {
    Vec<Tan1> qt(n);
    for (int i = 0; i < n; ++i) qt[i] = Tan1::with_tangent(q[i], w[i]);
    const Tan1 s = dot<Tan1>(gamma(qt), z(qt));
    return s.d(0);
  };
  const Vector xv = x(q);
  const Vector yv = y(q);
  const Vector br = lie_bracket(x, y, q);
  return pair_along(y, xv) - pair_along(x, yv) - gamma(q).dot(br);
}

BracketReport bracket_generating(const std::vector<SmoothMap>& fields, const Vector& q,
                                 int max_depth, double tol) {
  BracketReport rep;
  const int n = static_cast<int>(q.size());
  if (fields.empty() || max_depth < 1) return rep;
  if (max_depth > kMaxBracketDepth) {
    rep.clamped = true;
    max_depth = kMaxBracketDepth;
  }

  std::vector<Vector> columns;
  auto rank_of = [&]() {
    Matrix m(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = columns[j];
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tol) ++r;
    return r;
  };

  std::vector<SmoothMap> level = fields;
  for (const auto& f : fields) columns.push_back(f(q));
  rep.rank = rank_of();
  rep.depth = 0;
  for (int depth = 1; depth <= max_depth && rep.rank < n; ++depth) {
    std::vector<SmoothMap> next;
    for (std::size_t i = 0; i < fields.size(); ++i)
      for (std::size_t j = 0; j < level.size(); ++j) {
        // At depth 1, [X_j, X_i] repeats [X_i, X_j] up to sign.
        if (depth == 1 && j <= i) continue;
        SmoothMap b = lie_bracket_field(fields[i], level[j]);
        columns.push_back(b(q));
        next.push_back(std::move(b));
      }
    const int r = rank_of();
    if (r > rep.rank) rep.depth = depth;
    rep.rank = r;
    level = std::move(next);
    if (level.empty()) break;
  }
  rep.generating = rep.rank == n;
  return rep;
}

}  // namespace distham
