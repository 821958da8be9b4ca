#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "distham/linalg.hpp"
#include "distham/smooth_map.hpp"

namespace distham {

/// Jacobian of a generic callable `f(const Vec<Dual>&) -> Vec<Dual>` at x.
/// Inputs wider than one Dual are seeded in chunks.
template <class F>
Matrix jacobian_of(F&& f, const Vector& x) {
  const auto n = x.size();
  constexpr int chunk = Dual::kMaxSeeds;
  Matrix jac;
  for (Eigen::Index start = 0; start == 0 || start < n; start += chunk) {
    const int seeds = static_cast<int>(std::min<Eigen::Index>(chunk, n - start));
    Vec<Dual> xd(n);
    for (Eigen::Index i = 0; i < n; ++i)
      xd[i] = (i >= start && i < start + seeds)
                  ? Dual::variable(x[i], static_cast<int>(i - start), seeds)
                  : Dual(x[i]);
    const Vec<Dual> y = f(xd);
    if (start == 0) jac.resize(y.size(), n);
    for (Eigen::Index r = 0; r < y.size(); ++r)
      for (int j = 0; j < seeds; ++j) jac(r, start + j) = y[r].d(j);
  }
  if (!jac.allFinite()) throw NumericalError("non-finite derivative");
  return jac;
}

/// Jacobian (output_dim x input_dim) by forward-mode AD.
Matrix jacobian(const SmoothMap& f, const Vector& x);

/// Gradient of a scalar map (output_dim == 1).
Vector gradient(const SmoothMap& f, const Vector& x);

/// f(x) and the directional derivative Df(x)·v, evaluated one tangent level
/// above T.
template <class T>
std::pair<Vec<T>, Vec<T>> directional(const SmoothMap& f, const Vec<T>& x, const Vec<T>& v) {
  static_assert(has_next_tan<T>, "no tangent level above this scalar");
  using N = next_tan_t<T>;
  Vec<N> xs(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) xs[i] = N::with_tangent(x[i], v[i]);
  const Vec<N> y = f(xs);
  Vec<T> val(y.size());
  Vec<T> der(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    val[i] = y[i].value();
    der[i] = y[i].d(0);
  }
  return {val, der};
}

/// [X,Y](q) = DY·X − DX·Y, generic in the scalar so brackets nest.
template <class T>
Vec<T> lie_bracket_at(const SmoothMap& x, const SmoothMap& y, const Vec<T>& q) {
  const Vec<T> xv = x(q);
  const Vec<T> yv = y(q);
  const Vec<T> dy_x = directional<T>(y, q, xv).second;
  const Vec<T> dx_y = directional<T>(x, q, yv).second;
  return dy_x - dx_y;
}

Vector lie_bracket(const SmoothMap& x, const SmoothMap& y, const Vector& q);

/// The bracket [X,Y] as a vector field. Each nesting level consumes one
/// tangent level, so at most four brackets can be nested.
SmoothMap lie_bracket_field(const SmoothMap& x, const SmoothMap& y);

/// Constant vector field q ↦ v on an n-chart.
SmoothMap constant_field(const Vector& v);

/// dγ_q(X(q), Y(q)) by the intrinsic formula X(γ(Y)) − Y(γ(X)) − γ([X,Y]).
double d_oneform(const SmoothMap& gamma, const Vector& q, const SmoothMap& x, const SmoothMap& y);

struct BracketReport {
  bool generating = false;
  int rank = 0;
  int depth = 0;         // nesting depth of the last bracket that raised the rank
  bool clamped = false;  // max_depth exceeded kMaxBracketDepth
};

/// Rank of the span of `fields` and their iterated brackets. Depth counts
/// bracket operations: depth 1 is [X_i, X_j], depth 2 is [X_i, [X_j, X_k]].
/// Singular values above tol count toward the rank.
BracketReport bracket_generating(const std::vector<SmoothMap>& fields, const Vector& q,
                                 int max_depth, double tol = 1e-10);

/// Deepest nesting the tangent chain supports when evaluating at doubles.
inline constexpr int kMaxBracketDepth = 4;

}  // namespace distham
