#include "distham/linalg.hpp"

#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace distham {

Matrix canonical_j(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

double omega(const Vector& v, const Vector& w) {
  if (v.size() != w.size() || v.size() % 2 != 0) throw DimensionError("omega: bad tangent sizes");
  const Eigen::Index n = v.size() / 2;
  return v.head(n).dot(w.tail(n)) - w.head(n).dot(v.tail(n));
}

double condition_number(const Matrix& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[0] > 0.0 && s[i] > rel_tol * s[0]) ++r;
  return svd.matrixV().rightCols(n - r);
}

Matrix solve_checked(const Matrix& a, const Matrix& b, double max_condition,
                     const std::string& what) {
  if (a.rows() != a.cols() || a.rows() != b.rows())
    throw DimensionError(what + ": shape mismatch");
  const double cond = condition_number(a);
  if (!(cond <= max_condition))
    throw NumericalError(what + ": singular (condition " + std::to_string(cond) + ")", cond);
  return Eigen::PartialPivLU<Matrix>(a).solve(b);
}

Vector solve_checked(const Matrix& a, const Vector& b, double max_condition,
                     const std::string& what) {
  Matrix bm = b;
  return solve_checked(a, bm, max_condition, what).col(0);
}

}  // namespace distham
