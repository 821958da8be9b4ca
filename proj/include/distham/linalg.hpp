#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "distham/dual.hpp"
#include "distham/errors.hpp"

namespace distham {

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;

/// Canonical symplectic matrix [[0, I], [-I, 0]] on R^{2n}.
Matrix canonical_j(int n);

/// Canonical pairing ω((a,b),(a',b')) = a·b' − a'·b on R^{2n}.
double omega(const Vector& v, const Vector& w);

/// Ratio of extreme singular values; infinity for a singular matrix.
double condition_number(const Matrix& a);

/// Number of singular values above tol relative to the largest one.
int numerical_rank(const Matrix& a, double rel_tol);

/// Orthonormal basis of the null space of a (columns), via full SVD.
Matrix null_space(const Matrix& a, double rel_tol);

/// Solve a·x = b by partial-pivot LU. Throws NumericalError when the
/// condition number exceeds max_condition.
Matrix solve_checked(const Matrix& a, const Matrix& b, double max_condition = 1e12,
                     const std::string& what = "linear system");
Vector solve_checked(const Matrix& a, const Vector& b, double max_condition = 1e12,
                     const std::string& what = "linear system");

template <class T>
Matrix values(const Mat<T>& a) {
  Matrix r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = value_of(a(i, j));
  return r;
}

template <class T>
Vector values(const Vec<T>& a) {
  Vector r(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r[i] = value_of(a[i]);
  return r;
}

template <class T>
Vec<T> lift(const Vector& a) {
  Vec<T> r(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r[i] = T(a[i]);
  return r;
}

template <class T>
Mat<T> lift(const Matrix& a) {
  Mat<T> r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = T(a(i, j));
  return r;
}

/// Gaussian elimination with partial pivoting, generic over the scalar so
/// derivatives propagate through the solve. Pivots are chosen on the double
/// value. Returns a^{-1} b.
template <class T>
Mat<T> solve_generic(Mat<T> a, Mat<T> b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DimensionError("solve: shape mismatch");
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    double best = std::abs(value_of(a(c, c)));
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, c)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw NumericalError("solve: singular matrix");
    if (piv != c) {
      a.row(c).swap(a.row(piv));
      b.row(c).swap(b.row(piv));
    }
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const T f = a(r, c) / a(c, c);
      for (Eigen::Index j = c; j < n; ++j) a(r, j) = a(r, j) - f * a(c, j);
      for (Eigen::Index j = 0; j < b.cols(); ++j) b(r, j) = b(r, j) - f * b(c, j);
    }
  }
  for (Eigen::Index c = n - 1; c >= 0; --c) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      T s = b(c, j);
      for (Eigen::Index k = c + 1; k < n; ++k) s = s - a(c, k) * b(k, j);
      b(c, j) = s / a(c, c);
    }
  }
  return b;
}

template <class T>
Vec<T> solve_generic(const Mat<T>& a, const Vec<T>& b) {
  Mat<T> bm(b.size(), 1);
  bm.col(0) = b;
  return solve_generic<T>(a, bm).col(0);
}

/// Plain matrix product written out, so custom scalars do not pull in the
/// blocked product kernels.
template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: shape mismatch");
  Mat<T> r(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      T s(0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) s = s + a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
Vec<T> matvec(const Mat<T>& a, const Vec<T>& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: shape mismatch");
  Vec<T> r(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    T s(0.0);
    for (Eigen::Index k = 0; k < a.cols(); ++k) s = s + a(i, k) * x[k];
    r[i] = s;
  }
  return r;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s(0.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace distham
