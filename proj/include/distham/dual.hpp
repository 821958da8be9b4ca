#pragma once

// Forward-mode dual numbers.
//
// BasicDual<V, N> carries a value of type V and up to N partial derivatives,
// also of type V. Nesting (V itself a dual) gives higher derivatives; the
// library uses a 16-seed first-order Dual for Jacobians and a chain of
// single-seed tangents Tan1..Tan4 for iterated Lie brackets.
//
// The number of active seeds is stored per value. Constants have zero active
// seeds and behave as if all their partials were zero, so mixing constants
// and seeded variables needs no bookkeeping at the call site.

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace distham {

template <class V, int N>
class BasicDual {
 public:
  static constexpr int kMaxSeeds = N;
  using value_type = V;

  BasicDual() : val_(0.0) {}
  BasicDual(double v) : val_(v) {}  // NOLINT(google-explicit-constructor)
  template <class U>
    requires(std::is_same_v<U, V> && !std::is_same_v<V, double>)
  BasicDual(const U& v) : val_(v) {}  // NOLINT(google-explicit-constructor)

  /// Seeded variable: value v, partial derivative 1 along `index`, with
  /// `seeds` active slots.
  static BasicDual variable(const V& v, int index, int seeds) {
    BasicDual r(v);
    r.n_ = seeds;
    for (int i = 0; i < seeds; ++i) r.der_[i] = V(0.0);
    r.der_[index] = V(1.0);
    return r;
  }

  /// Value with an explicit tangent in the single slot 0 (N == 1 helper).
  static BasicDual with_tangent(const V& v, const V& t) {
    BasicDual r(v);
    r.n_ = 1;
    r.der_[0] = t;
    return r;
  }

  const V& value() const { return val_; }
  int seeds() const { return n_; }
  V d(int i) const { return i < n_ ? der_[i] : V(0.0); }

  BasicDual& operator+=(const BasicDual& b) { return *this = *this + b; }
  BasicDual& operator-=(const BasicDual& b) { return *this = *this - b; }
  BasicDual& operator*=(const BasicDual& b) { return *this = *this * b; }
  BasicDual& operator/=(const BasicDual& b) { return *this = *this / b; }

  friend BasicDual operator+(const BasicDual& a) { return a; }
  friend BasicDual operator-(const BasicDual& a) {
    BasicDual r(-a.val_);
    r.n_ = a.n_;
    for (int i = 0; i < r.n_; ++i) r.der_[i] = -a.der_[i];
    return r;
  }
  friend BasicDual operator+(const BasicDual& a, const BasicDual& b) {
    BasicDual r(a.val_ + b.val_);
    r.n_ = std::max(a.n_, b.n_);
    for (int i = 0; i < r.n_; ++i) r.der_[i] = a.d(i) + b.d(i);
    return r;
  }
  friend BasicDual operator-(const BasicDual& a, const BasicDual& b) {
    BasicDual r(a.val_ - b.val_);
    r.n_ = std::max(a.n_, b.n_);
    for (int i = 0; i < r.n_; ++i) r.der_[i] = a.d(i) - b.d(i);
    return r;
  }
  friend BasicDual operator*(const BasicDual& a, const BasicDual& b) {
    BasicDual r(a.val_ * b.val_);
    r.n_ = std::max(a.n_, b.n_);
    for (int i = 0; i < r.n_; ++i) r.der_[i] = a.val_ * b.d(i) + b.val_ * a.d(i);
    return r;
  }
  friend BasicDual operator/(const BasicDual& a, const BasicDual& b) {
    BasicDual r(a.val_ / b.val_);
    r.n_ = std::max(a.n_, b.n_);
    for (int i = 0; i < r.n_; ++i) r.der_[i] = (a.d(i) - r.val_ * b.d(i)) / b.val_;
    return r;
  }

  friend bool operator<(const BasicDual& a, const BasicDual& b) { return a.val_ < b.val_; }
  friend bool operator>(const BasicDual& a, const BasicDual& b) { return a.val_ > b.val_; }
  friend bool operator<=(const BasicDual& a, const BasicDual& b) { return a.val_ <= b.val_; }
  friend bool operator>=(const BasicDual& a, const BasicDual& b) { return a.val_ >= b.val_; }
  friend bool operator==(const BasicDual& a, const BasicDual& b) { return a.val_ == b.val_; }
  friend bool operator!=(const BasicDual& a, const BasicDual& b) { return a.val_ != b.val_; }

  // Chain rule for a unary function with value fv and derivative dfv at val_.
  BasicDual chain(const V& fv, const V& dfv) const {
    BasicDual r(fv);
    r.n_ = n_;
    for (int i = 0; i < n_; ++i) r.der_[i] = dfv * der_[i];
    return r;
  }

  friend BasicDual sin(const BasicDual& a) {
    using std::cos;
    using std::sin;
    return a.chain(sin(a.val_), cos(a.val_));
  }
  friend BasicDual cos(const BasicDual& a) {
    using std::cos;
    using std::sin;
    return a.chain(cos(a.val_), -sin(a.val_));
  }
  friend BasicDual exp(const BasicDual& a) {
    using std::exp;
    const V e = exp(a.val_);
    return a.chain(e, e);
  }
  friend BasicDual sqrt(const BasicDual& a) {
    using std::sqrt;
    const V s = sqrt(a.val_);
    return a.chain(s, V(0.5) / s);
  }
  // Needed by Eigen's norm/abs paths; sign of the value picks the branch.
  friend BasicDual abs(const BasicDual& a) { return a.val_ < V(0.0) ? -a : a; }
  friend bool isfinite(const BasicDual& a) {
    using std::isfinite;
    if (!isfinite(a.val_)) return false;
    for (int i = 0; i < a.n_; ++i)
      if (!isfinite(a.der_[i])) return false;
    return true;
  }

 private:
  V val_;
  int n_ = 0;
  std::array<V, N> der_;
};

/// First-order dual with enough seeds for a full phase-space Jacobian
/// (2n <= 16).
using Dual = BasicDual<double, 16>;

/// Single-direction tangents, nested for higher directional derivatives.
using Tan1 = BasicDual<double, 1>;
using Tan2 = BasicDual<Tan1, 1>;
using Tan3 = BasicDual<Tan2, 1>;
using Tan4 = BasicDual<Tan3, 1>;

template <class T>
struct is_dual : std::false_type {};
template <class V, int N>
struct is_dual<BasicDual<V, N>> : std::true_type {};

/// Innermost double value of a (possibly nested) dual.
inline double value_of(double x) { return x; }
template <class V, int N>
double value_of(const BasicDual<V, N>& x) {
  return value_of(x.value());
}

/// x^k for integer k by repeated multiplication, so the chain rule stays exact.
template <class T>
T ipow(const T& x, int k) {
  if (k == 0) return T(1.0);
  if (k < 0) return T(1.0) / ipow(x, -k);
  T result = x;
  T base = x;
  int e = k - 1;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

}  // namespace distham

namespace Eigen {

template <class V, int N>
struct NumTraits<distham::BasicDual<V, N>> : NumTraits<double> {
  using Real = distham::BasicDual<V, N>;
  using NonInteger = distham::BasicDual<V, N>;
  using Nested = distham::BasicDual<V, N>;
  using Literal = distham::BasicDual<V, N>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3
  };
};

template <class V, int N, typename BinaryOp>
struct ScalarBinaryOpTraits<distham::BasicDual<V, N>, double, BinaryOp> {
  using ReturnType = distham::BasicDual<V, N>;
};
template <class V, int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, distham::BasicDual<V, N>, BinaryOp> {
  using ReturnType = distham::BasicDual<V, N>;
};

}  // namespace Eigen
