#pragma once

// SmoothMap: a map R^in -> R^out that can be evaluated over every scalar
// type the library differentiates with. Built from a generic callable, which
// is instantiated once per scalar type.

#include <functional>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>

#include "distham/dual.hpp"
#include "distham/errors.hpp"
#include "distham/linalg.hpp"

namespace distham {

/// The one-seed tangent type one level above T (double -> Tan1 -> ... -> Tan4).
/// `void` when T is already the deepest supported level.
template <class T>
struct next_tan {
  using type = void;
};
template <>
struct next_tan<double> {
  using type = Tan1;
};
template <>
struct next_tan<Tan1> {
  using type = Tan2;
};
template <>
struct next_tan<Tan2> {
  using type = Tan3;
};
template <>
struct next_tan<Tan3> {
  using type = Tan4;
};
template <class T>
using next_tan_t = typename next_tan<T>::type;

template <class T>
inline constexpr bool has_next_tan = !std::is_void_v<next_tan_t<T>>;

class SmoothMap {
 public:
  template <class T>
  using Fn = std::function<Vec<T>(const Vec<T>&)>;
  using Table = std::tuple<Fn<double>, Fn<Dual>, Fn<Tan1>, Fn<Tan2>, Fn<Tan3>, Fn<Tan4>>;

  SmoothMap() = default;

  /// Wrap a generic callable `f(const Vec<T>&) -> Vec<T>`.
  template <class F>
  static SmoothMap from(int input_dim, int output_dim, F f, std::string name = {}) {
    SmoothMap m;
    m.in_ = input_dim;
    m.out_ = output_dim;
    m.name_ = std::move(name);
    auto bind = [&](auto tag) {
      using T = typename decltype(tag)::type;
      return Fn<T>([f](const Vec<T>& x) -> Vec<T> { return f(x); });
    };
    m.table_ = Table(bind(std::type_identity<double>{}), bind(std::type_identity<Dual>{}),
                     bind(std::type_identity<Tan1>{}), bind(std::type_identity<Tan2>{}),
                     bind(std::type_identity<Tan3>{}), bind(std::type_identity<Tan4>{}));
    return m;
  }

  /// Constant map.
  static SmoothMap constant(int input_dim, const Vector& value, std::string name = {});

  int input_dim() const { return in_; }
  int output_dim() const { return out_; }
  const std::string& name() const { return name_; }
  bool empty() const { return in_ == 0 && out_ == 0; }

  template <class T>
  Vec<T> operator()(const Vec<T>& x) const {
    if (x.size() != in_)
      throw DimensionError(label() + ": expected input of length " + std::to_string(in_) +
                           ", got " + std::to_string(x.size()));
    const auto& fn = std::get<Fn<T>>(table_);
    if (!fn) throw DimensionError(label() + ": not evaluable over this scalar type");
    Vec<T> y = fn(x);
    if (y.size() != out_)
      throw DimensionError(label() + ": evaluator returned length " + std::to_string(y.size()) +
                           ", declared " + std::to_string(out_));
    return y;
  }

 private:
  std::string label() const { return name_.empty() ? std::string("map") : name_; }

  int in_ = 0;
  int out_ = 0;
  std::string name_;
  Table table_;
};

}  // namespace distham
