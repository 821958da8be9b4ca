#include "distham/smooth_map.hpp"

namespace distham {

SmoothMap SmoothMap::constant(int input_dim, const Vector& value, std::string name) {
  return from(
      input_dim, static_cast<int>(value.size()),
      [value](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::Scalar;
        return lift<T>(value);
      },
      std::move(name));
}

}  // namespace distham
