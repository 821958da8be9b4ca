#pragma once

#include <string>
#include <vector>

#include "distham/mechanics.hpp"

namespace distham {

/// Infinitesimal generators ξ_Q of a Lie group action on the base chart. The
/// action on T*Q is the cotangent lift.
struct CotangentLiftedAction {
  std::vector<std::string> names;
  std::vector<SmoothMap> generators;

  int dim() const { return static_cast<int>(generators.size()); }
};

/// ⟨J(q,p), ξ_i⟩ = p · ξ_i(q) for each generator.
Vector momentum_map(const CotangentLiftedAction& action, const PhasePoint& z);

/// Generator of the lifted action on T*Q: (ξ(q), −Dξ(q)ᵀ p).
Vector lifted_generator(const SmoothMap& xi, const Vector& z);

}  // namespace distham
