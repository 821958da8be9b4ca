#pragma once

// Built-in example systems: the vertical-constraint particle (σ(y) = y), the
// vertical rolling disk, and unconstrained test systems.

#include <string>
#include <vector>

#include "distham/action.hpp"
#include "distham/mechanics.hpp"

namespace distham {

/// Particle in R^3 with ż = σ(y)ẋ, σ(y) = y, unit mass, no potential.
MechanicalSystem particle_system();

struct DiskParameters {
  double m = 1.0;
  double I = 2.0;
  double J = 1.0;
  double R = 1.0;
};

/// Vertical rolling disk on (x, y, θ, φ): ẋ = Rθ̇cosφ, ẏ = Rθ̇sinφ.
MechanicalSystem disk_system(const DiskParameters& p = {});

/// k = 0 system with G = I and V = ½|q|².
MechanicalSystem harmonic_system(int n);

/// k = 0 system on R^2 with G = diag(1, 1 + q1²) and V = q1² + cos q2.
MechanicalSystem curved_free_system();

/// R² translations in (x, z) on the particle: ∂x, ∂z.
CotangentLiftedAction particle_translation_action();
/// R² translations in (x, y) on the disk: ∂x, ∂y.
CotangentLiftedAction disk_translation_action();
/// SE(2) on the disk: ∂x, ∂y, −y∂x + x∂y + ∂φ.
CotangentLiftedAction disk_se2_action();

}  // namespace distham
