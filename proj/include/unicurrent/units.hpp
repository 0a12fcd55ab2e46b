#pragma once

#include <stdexcept>

namespace unicurrent {

// Unit system for the quantum side. Defaults are natural units; every
// formula keeps alpha = hbar*dt/mass symbolic so other scales can be
// injected without touching the numerics.
struct NaturalUnits {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0))
      throw std::invalid_argument("NaturalUnits: hbar and mass must be positive");
  }

  // Short-time parameter alpha(dt) = hbar*dt/mass, strictly increasing in dt.
  double alpha(double delta_t) const { return hbar * delta_t / mass; }
};

}  // namespace unicurrent
