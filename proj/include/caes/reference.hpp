#pragma once

#include "caes/bilinear.hpp"
#include "caes/params.hpp"

namespace caes {

// Closed-form benchmark model with h_c*A_c = h_eff*V_s. Discharge uses the
// outgoing flow with negative sign in the exponent, so the air cools.
CavernState analytical_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, double dt);

// T held fixed, p from the ideal gas law.
CavernState constant_temperature_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, double dt);

}  // namespace caes
