#pragma once

// Built-in parameter sets.  The files under configs/ hold the same values.

#include "cqnc/params.hpp"

namespace cqnc::presets {

// Table of representative platform parameters: kappa = 2pi 1 MHz,
// Omega = 2pi 10 MHz, gamma_m = 2pi 100 Hz, gamma_M = 2pi 200 Hz,
// g0 = G_OM = 2pi 10 Hz, OPA gain 0.3 kappa, 1064 nm, 1 uW.
ParamSet table1();

// Broadband-spectrum parameters: g0 = 2pi 300 Hz, Omega = 2pi 300 kHz,
// gamma_m = 2pi 30 Hz, kappa = 2pi 1 MHz, P = 100 mW, omega_L = 2pi 384 THz.
// The magnon linewidth equals gamma_m and the OPA is off.
ParamSet fig2();

// table1() with OPA gain 0.1 kappa, which is dynamically stable.
ParamSet table1_stable();

} // namespace cqnc::presets
