#include "cqnc/presets.hpp"

#include "cqnc/constants.hpp"

namespace cqnc::presets {

ParamSet table1() {
  ParamSet p;
  p.mechanical.omega_m = hz_to_rad(10e6);
  p.mechanical.gamma_m = hz_to_rad(100.0);
  p.cavity.kappa = hz_to_rad(1e6);
  p.cavity.wavelength_L = 1064e-9;
  p.magnon.gamma_M = hz_to_rad(200.0);
  p.magnon.detuning_M = p.mechanical.omega_m;
  p.opa.gain = 0.3 * p.cavity.kappa;
  p.couplings.g0 = hz_to_rad(10.0);
  p.couplings.G_OM = hz_to_rad(10.0);
  p.couplings.convention = CouplingConvention::bare;
  p.drive.power = 1e-6;
  return p;
}

ParamSet fig2() {
  ParamSet p;
  p.mechanical.omega_m = hz_to_rad(300e3);
  p.mechanical.gamma_m = hz_to_rad(30.0);
  p.cavity.kappa = hz_to_rad(1e6);
  p.cavity.wavelength_L = si::speed_of_light / 384e12;
  p.magnon.gamma_M = hz_to_rad(30.0);
  p.magnon.detuning_M = p.mechanical.omega_m;
  p.couplings.g0 = hz_to_rad(300.0);
  p.couplings.G_OM = hz_to_rad(10.0);
  p.couplings.convention = CouplingConvention::bare;
  p.drive.power = 0.1;
  return p;
}

ParamSet table1_stable() {
  ParamSet p = table1();
  p.opa.gain = 0.1 * p.cavity.kappa;
  return p;
}

} // namespace cqnc::presets
