#pragma once

// INI configuration.  Frequencies and rates are given in linear Hz and stored
// internally in rad/s.
//
//   [mechanical] omega_m_hz, gamma_m_hz, mass_kg, temperature_k
//   [cavity]     kappa_hz, lambda_L_nm, detuning_c_hz
//   [magnon]     gamma_M_hz, detuning_M_hz (default omega_m_hz)
//   [opa]        opa_gain_over_kappa, theta
//   [couplings]  g0_hz, G_OM_hz, alpha_M, G_OM_eff_hz, cqnc_coupling = G_OM | G_OM_eff
//   [drive]      power_w, alpha, mean_field = passive | opa_enhanced
//
// Required: omega_m_hz, gamma_m_hz, kappa_hz, lambda_L_nm, gamma_M_hz, g0_hz,
// power_w.  Unknown sections or keys are rejected.

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "cqnc/params.hpp"

namespace cqnc {

ParamSet parse_config(std::istream& is);
ParamSet load_config(const std::filesystem::path& path);
SystemParams load_params(const std::filesystem::path& path);

void write_config(std::ostream& os, const ParamSet& params);

// Inputs (Hz, as in the config) plus derived quantities (rad/s).
nlohmann::json params_to_json(const SystemParams& params);

} // namespace cqnc
