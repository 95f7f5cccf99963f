#include "cqnc/params.hpp"

#include <cmath>
#include <string>

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"

namespace cqnc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

void validate(const ParamSet& p) {
  require(p.mechanical.omega_m > 0, "omega_m must be positive");
  require(p.mechanical.gamma_m > 0, "gamma_m must be positive");
  require(!p.mechanical.mass || *p.mechanical.mass > 0, "mass must be positive");
  require(p.mechanical.temperature >= 0, "temperature must be non-negative");
  require(p.cavity.kappa > 0, "kappa must be positive");
  require(p.cavity.wavelength_L > 0, "wavelength_L must be positive");
  require(std::isfinite(p.cavity.detuning_c), "detuning_c must be finite");
  require(p.magnon.gamma_M > 0, "gamma_M must be positive");
  require(std::isfinite(p.magnon.detuning_M), "detuning_M must be finite");
  require(p.opa.gain >= 0, "OPA gain must be non-negative");
  require(p.opa.phase == 0.0, "only OPA pump phase theta = 0 is supported");
  require(p.couplings.g0 >= 0, "g0 must be non-negative");
  require(p.couplings.G_OM >= 0, "G_OM must be non-negative");
  require(!(p.couplings.alpha_M && p.couplings.G_OM_eff),
          "specify either alpha_M or G_OM_eff, not both");
  require(!p.couplings.alpha_M || *p.couplings.alpha_M >= 0, "alpha_M must be non-negative");
  require(!p.couplings.G_OM_eff || *p.couplings.G_OM_eff >= 0, "G_OM_eff must be non-negative");
  require(p.drive.power >= 0, "drive power must be non-negative");
  require(!p.drive.alpha || *p.drive.alpha >= 0, "alpha must be non-negative");
}

} // namespace

double drive_amplitude(double power, double omega_L, double kappa) {
  if (!(omega_L > 0)) throw ParameterError("drive_amplitude: omega_L must be positive");
  if (!(kappa > 0)) throw ParameterError("drive_amplitude: kappa must be positive");
  if (power < 0) throw ParameterError("drive_amplitude: power must be non-negative");
  return std::sqrt(kappa * power / (si::hbar * omega_L));
}

double intracavity_amplitude(double E_L, double kappa, double gain, double detuning_c) {
  // Mean field: d alpha/dt = (i Delta_c - kappa/2) alpha + 2 G alpha* + E_L.
  const double x_damping = 0.5 * kappa - 2.0 * gain;
  const double p_damping = 0.5 * kappa + 2.0 * gain;
  const double det = x_damping * p_damping + detuning_c * detuning_c;
  if (!(x_damping > 0) && detuning_c == 0.0) {
    throw NumericalError("no stable steady state: 2G >= kappa/2 (parametric threshold)");
  }
  if (!(det > 0)) throw NumericalError("no stable steady state for this detuning and gain");
  const double re = E_L / (x_damping + detuning_c * detuning_c / p_damping);
  const double im = detuning_c * re / p_damping;
  return std::hypot(re, im);
}

DerivedState effective_couplings(const ParamSet& p) {
  DerivedState d;
  d.omega_L = two_pi * si::speed_of_light / p.cavity.wavelength_L;
  d.E_L = drive_amplitude(p.drive.power, d.omega_L, p.cavity.kappa);
  if (p.drive.alpha) {
    d.alpha = *p.drive.alpha;
  } else {
    const double gain = p.drive.mean_field == MeanFieldModel::opa_enhanced ? p.opa.gain : 0.0;
    d.alpha = intracavity_amplitude(d.E_L, p.cavity.kappa, gain, p.cavity.detuning_c);
  }
  d.g = std::sqrt(2.0) * p.couplings.g0 * d.alpha;

  const auto& c = p.couplings;
  if (c.alpha_M) {
    d.alpha_M = *c.alpha_M;
    d.G_OM_eff = std::sqrt(2.0) * c.G_OM * d.alpha_M;
  } else if (c.G_OM_eff) {
    d.G_OM_eff = *c.G_OM_eff;
    if (c.G_OM > 0) {
      d.alpha_M = d.G_OM_eff / (std::sqrt(2.0) * c.G_OM);
    } else if (d.G_OM_eff > 0) {
      throw ParameterError("G_OM_eff > 0 requires G_OM > 0");
    }
  }
  return d;
}

SystemParams::SystemParams(ParamSet inputs) : inputs_(std::move(inputs)) {
  validate(inputs_);
  derived_ = effective_couplings(inputs_);
}

double SystemParams::magnon_coupling() const {
  return inputs_.couplings.convention == CouplingConvention::bare ? inputs_.couplings.G_OM
                                                                   : derived_.G_OM_eff;
}

std::string_view to_string(CouplingConvention c) {
  return c == CouplingConvention::bare ? "G_OM" : "G_OM_eff";
}

std::string_view to_string(MeanFieldModel m) {
  return m == MeanFieldModel::passive ? "passive" : "opa_enhanced";
}

} // namespace cqnc
