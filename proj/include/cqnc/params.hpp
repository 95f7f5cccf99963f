#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace cqnc {

// All rates and frequencies are angular (rad/s).

struct MechanicalMode {
  double omega_m = 0.0;  // mechanical frequency
  double gamma_m = 0.0;  // damping rate
  std::optional<double> mass;  // kg; only needed for physical units
  double temperature = 0.0;    // K
};

struct CavityMode {
  double kappa = 0.0;         // energy decay rate
  double wavelength_L = 0.0;  // drive wavelength (m)
  double detuning_c = 0.0;    // omega_L - omega_c; steady-state solver only
};

struct MagnonMode {
  double gamma_M = 0.0;
  double detuning_M = 0.0;  // omega_L - omega_M
};

struct OpaParams {
  double gain = 0.0;   // parametric gain, rad/s
  double phase = 0.0;  // pump phase; only 0 is supported
};

// Which cavity-magnon coupling enters the linearized dynamics.
enum class CouplingConvention {
  bare,       // G_OM as printed in the Langevin equations
  effective,  // G'_OM = sqrt(2) G_OM alpha_M
};

// How the input power maps onto the steady-state intracavity amplitude.
enum class MeanFieldModel {
  passive,       // alpha = 2 E_L / kappa; OPA acts on fluctuations only
  opa_enhanced,  // alpha = E_L / (kappa/2 - 2 G); undefined above threshold
};

struct Couplings {
  double g0 = 0.0;    // single-photon optomechanical coupling
  double G_OM = 0.0;  // cavity-magnon coupling
  // At most one of these fixes the magnon steady state.
  std::optional<double> alpha_M;
  std::optional<double> G_OM_eff;
  CouplingConvention convention = CouplingConvention::effective;
};

struct Drive {
  double power = 0.0;  // W
  // Bypasses the power -> amplitude conversion when set.
  std::optional<double> alpha;
  MeanFieldModel mean_field = MeanFieldModel::passive;
};

struct DerivedState {
  double omega_L = 0.0;
  double E_L = 0.0;
  double alpha = 0.0;
  double g = 0.0;  // sqrt(2) g0 alpha
  double alpha_M = 0.0;
  double G_OM_eff = 0.0;  // sqrt(2) G_OM alpha_M
};

struct ParamSet {
  MechanicalMode mechanical;
  CavityMode cavity;
  MagnonMode magnon;
  OpaParams opa;
  Couplings couplings;
  Drive drive;
};

// Validated parameter set with its derived steady state.  Immutable; edits go
// through modified(), which re-derives everything.
class SystemParams {
public:
  explicit SystemParams(ParamSet inputs);

  const ParamSet& inputs() const { return inputs_; }
  const MechanicalMode& mechanical() const { return inputs_.mechanical; }
  const CavityMode& cavity() const { return inputs_.cavity; }
  const MagnonMode& magnon() const { return inputs_.magnon; }
  const OpaParams& opa() const { return inputs_.opa; }
  const Couplings& couplings() const { return inputs_.couplings; }
  const Drive& drive() const { return inputs_.drive; }
  const DerivedState& derived() const { return derived_; }

  double Omega() const { return inputs_.mechanical.omega_m; }
  double gamma_m() const { return inputs_.mechanical.gamma_m; }
  double kappa() const { return inputs_.cavity.kappa; }
  double gamma_M() const { return inputs_.magnon.gamma_M; }
  double Delta_M() const { return inputs_.magnon.detuning_M; }
  double gain() const { return inputs_.opa.gain; }
  double g() const { return derived_.g; }

  // Coupling that multiplies x_M / x_a in the dynamics, per the convention.
  double magnon_coupling() const;

  template <class Edit>
  SystemParams modified(Edit&& edit) const {
    ParamSet copy = inputs_;
    std::forward<Edit>(edit)(copy);
    return SystemParams(std::move(copy));
  }

private:
  ParamSet inputs_;
  DerivedState derived_;
};

// E_L = sqrt(kappa P / (hbar omega_L)).
double drive_amplitude(double power, double omega_L, double kappa);

// Real, non-negative steady-state amplitude of the driven cavity with an
// intracavity OPA at pump phase 0.  Throws NumericalError when the mean-field
// fixed point is unstable (2 G >= kappa/2 on resonance).
double intracavity_amplitude(double E_L, double kappa, double gain, double detuning_c);

DerivedState effective_couplings(const ParamSet& inputs);

struct StabilityReport {
  Eigen::VectorXcd eigenvalues;
  bool stable = false;
  double amplitude_quadrature_damping = 0.0;  // kappa/2 - 2 G
  bool amplitude_quadrature_stable = false;
};

StabilityReport stability_check(const SystemParams& params);

std::string_view to_string(CouplingConvention c);
std::string_view to_string(MeanFieldModel m);

} // namespace cqnc
