#pragma once

// Closed-form output coefficients and force-referred noise spectra.  All PSDs
// are dimensionless (units of hbar m Omega gamma_m) unless converted with
// to_physical.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cqnc/constants.hpp"
#include "cqnc/oracle.hpp"
#include "cqnc/params.hpp"
#include "cqnc/response.hpp"

namespace cqnc {

// Coefficients of the output phase quadrature on each input channel.
template <typename Scalar>
struct OutputCoefficients {
  std::complex<Scalar> F, X, P, XM, PM;

  // Same values in the oracle's input order (x_a_in, p_a_in, x_M_in, p_M_in, F_total).
  Eigen::Matrix<std::complex<Scalar>, 1, 5> as_row() const {
    Eigen::Matrix<std::complex<Scalar>, 1, 5> r;
    r(input::x_a_in) = X;
    r(input::p_a_in) = P;
    r(input::x_M_in) = XM;
    r(input::p_M_in) = PM;
    r(input::F_total) = F;
    return r;
  }
};

template <typename Scalar>
OutputCoefficients<Scalar> pout_coefficients(const DriftCoefficients<Scalar>& c, Scalar omega) {
  using std::sqrt;
  const auto cm = chi_m(omega, c.Omega, c.gamma_m);
  const auto cM = chi_M(omega, c.gamma_M);
  const auto cMp = chi_M_prime(omega, c.gamma_M, c.Delta_M);
  const auto lp = lambda_pm(omega, c.kappa, c.gain, Branch::plus);
  const auto lm = lambda_pm(omega, c.kappa, c.gain, Branch::minus);
  const Scalar magnon_port = c.G * sqrt(c.kappa * c.gamma_M);

  OutputCoefficients<Scalar> out;
  out.F = -c.g * cm * lm * sqrt(2 * c.gamma_m * c.kappa);
  out.X = (c.g * c.g * cm + c.G * c.G * cMp) * lp * lm * c.kappa;
  out.P = lm * c.kappa - Scalar(1);
  out.XM = -magnon_port * lm * cM * (c.Delta_M * cMp + Scalar(1));
  out.PM = -magnon_port * lm * cMp;
  return out;
}

// Magnitude of the largest unreduced term in each coefficient.  Used as the
// floor of relative comparisons where the closed form involves cancellation.
template <typename Scalar>
OutputCoefficients<Scalar> pout_coefficient_scales(const DriftCoefficients<Scalar>& c,
                                                   Scalar omega) {
  using std::abs;
  using std::sqrt;
  const auto cm = chi_m(omega, c.Omega, c.gamma_m);
  const auto cM = chi_M(omega, c.gamma_M);
  const auto cMp = chi_M_prime(omega, c.gamma_M, c.Delta_M);
  const auto lp = lambda_pm(omega, c.kappa, c.gain, Branch::plus);
  const auto lm = lambda_pm(omega, c.kappa, c.gain, Branch::minus);
  const Scalar magnon_port = c.G * sqrt(c.kappa * c.gamma_M);

  OutputCoefficients<Scalar> s;
  s.F = abs(c.g * cm * lm) * sqrt(2 * c.gamma_m * c.kappa);
  s.X = (abs(c.g * c.g * cm) + abs(c.G * c.G * cMp)) * abs(lp * lm) * c.kappa;
  s.P = abs(lm) * c.kappa + Scalar(1);
  s.XM = magnon_port * abs(lm * cM) * (abs(c.Delta_M * cMp) + Scalar(1));
  s.PM = magnon_port * abs(lm * cMp);
  return s;
}

OutputCoefficients<double> pout_coefficients(const SystemParams& params, double omega);
OutputCoefficients<double> pout_coefficient_scales(const SystemParams& params, double omega);

struct NoiseBudget {
  double omega = 0.0;
  double thermal = 0.0;
  double imprecision = 0.0;
  double backaction = 0.0;
  double magnon_channel = 0.0;
  double total = 0.0;

  double total_excluding_thermal() const { return total - thermal; }
};

double thermal_occupation(const SystemParams& params);

// Full added-noise budget from the output coefficients: each vacuum channel
// contributes |c_i / c_F|^2 times the vacuum quadrature variance.  Throws
// ParameterError("no transduction") when g = 0.
NoiseBudget s_add(const SystemParams& params, double omega);

// Added noise with the magnon term replaced by the printed CQNC floor and no
// back-action term; the ideal-matching limit of s_add as usually quoted.
NoiseBudget s_add_printed(const SystemParams& params, double omega);

// (1/2)(omega^2 + Omega^2 + gamma_M^2/4) / Omega^2.
double s_cqnc_floor(const SystemParams& params, double omega);

// Standard optomechanical sensor (no OPA, no magnon).
NoiseBudget s_standard(const SystemParams& params, double omega);

// 1 / (gamma_m |chi_m(omega)|).
double s_sql(const SystemParams& params, double omega);
// sqrt(kappa) / (2 sqrt(|chi_m(omega)|)).
double g_sql(const SystemParams& params, double omega);

// Floor with gamma_M = (1 + delta) gamma_m plus the residual back-action
// (kappa g^2 / gamma_m) |lambda_+|^2 |1 + chi'_M / chi_m|^2, where chi'_M uses
// the mismatched gamma_M and the detuning already in params.
double s_cqnc_gamma_mismatch(const SystemParams& params, double delta, double omega);
// Floor plus (kappa g^2 / gamma_m) |lambda_+|^2 |1 - (1 + epsilon)^2|^2.
double s_cqnc_coupling_mismatch(const SystemParams& params, double epsilon, double omega);

// Residual back-action term shared by both mismatch spectra.
double mismatch_residual_prefactor(const SystemParams& params, double omega);

struct StandardOptimum {
  double omega = 0.0;
  double g_opt = 0.0;
  double min_value = 0.0;                 // thermal excluded
  double first_order_residual = 0.0;      // relative |d S / d ln g| at the optimum
  double value_ratio_to_sql = 0.0;        // min_value / s_sql
  double argmin_ratio_to_g_sql = 0.0;     // g_opt / g_sql
};

// Numeric minimum over g of the standard-sensor spectrum (thermal excluded).
StandardOptimum standard_optimum(const SystemParams& params, double omega);

// Same spectrum with an explicit coupling value, thermal excluded.
double s_standard_at_g(const SystemParams& params, double g, double omega);

enum class SpectrumUnits { dimensionless, newton_squared_per_hz, newton_per_root_hz };

struct SpectrumChannel {
  std::string name;
  std::vector<double> values;
};

struct SpectrumSeries {
  std::vector<double> omegas;
  std::vector<SpectrumChannel> channels;
  SpectrumUnits units = SpectrumUnits::dimensionless;

  void add_channel(std::string name, std::vector<double> values);
  const std::vector<double>& channel(const std::string& name) const;
  bool has_channel(const std::string& name) const;
  // Throws ParameterError if the grid is not strictly increasing or a
  // channel length differs from the grid.
  void validate() const;
};

std::string to_string(SpectrumUnits units);
SpectrumUnits spectrum_units_from_string(const std::string& name);

// hbar m Omega gamma_m in N^2/Hz; throws ParameterError when mass is unset.
double force_psd_scale(const SystemParams& params);
SpectrumSeries to_physical(const SpectrumSeries& series, const SystemParams& params);
// Square root of the physical PSD, N/sqrt(Hz).
SpectrumSeries sensitivity(const SpectrumSeries& series, const SystemParams& params);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

} // namespace cqnc
