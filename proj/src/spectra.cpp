#include "cqnc/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "cqnc/errors.hpp"

namespace cqnc {

namespace {

constexpr double vacuum = noise_convention.vacuum_quadrature_variance;

void require_transduction(const SystemParams& p) {
  if (!(p.g() > 0)) throw ParameterError("no transduction: g = 0");
}

double sq(double x) { return x * x; }

} // namespace

OutputCoefficients<double> pout_coefficients(const SystemParams& params, double omega) {
  return pout_coefficients(drift_coefficients(params), omega);
}

OutputCoefficients<double> pout_coefficient_scales(const SystemParams& params, double omega) {
  return pout_coefficient_scales(drift_coefficients(params), omega);
}

double thermal_occupation(const SystemParams& params) {
  return si::k_boltzmann * params.mechanical().temperature / (si::hbar * params.Omega());
}

NoiseBudget s_add(const SystemParams& params, double omega) {
  require_transduction(params);
  const auto c = pout_coefficients(params, omega);
  const double signal = std::norm(c.F);
  NoiseBudget b;
  b.omega = omega;
  b.thermal = thermal_occupation(params);
  b.imprecision = vacuum * std::norm(c.P) / signal;
  b.backaction = vacuum * std::norm(c.X) / signal;
  b.magnon_channel = vacuum * (std::norm(c.XM) + std::norm(c.PM)) / signal;
  b.total = b.thermal + b.imprecision + b.backaction + b.magnon_channel;
  return b;
}

NoiseBudget s_add_printed(const SystemParams& params, double omega) {
  require_transduction(params);
  const auto lm = lambda_minus(omega, params);
  const double k = params.kappa();
  NoiseBudget b;
  b.omega = omega;
  b.thermal = thermal_occupation(params);
  b.imprecision = 0.5 / (sq(params.g()) * std::norm(chi_m(omega, params)) * 2.0 *
                         params.gamma_m() * k) *
                  std::norm((lm * k - 1.0) / lm);
  b.magnon_channel = s_cqnc_floor(params, omega);
  b.total = b.thermal + b.imprecision + b.magnon_channel;
  return b;
}

double s_cqnc_floor(const SystemParams& params, double omega) {
  const double W = params.Omega();
  return 0.5 * (sq(omega) + sq(W) + sq(params.gamma_M()) / 4.0) / sq(W);
}

double s_standard_at_g(const SystemParams& params, double g, double omega) {
  const double k = params.kappa(), gm = params.gamma_m();
  const double chi2 = std::norm(chi_m(omega, params));
  const double imprecision = 0.5 * (k / gm) / (sq(g) * chi2) * 0.25;
  const double backaction = 4.0 * sq(g) / (k * gm);
  return imprecision + backaction;
}

NoiseBudget s_standard(const SystemParams& params, double omega) {
  require_transduction(params);
  const double k = params.kappa(), gm = params.gamma_m(), g = params.g();
  NoiseBudget b;
  b.omega = omega;
  b.thermal = thermal_occupation(params);
  b.imprecision = 0.5 * (k / gm) / (sq(g) * std::norm(chi_m(omega, params))) * 0.25;
  b.backaction = 4.0 * sq(g) / (k * gm);
  b.total = b.thermal + b.imprecision + b.backaction;
  return b;
}

double s_sql(const SystemParams& params, double omega) {
  return 1.0 / (params.gamma_m() * std::abs(chi_m(omega, params)));
}

double g_sql(const SystemParams& params, double omega) {
  return std::sqrt(params.kappa()) / (2.0 * std::sqrt(std::abs(chi_m(omega, params))));
}

double mismatch_residual_prefactor(const SystemParams& params, double omega) {
  return params.kappa() * sq(params.g()) / params.gamma_m() * std::norm(lambda_plus(omega, params));
}

double s_cqnc_gamma_mismatch(const SystemParams& params, double delta, double omega) {
  if (!(delta > -1.0)) throw ParameterError("gamma mismatch requires delta > -1");
  const double gamma_M = (1.0 + delta) * params.gamma_m();
  const double W = params.Omega();
  const double floor = 0.5 * (sq(omega) + sq(W) + sq(gamma_M) / 4.0) / sq(W);
  const auto ratio = chi_M_prime(omega, gamma_M, params.Delta_M()) / chi_m(omega, params);
  return floor + mismatch_residual_prefactor(params, omega) * std::norm(1.0 + ratio);
}

double s_cqnc_coupling_mismatch(const SystemParams& params, double epsilon, double omega) {
  if (!(epsilon > -1.0)) throw ParameterError("coupling mismatch requires epsilon > -1");
  const double factor = 1.0 - sq(1.0 + epsilon);
  return s_cqnc_floor(params, omega) + mismatch_residual_prefactor(params, omega) * sq(factor);
}

StandardOptimum standard_optimum(const SystemParams& params, double omega) {
  StandardOptimum r;
  r.omega = omega;
  const double g_ref = g_sql(params, omega);
  const double lo = std::log(g_ref) - 20.0, hi = std::log(g_ref) + 20.0;
  auto f = [&](double log_g) { return s_standard_at_g(params, std::exp(log_g), omega); };
  const auto [log_g, value] = boost::math::tools::brent_find_minima(f, lo, hi, 52);
  r.g_opt = std::exp(log_g);
  r.min_value = value;

  const double k = params.kappa(), gm = params.gamma_m();
  const double chi2 = std::norm(chi_m(omega, params));
  const double imprecision = 0.125 * (k / gm) / (sq(r.g_opt) * chi2);
  const double backaction = 4.0 * sq(r.g_opt) / (k * gm);
  r.first_order_residual = std::abs(backaction - imprecision) / (backaction + imprecision);
  r.value_ratio_to_sql = r.min_value / s_sql(params, omega);
  r.argmin_ratio_to_g_sql = r.g_opt / g_ref;
  return r;
}

void SpectrumSeries::add_channel(std::string name, std::vector<double> values) {
  if (has_channel(name)) throw ParameterError("duplicate channel: " + name);
  channels.push_back({std::move(name), std::move(values)});
}

bool SpectrumSeries::has_channel(const std::string& name) const {
  return std::any_of(channels.begin(), channels.end(),
                     [&](const SpectrumChannel& c) { return c.name == name; });
}

const std::vector<double>& SpectrumSeries::channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c.values;
  }
  throw ParameterError("no such channel: " + name);
}

void SpectrumSeries::validate() const {
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (!(omegas[i] > omegas[i - 1])) throw ParameterError("frequency grid not strictly increasing");
  }
  for (const auto& c : channels) {
    if (c.values.size() != omegas.size()) {
      throw ParameterError("channel " + c.name + " length differs from grid");
    }
  }
}

std::string to_string(SpectrumUnits units) {
  switch (units) {
    case SpectrumUnits::dimensionless: return "dimensionless";
    case SpectrumUnits::newton_squared_per_hz: return "N^2/Hz";
    case SpectrumUnits::newton_per_root_hz: return "N/sqrt(Hz)";
  }
  return "unknown";
}

SpectrumUnits spectrum_units_from_string(const std::string& name) {
  for (auto u : {SpectrumUnits::dimensionless, SpectrumUnits::newton_squared_per_hz,
                 SpectrumUnits::newton_per_root_hz}) {
    if (to_string(u) == name) return u;
  }
  throw ParameterError("unknown units: " + name);
}

double force_psd_scale(const SystemParams& params) {
  const auto& mass = params.mechanical().mass;
  if (!mass) throw ParameterError("physical units require the mechanical mass");
  return si::hbar * *mass * params.Omega() * params.gamma_m();
}

SpectrumSeries to_physical(const SpectrumSeries& series, const SystemParams& params) {
  if (series.units != SpectrumUnits::dimensionless) {
    throw ParameterError("to_physical expects a dimensionless series");
  }
  const double scale = force_psd_scale(params);
  SpectrumSeries out = series;
  out.units = SpectrumUnits::newton_squared_per_hz;
  for (auto& c : out.channels) {
    for (auto& v : c.values) v *= scale;
  }
  return out;
}

SpectrumSeries sensitivity(const SpectrumSeries& series, const SystemParams& params) {
  SpectrumSeries out =
      series.units == SpectrumUnits::dimensionless ? to_physical(series, params) : series;
  if (out.units != SpectrumUnits::newton_squared_per_hz) {
    throw ParameterError("sensitivity expects a PSD series");
  }
  out.units = SpectrumUnits::newton_per_root_hz;
  for (auto& c : out.channels) {
    for (auto& v : c.values) v = std::sqrt(v);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0) || !(hi >= lo)) throw ParameterError("log_grid requires 0 < lo <= hi");
  if (points == 0) throw ParameterError("log_grid requires at least one point");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

} // namespace cqnc
