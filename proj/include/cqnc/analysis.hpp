#pragma once

// Operating-point tooling: back-action matching, power sweeps and frequency
// sweeps over named spectrum variants.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqnc/params.hpp"
#include "cqnc/spectra.hpp"

namespace cqnc {

struct FrequencyWindow {
  double lo = 0.0;  // rad/s
  double hi = 0.0;
};

// Default matching window [0.5 Omega, 2 Omega].
FrequencyWindow default_window(const SystemParams& params);

enum class MatchStatus { ok, warning };

struct MatchReport {
  SystemParams matched_params;
  FrequencyWindow window;
  double residual_curve = 0.0;   // max over the window after refinement
  double seed_residual = 0.0;    // same measure at the analytic seed
  double seed_residual_at_Omega = 0.0;
  double wrong_sign_residual = 0.0;  // seed with Delta_M = -Omega, at omega = Omega
  double detuning_sign = 1.0;        // sign of the selected Delta_M
  // Relative change of (gamma_M, Delta_M, coupling) from the seed.
  double gamma_M_shift = 0.0;
  double Delta_M_shift = 0.0;
  double coupling_shift = 0.0;
  int iterations = 0;
  MatchStatus status = MatchStatus::ok;
};

inline constexpr double match_warning_threshold = 1e-3;
inline constexpr double match_box = 0.1;  // +/- relative box around the seed

// |g^2 chi_m + G^2 chi'_M| / |g^2 chi_m| for the coupling selected by the
// params' convention.
double match_residual(const SystemParams& params, double omega);
double max_match_residual(const SystemParams& params, const FrequencyWindow& window,
                          std::size_t points = 2001);

// Seeds gamma_M = gamma_m, Delta_M = +Omega, coupling = g and refines the
// three values within +/-10% by damped Gauss-Newton on the residual over the
// window.  Throws ParameterError when g = 0.
MatchReport match_cqnc(const SystemParams& params, const FrequencyWindow& window);
MatchReport match_cqnc(const SystemParams& params);

enum class VariantKind {
  standard,
  opa_hybrid,
  cqnc,
  cqnc_floor,
  sql,
  gamma_mismatch,
  coupling_mismatch,
  hybrid_total,
};

struct Variant {
  VariantKind kind = VariantKind::standard;
  std::optional<double> value;  // OPA gain / kappa, delta or epsilon

  std::string name() const;
};

// Parses `name` or `name:value`.  Unknown names raise ParameterError listing
// the valid ones.
Variant parse_variant(std::string_view text);
std::vector<Variant> parse_variants(const std::vector<std::string>& names);
std::string valid_variant_names();

// Evaluates every variant on the grid; thermal noise is excluded.  Variants
// that need matched parameters run match_cqnc once over the given window.
SpectrumSeries frequency_sweep(const SystemParams& params, const std::vector<double>& omegas,
                               const std::vector<Variant>& variants,
                               std::optional<FrequencyWindow> window = std::nullopt);

// One variant at one frequency; matching (when needed) is redone for params.
double evaluate_variant(const SystemParams& params, const Variant& variant, double omega);

struct SweepResult {
  std::string axis;  // e.g. "power_w"
  std::string channel;
  std::vector<double> axis_values;
  std::vector<double> spectra_at;
  double omega = 0.0;
  std::size_t grid_argmin = 0;
  double argmin = 0.0;
  double min_value = 0.0;
  bool interior = false;  // grid minimum strictly inside the axis
  bool refined = false;
};

inline constexpr double sweep_refine_tolerance = 1e-4;

// Recomputes the drive chain at each power and evaluates the variant at omega.
// An interior grid minimum is refined by Brent's method on log-power inside
// the bracketing grid neighbours.
SweepResult power_sweep(const SystemParams& params, const std::vector<double>& powers,
                        double omega, const Variant& variant);

} // namespace cqnc
