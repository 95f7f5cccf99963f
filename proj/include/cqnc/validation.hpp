#pragma once

// Self-checks shared by the command-line `validate` report and the acceptance
// driver: closed form against the matrix solve, and the stochastic simulation
// against the closed-form spectrum and the steady-state covariance.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqnc/params.hpp"

namespace cqnc {

struct OracleCheck {
  double max_relative_error = 0.0;
  double worst_omega = 0.0;
  int worst_channel = -1;  // input index
  std::size_t points = 0;
};

inline constexpr double oracle_tolerance = 1e-9;

// Largest relative difference between the closed-form output coefficients and
// the resolvent solve over the grid.  Each difference is divided by the larger
// of the oracle magnitude and the coefficient's term scale, so coefficients
// that cancel to roundoff are compared against the size of their terms.
OracleCheck oracle_equivalence(const SystemParams& params, const std::vector<double>& omegas);

struct TimeDomainOptions {
  double dt_times_Omega = 0.5;
  double total_duration = 0.0;  // s, summed over trajectories after burn-in; 0 = 100 * 2pi/gamma_m
  int trajectories = 4;
  std::uint64_t seed = 1;
  std::size_t segment_length = 65536;
  double overlap = 0.5;
  double burn_in_relaxation_times = 10.0;  // of the slowest drift eigenvalue
  int bands = 20;
  double band_lo_over_Omega = 0.3;
  double band_hi_over_Omega = 3.0;
  int batches_per_trajectory = 10;   // upper bound
  double min_batch_relaxation_times = 5.0;
  double psd_tolerance = 0.10;   // relative, per band
  double variance_sigmas = 3.0;  // standard errors, per state
  bool allow_short_duration = false;
};

struct BandResult {
  double lo = 0.0;  // rad/s
  double hi = 0.0;
  std::size_t bins = 0;
  double simulated = 0.0;    // band mean of the referred estimate
  double closed_form = 0.0;  // band mean of s_add total
  double standard_error = 0.0;
  double deviation() const { return simulated / closed_form - 1.0; }
};

struct VarianceResult {
  std::string state;
  double simulated = 0.0;
  double lyapunov = 0.0;
  double standard_error = 0.0;
  double z() const { return (simulated - lyapunov) / standard_error; }
};

struct TimeDomainCheck {
  std::optional<std::string> skipped;  // reason, when not run
  double dt = 0.0;
  double burn_in_time = 0.0;
  double duration_per_trajectory = 0.0;  // including burn-in
  int trajectories = 0;
  std::size_t segments = 0;
  std::vector<BandResult> bands;
  std::vector<VarianceResult> variances;
  std::optional<std::string> variance_skipped;  // too few batches for batch means
  double max_band_deviation = 0.0;
  double max_variance_z = 0.0;
  bool psd_passed = false;
  bool variance_passed = false;
};

// Runs sequential trajectories with seeds seed, seed + 1, ... and merges their
// Welch estimates.  Returns a skipped result for unstable parameter sets.
TimeDomainCheck time_domain_check(const SystemParams& params, const TimeDomainOptions& options);

} // namespace cqnc
