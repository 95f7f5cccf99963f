#include "cqnc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/oracle.hpp"
#include "cqnc/spectra.hpp"
#include "cqnc/timesim.hpp"

namespace cqnc {

namespace {

std::string format_count(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

} // namespace

OracleCheck oracle_equivalence(const SystemParams& params, const std::vector<double>& omegas) {
  const auto drift = build_drift(params);
  OracleCheck out;
  for (double w : omegas) {
    const auto oracle = output_phase_from_oracle(drift, w);
    const auto closed = pout_coefficients(params, w).as_row();
    const auto scale = pout_coefficient_scales(params, w).as_row();
    for (int k = 0; k < 5; ++k) {
      const double denom = std::max(std::abs(oracle(k)), std::abs(scale(k)));
      const double err = denom > 0.0 ? std::abs(oracle(k) - closed(k)) / denom : 0.0;
      if (!(err <= out.max_relative_error)) {
        out.max_relative_error = err;
        out.worst_omega = w;
        out.worst_channel = k;
      }
    }
    ++out.points;
  }
  return out;
}

TimeDomainCheck time_domain_check(const SystemParams& params, const TimeDomainOptions& o) {
  TimeDomainCheck out;
  const auto stability = stability_check(params);
  if (!stability.stable) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "unstable at G_opa = %.3g kappa (largest drift eigenvalue real part %.3g rad/s)",
                  params.gain() / params.kappa(), stability.eigenvalues.real().maxCoeff());
    out.skipped = buf;
    return out;
  }
  if (!(params.g() > 0)) {
    out.skipped = "no transduction (g = 0): the referred spectrum is undefined";
    return out;
  }
  if (o.trajectories < 1) throw ParameterError("time-domain check: trajectories must be positive");
  if (o.batches_per_trajectory < 2) throw ParameterError("time-domain check: need at least two batches");

  const double slowest = -stability.eigenvalues.real().maxCoeff();
  const double total = o.total_duration > 0 ? o.total_duration
                                            : min_duration_periods * two_pi / params.gamma_m();
  if (!o.allow_short_duration && total < min_duration_periods * two_pi / params.gamma_m()) {
    throw ParameterError("time-domain check: total duration below 100 * 2pi/gamma_m");
  }
  out.dt = o.dt_times_Omega / params.Omega();
  out.burn_in_time = o.burn_in_relaxation_times / slowest;
  out.trajectories = o.trajectories;
  const double share = total / o.trajectories;
  out.duration_per_trajectory = out.burn_in_time + share;

  SimConfig cfg;
  cfg.dt = out.dt;
  cfg.duration = out.duration_per_trajectory;
  cfg.burn_in = out.burn_in_time / out.duration_per_trajectory;
  cfg.welch_overlap = o.overlap;
  cfg.allow_short_duration = true;

  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const auto start = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(steps)));
  const std::size_t kept = steps - start;
  const auto min_batch = static_cast<std::size_t>(std::ceil(o.min_batch_relaxation_times / slowest / out.dt));
  const std::size_t batches =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(o.batches_per_trajectory, 1)), kept / min_batch);
  const std::size_t batch_length = batches > 0 ? kept / batches : kept + 1;

  std::optional<WelchAccumulator> merged;
  std::vector<Eigen::Matrix<double, 6, 1>> batch_means;
  for (int t = 0; t < o.trajectories; ++t) {
    cfg.seed = o.seed + static_cast<std::uint64_t>(t);
    Eigen::Matrix<double, 6, 1> sum = Eigen::Matrix<double, 6, 1>::Zero();
    std::size_t count = 0;
    auto acc = stream_psd(params, cfg, o.segment_length,
                          [&](std::size_t, const Eigen::VectorXd& x, double) {
                            sum += x.cwiseAbs2();
                            if (++count == batch_length) {
                              batch_means.push_back(sum / static_cast<double>(batch_length));
                              sum.setZero();
                              count = 0;
                            }
                          });
    if (merged) {
      merged->merge(acc);
    } else {
      merged = std::move(acc);
    }
  }
  out.segments = merged->segments();
  if (out.segments < 8) throw ParameterError("time-domain check: fewer than 8 Welch segments");

  const auto psd = psd_series(*merged, params, cfg.integrator);
  const auto& w = psd.omegas;
  const auto& level = psd.channel("referred_psd");
  const auto& se = psd.channel("referred_psd_se");
  const auto edges = log_grid(o.band_lo_over_Omega * params.Omega(),
                              o.band_hi_over_Omega * params.Omega(),
                              static_cast<std::size_t>(o.bands) + 1);
  out.psd_passed = true;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    BandResult band{edges[b], edges[b + 1]};
    double var = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] < band.lo || w[k] >= band.hi) continue;
      band.simulated += level[k];
      band.closed_form += s_add(params, w[k]).total;
      var += se[k] * se[k];
      ++band.bins;
    }
    if (band.bins == 0) throw ParameterError("time-domain check: empty frequency band; increase segment_length");
    const double n = static_cast<double>(band.bins);
    band.simulated /= n;
    band.closed_form /= n;
    band.standard_error = std::sqrt(var) / n;
    out.max_band_deviation = std::max(out.max_band_deviation, std::abs(band.deviation()));
    out.psd_passed = out.psd_passed && std::abs(band.deviation()) < o.psd_tolerance;
    out.bands.push_back(band);
  }

  const auto sigma = steady_state_covariance(build_drift(params), input_variances(params, cfg));
  const double nb = static_cast<double>(batch_means.size());
  out.variance_passed = true;
  if (batch_means.size() < 8) {
    out.variance_skipped = "only " + std::to_string(batch_means.size()) + " batches of at least " +
                           format_count(o.min_batch_relaxation_times) +
                           " relaxation times; need 8 (increase the duration)";
    return out;
  }
  for (Eigen::Index i = 0; i < state::size; ++i) {
    double mean = 0.0;
    for (const auto& m : batch_means) mean += m[i];
    mean /= nb;
    double ss = 0.0;
    for (const auto& m : batch_means) ss += (m[i] - mean) * (m[i] - mean);
    VarianceResult v{std::string(state::labels[static_cast<std::size_t>(i)]), mean, sigma(i, i),
                     std::sqrt(ss / (nb - 1.0) / nb)};
    out.max_variance_z = std::max(out.max_variance_z, std::abs(v.z()));
    out.variance_passed = out.variance_passed && std::abs(v.z()) < o.variance_sigmas;
    out.variances.push_back(v);
  }
  return out;
}

} // namespace cqnc
