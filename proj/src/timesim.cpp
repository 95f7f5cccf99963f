#include "cqnc/timesim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"

namespace cqnc {

namespace {

constexpr std::size_t finite_check_interval = 4096;

double max_eigen_magnitude(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Symmetric square root factor S with S S^T = Q, dropping null directions.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& Q) {
  const Eigen::MatrixXd sym = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double cutoff = std::max(lambda.cwiseAbs().maxCoeff(), 0.0) * 1e-15;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > cutoff) keep.push_back(i);
  }
  Eigen::MatrixXd S(Q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    S.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]) * std::sqrt(lambda[keep[j]]);
  }
  return S;
}

Eigen::MatrixXd drop_zero_columns(const Eigen::MatrixXd& S) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    if (S.col(j).squaredNorm() > 0.0) keep.push_back(j);
  }
  Eigen::MatrixXd out(S.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = S.col(keep[j]);
  return out;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

} // namespace

void validate_sim_config(const SimConfig& cfg, const SystemParams& params) {
  if (!(cfg.dt > 0)) throw ParameterError("sim: dt must be positive");
  if (!(cfg.duration > cfg.dt)) throw ParameterError("sim: duration must exceed dt");
  if (!(cfg.burn_in >= 0 && cfg.burn_in < 1)) throw ParameterError("sim: burn_in must be in [0, 1)");
  if (!(cfg.welch_overlap >= 0 && cfg.welch_overlap < 1)) {
    throw ParameterError("sim: welch_overlap must be in [0, 1)");
  }
  if (cfg.welch_segments < 1) throw ParameterError("sim: welch_segments must be positive");
  if (cfg.state_stride < 1) throw ParameterError("sim: state_stride must be positive");
  if (cfg.integrator == Integrator::euler_maruyama) {
    const double resolution = cfg.dt * max_eigen_magnitude(build_drift(params).A);
    if (!(resolution < em_resolution_limit)) {
      throw ParameterError("sim: dt * max|eig(A)| = " + std::to_string(resolution) +
                           " violates the Euler-Maruyama resolution guard (< 0.1)");
    }
  }
  const double min_duration = min_duration_periods * two_pi / params.gamma_m();
  if (!cfg.allow_short_duration && cfg.duration < min_duration) {
    throw ParameterError("sim: duration " + std::to_string(cfg.duration) + " s is below 100 * 2pi/gamma_m = " +
                         std::to_string(min_duration) + " s");
  }
}

Eigen::Matrix<double, 5, 1> input_variances(const SystemParams& params, const SimConfig& cfg) {
  const double v = noise_convention.vacuum_quadrature_variance;
  Eigen::Matrix<double, 5, 1> var = Eigen::Matrix<double, 5, 1>::Constant(v);
  var[input::F_total] = thermal_occupation(params) + (cfg.thermal_vacuum_floor ? v : 0.0);
  return var;
}

LinearSde output_phase_sde(const DriftSystem<double>& drift,
                           const Eigen::Matrix<double, 5, 1>& variances) {
  LinearSde sde;
  sde.A = drift.A;
  sde.B = drift.B;
  sde.variances = variances;
  sde.output = Eigen::RowVectorXd::Zero(6);
  sde.output[state::p_a] = drift.sqrt_kappa();
  sde.feedthrough = input::p_a_in;
  return sde;
}

Discretization discretize(const LinearSde& sde, double dt, Integrator integrator) {
  const Eigen::Index n = sde.A.rows();
  const Eigen::Index m = sde.B.cols();
  if (sde.A.cols() != n || sde.B.rows() != n || sde.variances.size() != m) {
    throw ParameterError("discretize: inconsistent SDE dimensions");
  }
  if ((sde.variances.array() < 0).any()) throw ParameterError("discretize: negative input variance");
  const bool has_output = sde.output.size() > 0;
  if (has_output && (sde.output.size() != n || sde.feedthrough < 0 || sde.feedthrough >= m)) {
    throw ParameterError("discretize: invalid output definition");
  }
  const Eigen::Index k = has_output ? n + 2 : n;

  // Augmented system: rows n and n+1 integrate the output and the feedthrough noise.
  Eigen::MatrixXd At = Eigen::MatrixXd::Zero(k, k);
  At.topLeftCorner(n, n) = sde.A;
  Eigen::MatrixXd Bt = Eigen::MatrixXd::Zero(k, m);
  Bt.topRows(n) = sde.B;
  if (has_output) {
    At.block(n, 0, 1, n) = sde.output;
    Bt(n + 1, sde.feedthrough) = 1.0;
  }

  Discretization d;
  d.state_dim = n;
  d.has_output = has_output;
  d.dt = dt;
  if (integrator == Integrator::euler_maruyama) {
    d.transition = Eigen::MatrixXd::Identity(k, n) + At.leftCols(n) * dt;
    const Eigen::VectorXd scale = (sde.variances * dt).cwiseSqrt();
    d.noise_factor = drop_zero_columns(Bt * scale.asDiagonal());
    return d;
  }

  // Van Loan: exp([[-A, Q], [0, A^T]] dt) = [[., F^{-1} Qd], [0, F^T]].
  const Eigen::MatrixXd Qc = Bt * sde.variances.asDiagonal() * Bt.transpose();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  M.topLeftCorner(k, k) = -At * dt;
  M.topRightCorner(k, k) = Qc * dt;
  M.bottomRightCorner(k, k) = At.transpose() * dt;
  const Eigen::MatrixXd E = M.exp();
  const Eigen::MatrixXd Phi = E.bottomRightCorner(k, k).transpose();
  const Eigen::MatrixXd Qd = Phi * E.topRightCorner(k, k);
  d.transition = Phi.leftCols(n);
  d.noise_factor = covariance_factor(Qd);
  return d;
}

void integrate(const Discretization& disc, const Eigen::VectorXd& x0, std::size_t steps,
               std::uint64_t seed, bool noise, const StepSink& sink) {
  const Eigen::Index n = disc.state_dim;
  if (x0.size() != n) throw ParameterError("integrate: initial state has wrong dimension");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index r = disc.noise_factor.cols();
  Eigen::VectorXd x = x0;
  Eigen::VectorXd next(disc.transition.rows());
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(r);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t step = 0; step < steps; ++step) {
    next.noalias() = disc.transition * x;
    if (noise && r > 0) {
      for (Eigen::Index j = 0; j < r; ++j) xi[j] = normal(rng);
      next.noalias() += disc.noise_factor * xi;
    }
    const double y = disc.has_output ? (next[n] - next[n + 1]) / disc.dt : nan;
    sink(step, x, y);
    x = next.head(n);
    if ((step + 1) % finite_check_interval == 0 && !x.allFinite()) {
      throw NumericalError("integrate: non-finite state after " + std::to_string(step + 1) +
                           " steps");
    }
  }
  if (!x.allFinite()) {
    throw NumericalError("integrate: non-finite state after " + std::to_string(steps) + " steps");
  }
}

namespace {

Trajectory run(const Discretization& disc, const Eigen::VectorXd& x0, std::size_t steps,
               std::uint64_t seed, bool noise, std::size_t stride) {
  Trajectory t;
  t.dt = disc.dt;
  t.state_stride = stride;
  const std::size_t stored = (steps + stride - 1) / stride;
  t.states.resize(disc.state_dim, static_cast<Eigen::Index>(stored));
  t.times.reserve(stored);
  if (disc.has_output) t.output_phase.reserve(steps);
  integrate(disc, x0, steps, seed, noise, [&](std::size_t step, const Eigen::VectorXd& x, double y) {
    if (step % stride == 0) {
      t.states.col(static_cast<Eigen::Index>(step / stride)) = x;
      t.times.push_back(static_cast<double>(step) * disc.dt);
    }
    if (disc.has_output) t.output_phase.push_back(y);
  });
  return t;
}

} // namespace

namespace {

void require_stable(const SystemParams& params) {
  const auto report = stability_check(params);
  if (!report.stable) {
    throw ParameterError(
        "time-domain simulation refused: the drift matrix has an eigenvalue with real part " +
        std::to_string(report.eigenvalues.real().maxCoeff()) +
        " >= 0 (amplitude-quadrature damping kappa/2 - 2G = " +
        std::to_string(report.amplitude_quadrature_damping) + ")");
  }
}

Discretization system_discretization(const SystemParams& params, const SimConfig& cfg) {
  const auto sde = output_phase_sde(build_drift(params), input_variances(params, cfg));
  return discretize(sde, cfg.dt, cfg.integrator);
}

std::size_t step_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
}

Eigen::VectorXd initial_state(const SimConfig& cfg) {
  return cfg.initial_state ? Eigen::VectorXd(*cfg.initial_state) : Eigen::VectorXd::Zero(6);
}

} // namespace

Trajectory simulate(const SystemParams& params, const SimConfig& cfg) {
  validate_sim_config(cfg, params);
  require_stable(params);
  return run(system_discretization(params, cfg), initial_state(cfg), step_count(cfg), cfg.seed,
             cfg.noise, cfg.state_stride);
}

WelchAccumulator stream_psd(const SystemParams& params, const SimConfig& cfg,
                            std::size_t segment_length, const StepSink& observer) {
  validate_sim_config(cfg, params);
  require_stable(params);
  const std::size_t steps = step_count(cfg);
  const auto start = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(steps)));
  WelchAccumulator acc(segment_length, cfg.welch_overlap, cfg.dt);
  integrate(system_discretization(params, cfg), initial_state(cfg), steps, cfg.seed, cfg.noise,
            [&](std::size_t step, const Eigen::VectorXd& x, double y) {
              if (step < start) return;
              acc.push(y);
              if (observer) observer(step, x, y);
            });
  return acc;
}

Trajectory simulate_linear(const LinearSde& sde, const Eigen::VectorXd& x0, double dt,
                           std::size_t steps, std::uint64_t seed, Integrator integrator,
                           std::size_t state_stride) {
  if (!(dt > 0)) throw ParameterError("simulate_linear: dt must be positive");
  if (state_stride < 1) throw ParameterError("simulate_linear: state_stride must be positive");
  return run(discretize(sde, dt, integrator), x0, steps, seed, true, state_stride);
}

WelchAccumulator::WelchAccumulator(std::size_t segment_length, double overlap, double dt)
    : length_(segment_length), dt_(dt) {
  if (segment_length < 16 || segment_length % 2 != 0) {
    throw ParameterError("Welch: segment length must be even and at least 16");
  }
  if (!(overlap >= 0 && overlap < 1)) throw ParameterError("Welch: overlap must be in [0, 1)");
  if (!(dt > 0)) throw ParameterError("Welch: dt must be positive");
  hop_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(length_) * (1.0 - overlap))));
  window_.resize(length_);
  for (std::size_t i = 0; i < length_; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(length_));
    window_power_ += window_[i] * window_[i];
  }
  buffer_.assign(length_, 0.0);
  sum_.assign(length_ / 2 - 1, 0.0);
  sum_sq_.assign(length_ / 2 - 1, 0.0);
}

void WelchAccumulator::push(double sample) {
  buffer_[filled_ % length_] = sample;
  ++filled_;
  ++since_last_;
  if (filled_ >= length_ && since_last_ >= (count_ == 0 ? length_ : hop_)) {
    process_segment();
    since_last_ = 0;
  }
}

void WelchAccumulator::process_segment() {
  static Eigen::FFT<double> fft;
  std::vector<double> segment(length_);
  const std::size_t start = filled_ % length_;  // oldest sample
  double mean = 0.0;
  for (std::size_t i = 0; i < length_; ++i) {
    segment[i] = buffer_[(start + i) % length_];
    mean += segment[i];
  }
  mean /= static_cast<double>(length_);
  for (std::size_t i = 0; i < length_; ++i) segment[i] = (segment[i] - mean) * window_[i];
  std::vector<std::complex<double>> spectrum;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  fft.fwd(spectrum, segment);
  const double scale = 2.0 * dt_ / window_power_;
  for (std::size_t k = 1; k < length_ / 2; ++k) {
    const double p = scale * std::norm(spectrum[k]);
    sum_[k - 1] += p;
    sum_sq_[k - 1] += p * p;
  }
  ++count_;
}

void WelchAccumulator::merge(const WelchAccumulator& other) {
  if (other.length_ != length_ || other.dt_ != dt_) {
    throw ParameterError("Welch: cannot merge accumulators with different segment length or dt");
  }
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    sum_[k] += other.sum_[k];
    sum_sq_[k] += other.sum_sq_[k];
  }
  count_ += other.count_;
}

std::vector<double> WelchAccumulator::frequencies_hz() const {
  std::vector<double> f(sum_.size());
  const double df = 1.0 / (static_cast<double>(length_) * dt_);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k + 1) * df;
  return f;
}

std::vector<double> WelchAccumulator::one_sided_psd() const {
  if (count_ == 0) throw ParameterError("Welch: no complete segments");
  std::vector<double> out(sum_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sum_[k] / static_cast<double>(count_);
  return out;
}

std::vector<double> WelchAccumulator::one_sided_psd_se() const {
  if (count_ < 2) throw ParameterError("Welch: standard error needs at least two segments");
  const double K = static_cast<double>(count_);
  std::vector<double> out(sum_.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double var = std::max(0.0, (sum_sq_[k] - sum_[k] * sum_[k] / K) / (K - 1.0));
    out[k] = std::sqrt(var / K);
  }
  return out;
}

std::size_t fft_friendly_length(std::size_t n) {
  std::size_t best = 1;
  for (std::size_t a = 1; a <= n; a *= 2) {
    for (std::size_t b = a; b <= n; b *= 3) {
      for (std::size_t c = b; c <= n; c *= 5) best = std::max(best, c);
    }
  }
  return best;
}

std::size_t welch_segment_length(std::size_t samples, int segments, double overlap) {
  if (segments < 1) throw ParameterError("Welch: segment count must be positive");
  const double span = 1.0 + (segments - 1) * (1.0 - overlap);
  auto length = static_cast<std::size_t>(std::floor(static_cast<double>(samples) / span));
  length = fft_friendly_length(length);
  if (length % 2 != 0) length = fft_friendly_length(length - 1);
  return length;
}

SpectrumSeries psd_series(const WelchAccumulator& acc, const SystemParams& params,
                          Integrator integrator) {
  const auto freqs = acc.frequencies_hz();
  const auto raw = acc.one_sided_psd();
  const auto raw_se = acc.one_sided_psd_se();
  const double white = noise_convention.vacuum_quadrature_variance;
  const std::size_t n = freqs.size();

  SpectrumSeries s;
  s.omegas.resize(n);
  std::vector<double> level(n), level_se(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = two_pi * freqs[k];
    s.omegas[k] = w;
    double h = 1.0;
    if (integrator == Integrator::exact) {
      const double sc = sinc(0.5 * w * acc.dt());
      h = sc * sc;
    }
    level[k] = white + (0.5 * raw[k] - white) / h;
    level_se[k] = 0.5 * raw_se[k] / h;
  }
  s.add_channel("output_psd_one_sided", raw);
  s.add_channel("output_psd_one_sided_se", raw_se);
  if (params.g() > 0) {
    std::vector<double> referred(n), referred_se(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double signal = std::norm(pout_coefficients(params, s.omegas[k]).F);
      referred[k] = level[k] / signal;
      referred_se[k] = level_se[k] / signal;
    }
    s.add_channel("output_psd", std::move(level));
    s.add_channel("output_psd_se", std::move(level_se));
    s.add_channel("referred_psd", std::move(referred));
    s.add_channel("referred_psd_se", std::move(referred_se));
  } else {
    s.add_channel("output_psd", std::move(level));
    s.add_channel("output_psd_se", std::move(level_se));
  }
  return s;
}

SpectrumSeries estimate_psd(const Trajectory& trajectory, const SimConfig& cfg,
                            const SystemParams& params) {
  const std::size_t total = trajectory.output_phase.size();
  const auto start = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(total)));
  const std::size_t samples = total - std::min(start, total);
  if (cfg.welch_segments < 8) throw ParameterError("estimate_psd: at least 8 Welch segments are required");
  const std::size_t length = welch_segment_length(samples, cfg.welch_segments, cfg.welch_overlap);
  if (length < 16) {
    throw ParameterError("estimate_psd: too few samples after burn-in for " +
                         std::to_string(cfg.welch_segments) + " segments");
  }
  WelchAccumulator acc(length, cfg.welch_overlap, trajectory.dt);
  for (std::size_t i = start; i < total; ++i) acc.push(trajectory.output_phase[i]);
  if (acc.segments() < 8) throw ParameterError("estimate_psd: fewer than 8 complete segments");
  return psd_series(acc, params, cfg.integrator);
}

} // namespace cqnc
