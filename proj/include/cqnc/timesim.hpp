#pragma once

// Stochastic time-domain integration of the linearized dynamics driven by
// white quadrature noise, and Welch estimation of the output-phase PSD.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cqnc/oracle.hpp"
#include "cqnc/params.hpp"
#include "cqnc/spectra.hpp"

namespace cqnc {

enum class Integrator {
  exact,           // exact Gaussian transition over each step (matrix exponential)
  euler_maruyama,  // first-order explicit scheme
};

struct SimConfig {
  double dt = 0.0;        // s
  double duration = 0.0;  // s
  std::uint64_t seed = 0;
  double burn_in = 0.1;       // discarded initial fraction
  int welch_segments = 8;     // segments available after burn-in
  double welch_overlap = 0.5;
  Integrator integrator = Integrator::exact;
  // Thermal force variance n + 1/2 instead of n.
  bool thermal_vacuum_floor = false;
  bool allow_short_duration = false;
  bool noise = true;
  std::size_t state_stride = 1;  // keep every k-th state in the trajectory
  std::optional<Eigen::Matrix<double, 6, 1>> initial_state;
};

inline constexpr double em_resolution_limit = 0.1;  // dt * max|eig(A)|
inline constexpr double min_duration_periods = 100.0;  // in units of 2 pi / gamma_m

// Throws ParameterError if the configuration violates its invariants for this
// parameter set.
void validate_sim_config(const SimConfig& cfg, const SystemParams& params);

// Per-step intensities of the five inputs (x_a_in, p_a_in, x_M_in, p_M_in, F_total).
Eigen::Matrix<double, 5, 1> input_variances(const SystemParams& params, const SimConfig& cfg);

// Generic linear SDE dX = A X dt + B dW, E[dW dW^T] = diag(variances) dt, with
// an optional scalar output y = C X - u_k, where u_k is the white input on
// channel k.
struct LinearSde {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd variances;
  Eigen::RowVectorXd output;        // empty for no output
  Eigen::Index feedthrough = -1;    // input channel subtracted from the output
};

LinearSde output_phase_sde(const DriftSystem<double>& drift,
                           const Eigen::Matrix<double, 5, 1>& variances);

// One-step map: next = transition * x + noise_factor * xi with xi standard
// normal.  Rows beyond the state dimension hold the step integrals of the
// output and of the feedthrough noise.
struct Discretization {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd noise_factor;
  Eigen::Index state_dim = 0;
  bool has_output = false;
  double dt = 0.0;
};

Discretization discretize(const LinearSde& sde, double dt, Integrator integrator);

// Called once per step with the step index, the state at the start of the
// step and the output sample of the step (NaN when the SDE has no output).
using StepSink = std::function<void(std::size_t, const Eigen::VectorXd&, double)>;

// Integrates for `steps` steps; checks for non-finite values every 4096 steps
// and throws NumericalError with the step count.
void integrate(const Discretization& disc, const Eigen::VectorXd& x0, std::size_t steps,
               std::uint64_t seed, bool noise, const StepSink& sink);

struct Trajectory {
  double dt = 0.0;
  std::size_t state_stride = 1;
  std::vector<double> times;   // times of the stored states
  Eigen::MatrixXd states;      // 6 x stored
  std::vector<double> output_phase;  // one sample per step
};

// Refuses unstable parameter sets with ParameterError.
Trajectory simulate(const SystemParams& params, const SimConfig& cfg);

// Any linear SDE with the same integrator; stores every `state_stride`-th state.
Trajectory simulate_linear(const LinearSde& sde, const Eigen::VectorXd& x0, double dt,
                           std::size_t steps, std::uint64_t seed, Integrator integrator,
                           std::size_t state_stride = 1);

// Averaged modified periodograms with a Hann window.  Samples are pushed one
// at a time; partial accumulators over the same segment length merge.
class WelchAccumulator {
public:
  WelchAccumulator(std::size_t segment_length, double overlap, double dt);

  void push(double sample);
  template <typename Range>
  void push_all(const Range& samples) {
    for (double s : samples) push(s);
  }
  void merge(const WelchAccumulator& other);

  std::size_t segment_length() const { return length_; }
  std::size_t segments() const { return count_; }
  double dt() const { return dt_; }

  // Frequencies (Hz) of bins 1 .. L/2 - 1.
  std::vector<double> frequencies_hz() const;
  // One-sided PSD per Hz and the standard error of its mean, same bins.
  std::vector<double> one_sided_psd() const;
  std::vector<double> one_sided_psd_se() const;

private:
  void process_segment();

  std::size_t length_;
  std::size_t hop_;
  double dt_;
  std::vector<double> window_;
  double window_power_ = 0.0;
  std::vector<double> buffer_;
  std::size_t filled_ = 0;
  std::size_t since_last_ = 0;
  std::size_t count_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

// Largest 2^a 3^b 5^c not exceeding n.
std::size_t fft_friendly_length(std::size_t n);

// Segment length giving `segments` segments with the given overlap.
std::size_t welch_segment_length(std::size_t samples, int segments, double overlap);

// Channels: output_psd_one_sided, output_psd_one_sided_se (raw Welch, per Hz);
// output_psd, output_psd_se (two-sided level comparable to sum |c_i|^2 v_i; for
// the exact integrator corrected for the step average); and, when g > 0,
// referred_psd, referred_psd_se (output_psd / |c_F|^2).
SpectrumSeries psd_series(const WelchAccumulator& acc, const SystemParams& params,
                          Integrator integrator);

// Welch estimate of a trajectory's output phase after burn-in.  Throws
// ParameterError if fewer than 8 segments fit.
SpectrumSeries estimate_psd(const Trajectory& trajectory, const SimConfig& cfg,
                            const SystemParams& params);

// Runs a simulation straight into a Welch accumulator without storing the
// trajectory.  Steps inside the burn-in fraction are discarded; `observer`, when
// set, sees every retained step.
WelchAccumulator stream_psd(const SystemParams& params, const SimConfig& cfg,
                            std::size_t segment_length, const StepSink& observer = {});

} // namespace cqnc
