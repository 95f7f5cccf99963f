#pragma once

#include <numbers>

namespace cqnc {

namespace si {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double speed_of_light = 299792458.0; // m/s
} // namespace si

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Symmetrized spectral density of every vacuum input quadrature, fixed by
// <a_in(t) a_in^dag(t')> = delta(t - t').  Closed-form spectra, the
// channel-variance sums and the time-domain noise generator all read this.
struct NoiseConvention {
  double vacuum_quadrature_variance = 0.5;
};

inline constexpr NoiseConvention noise_convention{};

inline constexpr double hz_to_rad(double hz) { return two_pi * hz; }
inline constexpr double rad_to_hz(double rad_s) { return rad_s / two_pi; }

} // namespace cqnc
