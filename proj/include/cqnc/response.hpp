#pragma once

// Scalar susceptibilities of the linearized dynamics.  Fourier convention:
// O(omega) = (2 pi)^{-1/2} \int dt O(t) exp(-i omega t), so d/dt -> i omega.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "cqnc/params.hpp"

namespace cqnc {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
Complex<Scalar> chi_m(Scalar omega, Scalar Omega, Scalar gamma_m) {
  return Omega / Complex<Scalar>(Omega * Omega - omega * omega, gamma_m * omega);
}

template <typename Scalar>
Complex<Scalar> chi_a(Scalar omega, Scalar kappa) {
  return Scalar(1) / Complex<Scalar>(kappa / 2, omega);
}

template <typename Scalar>
Complex<Scalar> chi_M(Scalar omega, Scalar gamma_M) {
  return Scalar(1) / Complex<Scalar>(gamma_M / 2, omega);
}

template <typename Scalar>
Complex<Scalar> xi_M(Scalar omega, Scalar gamma_M, Scalar Delta_M) {
  return Scalar(1) /
         (Complex<Scalar>(gamma_M / 2, omega) + Delta_M * Delta_M * chi_M(omega, gamma_M));
}

template <typename Scalar>
Complex<Scalar> chi_M_prime(Scalar omega, Scalar gamma_M, Scalar Delta_M) {
  return -Delta_M * xi_M(omega, gamma_M, Delta_M) * chi_M(omega, gamma_M);
}

// -Delta_M / ((i omega + gamma_M/2)^2 + Delta_M^2); algebraically equal to
// chi_M_prime.
template <typename Scalar>
Complex<Scalar> chi_M_prime_single_fraction(Scalar omega, Scalar gamma_M, Scalar Delta_M) {
  const Complex<Scalar> s(gamma_M / 2, omega);
  return -Delta_M / (s * s + Delta_M * Delta_M);
}

enum class Branch { plus, minus };

// lambda_{+/-} = (chi_a^{-1} -/+ 2G)^{-1}.  Returns an infinite value at the
// pole (sign plus, 2G = kappa/2, omega = 0).
template <typename Scalar>
Complex<Scalar> lambda_pm(Scalar omega, Scalar kappa, Scalar gain, Branch branch) {
  const Scalar shift = branch == Branch::plus ? -2 * gain : 2 * gain;
  const Complex<Scalar> denom(kappa / 2 + shift, omega);
  if (denom == Complex<Scalar>(0, 0)) {
    return {std::numeric_limits<Scalar>::infinity(), Scalar(0)};
  }
  return Scalar(1) / denom;
}

template <typename Scalar>
std::optional<Complex<Scalar>> lambda_pm_checked(Scalar omega, Scalar kappa, Scalar gain,
                                                 Branch branch) {
  const auto v = lambda_pm(omega, kappa, gain, branch);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;
  return v;
}

// Parameter-set overloads.
inline std::complex<double> chi_m(double omega, const SystemParams& p) {
  return chi_m(omega, p.Omega(), p.gamma_m());
}
inline std::complex<double> chi_a(double omega, const SystemParams& p) {
  return chi_a(omega, p.kappa());
}
inline std::complex<double> chi_M(double omega, const SystemParams& p) {
  return chi_M(omega, p.gamma_M());
}
inline std::complex<double> xi_M(double omega, const SystemParams& p) {
  return xi_M(omega, p.gamma_M(), p.Delta_M());
}
inline std::complex<double> chi_M_prime(double omega, const SystemParams& p) {
  return chi_M_prime(omega, p.gamma_M(), p.Delta_M());
}
inline std::complex<double> lambda_plus(double omega, const SystemParams& p) {
  return lambda_pm(omega, p.kappa(), p.gain(), Branch::plus);
}
inline std::complex<double> lambda_minus(double omega, const SystemParams& p) {
  return lambda_pm(omega, p.kappa(), p.gain(), Branch::minus);
}

enum class ResponseLabel { chi_m, chi_a, chi_M, xi_M, chi_M_prime, lambda_plus, lambda_minus };

std::string_view to_string(ResponseLabel label);
ResponseLabel response_label_from_string(std::string_view name);

struct ComplexResponse {
  ResponseLabel label;
  std::function<std::complex<double>(double)> evaluate;

  std::complex<double> operator()(double omega) const { return evaluate(omega); }
};

ComplexResponse make_response(ResponseLabel label, const SystemParams& params);

// Pointwise evaluation on a grid; identical to calling the response per point.
template <typename Derived, typename Fn>
Eigen::VectorXcd evaluate_on_grid(const Eigen::DenseBase<Derived>& omegas, Fn&& response) {
  Eigen::VectorXcd out(omegas.size());
  for (Eigen::Index i = 0; i < omegas.size(); ++i) out[i] = response(omegas[i]);
  return out;
}

} // namespace cqnc
