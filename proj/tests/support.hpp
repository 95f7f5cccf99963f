#pragma once

// Independent reference computations shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "cqnc/oracle.hpp"
#include "cqnc/params.hpp"

namespace cqnc::testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Drift and input matrices written out row by row from the quadrature
// equations of motion, without the library's index constants.
inline std::pair<Eigen::Matrix<double, 6, 6>, Eigen::Matrix<double, 6, 5>> hand_drift(
    double Omega, double gamma_m, double kappa, double gain, double gamma_M, double Delta_M,
    double g, double G) {
  Eigen::Matrix<double, 6, 6> A;
  // columns: x_b p_b x_a p_a x_M p_M
  A << 0, Omega, 0, 0, 0, 0,
      -Omega, -gamma_m, -g, 0, 0, 0,
      0, 0, -kappa / 2 + 2 * gain, 0, 0, 0,
      -g, 0, 0, -kappa / 2 - 2 * gain, -G, 0,
      0, 0, 0, 0, -gamma_M / 2, -Delta_M,
      0, 0, -G, 0, Delta_M, -gamma_M / 2;
  Eigen::Matrix<double, 6, 5> B = Eigen::Matrix<double, 6, 5>::Zero();
  // columns: x_a_in p_a_in x_M_in p_M_in F_total
  B(2, 0) = std::sqrt(kappa);
  B(3, 1) = std::sqrt(kappa);
  B(4, 2) = std::sqrt(gamma_M);
  B(5, 3) = std::sqrt(gamma_M);
  B(1, 4) = std::sqrt(2 * gamma_m);
  return {A, B};
}

// Output coefficients by an independent complex solve with FullPivLU.
inline Eigen::Matrix<std::complex<double>, 1, 5> oracle_row(const SystemParams& p, double omega) {
  auto [A, B] = hand_drift(p.Omega(), p.gamma_m(), p.kappa(), p.gain(), p.gamma_M(), p.Delta_M(),
                           p.g(), p.magnon_coupling());
  using C = std::complex<double>;
  Eigen::Matrix<C, 6, 6> M = Eigen::Matrix<C, 6, 6>::Identity() * C(0, omega) - A.cast<C>();
  Eigen::Matrix<C, 6, 5> T = M.fullPivLu().solve(B.cast<C>());
  Eigen::Matrix<C, 1, 5> row = std::sqrt(p.kappa()) * T.row(3);
  row(1) -= 1.0;
  return row;
}

} // namespace cqnc::testing
