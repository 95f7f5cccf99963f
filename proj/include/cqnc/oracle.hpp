#pragma once

// Matrix form of the linearized Langevin equations, dX/dt = A X + B u, and its
// frequency-domain resolvent T(omega) = (i omega I - A)^{-1} B.

#include <array>
#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cqnc/errors.hpp"
#include "cqnc/params.hpp"

namespace cqnc {

namespace state {
enum Index : Eigen::Index { x_b = 0, p_b, x_a, p_a, x_M, p_M };
inline constexpr Eigen::Index size = 6;
inline constexpr std::array<std::string_view, 6> labels{"x_b", "p_b", "x_a", "p_a", "x_M", "p_M"};
} // namespace state

namespace input {
enum Index : Eigen::Index { x_a_in = 0, p_a_in, x_M_in, p_M_in, F_total };
inline constexpr Eigen::Index size = 5;
inline constexpr std::array<std::string_view, 5> labels{"x_a_in", "p_a_in", "x_M_in", "p_M_in",
                                                        "F_total"};
} // namespace input

template <typename Scalar>
struct DriftSystem {
  using DriftMatrix = Eigen::Matrix<Scalar, 6, 6>;
  using InputMatrix = Eigen::Matrix<Scalar, 6, 5>;

  DriftMatrix A = DriftMatrix::Zero();
  InputMatrix B = InputMatrix::Zero();

  Scalar sqrt_kappa() const { return B(state::p_a, input::p_a_in); }
};

template <typename Scalar>
struct DriftCoefficients {
  Scalar Omega, gamma_m, kappa, gain, gamma_M, Delta_M, g, G;
};

template <typename Scalar>
DriftSystem<Scalar> build_drift(const DriftCoefficients<Scalar>& c) {
  using namespace state;
  DriftSystem<Scalar> d;
  auto& A = d.A;
  A(x_b, p_b) = c.Omega;
  A(p_b, x_b) = -c.Omega;
  A(p_b, p_b) = -c.gamma_m;
  A(p_b, x_a) = -c.g;
  A(x_a, x_a) = -c.kappa / 2 + 2 * c.gain;
  A(p_a, x_b) = -c.g;
  A(p_a, p_a) = -c.kappa / 2 - 2 * c.gain;
  A(p_a, x_M) = -c.G;
  A(x_M, x_M) = -c.gamma_M / 2;
  A(x_M, p_M) = -c.Delta_M;
  A(p_M, x_a) = -c.G;
  A(p_M, x_M) = c.Delta_M;
  A(p_M, p_M) = -c.gamma_M / 2;

  using std::sqrt;
  auto& B = d.B;
  B(x_a, input::x_a_in) = sqrt(c.kappa);
  B(p_a, input::p_a_in) = sqrt(c.kappa);
  B(x_M, input::x_M_in) = sqrt(c.gamma_M);
  B(p_M, input::p_M_in) = sqrt(c.gamma_M);
  B(p_b, input::F_total) = sqrt(2 * c.gamma_m);
  return d;
}

DriftCoefficients<double> drift_coefficients(const SystemParams& params);
DriftSystem<double> build_drift(const SystemParams& params);

template <typename Scalar>
struct TransferMatrix {
  Scalar omega{};
  Eigen::Matrix<std::complex<Scalar>, 6, 5> T;
  Scalar relative_residual{};  // ||M T - B|| / (||M|| ||T|| + ||B||), M = i omega I - A
};

inline constexpr double transfer_residual_tolerance = 1e-10;

// Direct LU solve with one step of iterative refinement.  Throws
// NumericalError when i omega I - A is singular or the residual check fails.
template <typename Scalar>
TransferMatrix<Scalar> transfer_at(const DriftSystem<Scalar>& d, Scalar omega) {
  using C = std::complex<Scalar>;
  using CMat6 = Eigen::Matrix<C, 6, 6>;
  using CMat65 = Eigen::Matrix<C, 6, 5>;
  CMat6 M = -d.A.template cast<C>();
  M.diagonal().array() += C(0, omega);
  const CMat65 B = d.B.template cast<C>();

  Eigen::PartialPivLU<CMat6> lu(M);
  if (!(lu.rcond() > Scalar(16) * Eigen::NumTraits<Scalar>::epsilon())) {
    throw NumericalError("transfer_at: i omega I - A is singular at omega = " +
                         std::to_string(static_cast<double>(omega)));
  }
  TransferMatrix<Scalar> out;
  out.omega = omega;
  out.T = lu.solve(B);
  out.T += lu.solve(B - M * out.T);
  out.relative_residual = (M * out.T - B).norm() / (M.norm() * out.T.norm() + B.norm());
  if (!(out.relative_residual < Scalar(transfer_residual_tolerance))) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "transfer_at: residual %.3e exceeds tolerance at omega = %.6e",
                  static_cast<double>(out.relative_residual), static_cast<double>(omega));
    throw NumericalError(buf);
  }
  return out;
}

// Coefficients of the output phase quadrature on the five input channels:
// sqrt(kappa) T[p_a, :] - e_{p_a_in}.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 1, 5> output_phase_row(const DriftSystem<Scalar>& d,
                                                          const TransferMatrix<Scalar>& t) {
  Eigen::Matrix<std::complex<Scalar>, 1, 5> row = d.sqrt_kappa() * t.T.row(state::p_a);
  row(input::p_a_in) -= Scalar(1);
  return row;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 1, 5> output_phase_from_oracle(const DriftSystem<Scalar>& d,
                                                                  Scalar omega) {
  return output_phase_row(d, transfer_at(d, omega));
}

struct TransferSweep {
  std::vector<TransferMatrix<double>> points;
  std::vector<double> skipped;  // frequencies where the solve failed
};

// Evaluates the resolvent on a grid, skipping singular points.
TransferSweep transfer_on_grid(const DriftSystem<double>& d, const std::vector<double>& omegas);

// Steady-state covariance Sigma of dX = A X dt + B dW with E[dW dW^T] = diag(v) dt,
// i.e. the solution of A Sigma + Sigma A^T + B diag(v) B^T = 0.
Eigen::Matrix<double, 6, 6> steady_state_covariance(const DriftSystem<double>& d,
                                                    const Eigen::Matrix<double, 5, 1>& variances);

void write_drift_csv(std::ostream& os, const DriftSystem<double>& d);

} // namespace cqnc
