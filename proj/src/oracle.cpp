#include "cqnc/oracle.hpp"

#include <iomanip>

#include <Eigen/Eigenvalues>

namespace cqnc {

DriftCoefficients<double> drift_coefficients(const SystemParams& p) {
  return {p.Omega(), p.gamma_m(), p.kappa(), p.gain(), p.gamma_M(), p.Delta_M(),
          p.g(),     p.magnon_coupling()};
}

DriftSystem<double> build_drift(const SystemParams& params) {
  return build_drift(drift_coefficients(params));
}

TransferSweep transfer_on_grid(const DriftSystem<double>& d, const std::vector<double>& omegas) {
  TransferSweep sweep;
  sweep.points.reserve(omegas.size());
  for (double w : omegas) {
    try {
      sweep.points.push_back(transfer_at(d, w));
    } catch (const NumericalError&) {
      sweep.skipped.push_back(w);
    }
  }
  return sweep;
}

Eigen::Matrix<double, 6, 6> steady_state_covariance(const DriftSystem<double>& d,
                                                    const Eigen::Matrix<double, 5, 1>& variances) {
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Mat36 = Eigen::Matrix<double, 36, 36>;
  const Mat6 D = d.B * variances.asDiagonal() * d.B.transpose();
  const Mat6 I = Mat6::Identity();
  // vec(A S + S A^T) = (I kron A + A kron I) vec(S), column-major vec.
  Mat36 K = Mat36::Zero();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      K.block<6, 6>(6 * i, 6 * j) += I(i, j) * d.A + d.A(i, j) * I;
    }
  }
  const Eigen::Map<const Eigen::Matrix<double, 36, 1>> rhs(D.data());
  Eigen::FullPivLU<Mat36> lu(K);
  if (!lu.isInvertible()) throw NumericalError("steady_state_covariance: singular Lyapunov system");
  const Eigen::Matrix<double, 36, 1> s = lu.solve(-rhs);
  Mat6 S = Eigen::Map<const Mat6>(s.data());
  return 0.5 * (S + S.transpose());
}

void write_drift_csv(std::ostream& os, const DriftSystem<double>& d) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  os << "matrix,row";
  for (auto c : state::labels) os << ',' << c;
  os << '\n';
  for (int r = 0; r < 6; ++r) {
    os << "A," << state::labels[r];
    for (int c = 0; c < 6; ++c) os << ',' << d.A(r, c);
    os << '\n';
  }
  os << "matrix,row";
  for (auto c : input::labels) os << ',' << c;
  os << '\n';
  for (int r = 0; r < 6; ++r) {
    os << "B," << state::labels[r];
    for (int c = 0; c < 5; ++c) os << ',' << d.B(r, c);
    os << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

StabilityReport stability_check(const SystemParams& params) {
  const auto d = build_drift(params);
  StabilityReport r;
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(d.A, false);
  r.eigenvalues = es.eigenvalues();
  r.stable = (r.eigenvalues.real().array() < 0.0).all();
  r.amplitude_quadrature_damping = 0.5 * params.kappa() - 2.0 * params.gain();
  r.amplitude_quadrature_stable = r.amplitude_quadrature_damping > 0;
  return r;
}

} // namespace cqnc
