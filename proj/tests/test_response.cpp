#include <doctest.h>

#include <random>

#include "cqnc/constants.hpp"
#include "cqnc/presets.hpp"
#include "cqnc/response.hpp"
#include "support.hpp"

using namespace cqnc;
using cqnc::testing::rel_err;
using cd = std::complex<double>;

namespace {

const double Omega = hz_to_rad(10e6), gamma_m = hz_to_rad(100.0), kappa = hz_to_rad(1e6);
const double gamma_M = hz_to_rad(200.0);

} // namespace

TEST_CASE("mechanical susceptibility") {
  CHECK(rel_err(chi_m(0.0, Omega, gamma_m), cd(1.0 / Omega, 0.0)) < 1e-15);
  CHECK(rel_err(chi_m(Omega, Omega, gamma_m), cd(0.0, -1.0 / gamma_m)) < 1e-15);
  CHECK(rel_err(std::abs(chi_m(Omega, Omega, gamma_m)), 1.0 / gamma_m) < 1e-15);
  CHECK(rel_err(chi_m(2 * Omega, Omega, gamma_m),
                cd(-5.3051647694940594e-9, -3.5367765129960396e-14)) < 1e-14);
}

TEST_CASE("cavity and magnon susceptibilities") {
  CHECK(rel_err(chi_a(0.0, kappa), cd(2.0 / kappa, 0.0)) < 1e-15);
  CHECK(rel_err(chi_a(kappa / 2, kappa), cd(1.0 / kappa, -1.0 / kappa)) < 1e-15);
  CHECK(rel_err(chi_M(0.0, gamma_M), cd(2.0 / gamma_M, 0.0)) < 1e-15);
  CHECK(rel_err(chi_M(gamma_M / 2, gamma_M), cd(1.0 / gamma_M, -1.0 / gamma_M)) < 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double w = u(rng) * kappa;
    CHECK(rel_err(std::norm(chi_a(w, kappa)), 1.0 / (w * w + kappa * kappa / 4)) < 1e-14);
    const double v = u(rng) * gamma_M;
    CHECK(rel_err(std::norm(chi_M(v, gamma_M)), 1.0 / (v * v + gamma_M * gamma_M / 4)) < 1e-14);
  }
}

TEST_CASE("xi_M limits and defining identity") {
  const double w = 0.7 * Omega;
  CHECK(rel_err(xi_M(w, gamma_M, 0.0), chi_M(w, gamma_M)) < 1e-15);
  CHECK(rel_err(xi_M(0.0, gamma_M, Omega),
                cd(1.0 / (gamma_M / 2 + 2 * Omega * Omega / gamma_M), 0.0)) < 1e-14);
  const cd lhs = xi_M(w, gamma_M, Omega) * (cd(gamma_M / 2, w) + Omega * Omega * chi_M(w, gamma_M));
  CHECK(std::abs(lhs - 1.0) < 1e-12);
}

TEST_CASE("chi_M_prime forms agree and approximate -chi_m when matched") {
  CHECK(chi_M_prime(0.3 * Omega, gamma_M, 0.0) == cd(0.0, 0.0));
  const cd at_res = chi_M_prime(Omega, gamma_m, Omega);
  CHECK(rel_err(at_res, -chi_m(Omega, Omega, gamma_m)) < 1e-5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double w = u(rng) * Omega;
    CHECK(rel_err(chi_M_prime(w, gamma_M, Omega), chi_M_prime_single_fraction(w, gamma_M, Omega)) <
          1e-12);
  }
}

TEST_CASE("lambda branches") {
  const double w = 0.4 * kappa;
  CHECK(rel_err(lambda_pm(w, kappa, 0.0, Branch::plus), chi_a(w, kappa)) < 1e-15);
  CHECK(rel_err(lambda_pm(w, kappa, 0.0, Branch::minus), chi_a(w, kappa)) < 1e-15);
  const double gain = 0.3 * kappa;
  CHECK(rel_err(lambda_pm(0.0, kappa, gain, Branch::minus), cd(1.0 / (kappa / 2 + 2 * gain), 0.0)) <
        1e-15);
  CHECK(rel_err(lambda_pm(Omega, kappa, gain, Branch::plus),
                cd(-1.5913902918897644e-10, -1.5913902918897644e-8)) < 1e-13);
  CHECK_FALSE(lambda_pm_checked(0.0, kappa, 0.25 * kappa, Branch::plus).has_value());
  CHECK(std::isinf(std::abs(lambda_pm(0.0, kappa, 0.25 * kappa, Branch::plus))));
  CHECK(lambda_pm_checked(1.0, kappa, 0.25 * kappa, Branch::plus).has_value());
}

TEST_CASE("all responses are conjugate symmetric and satisfy their defining identities") {
  SystemParams p(presets::table1());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const ResponseLabel labels[] = {ResponseLabel::chi_m,       ResponseLabel::chi_a,
                                  ResponseLabel::chi_M,       ResponseLabel::xi_M,
                                  ResponseLabel::chi_M_prime, ResponseLabel::lambda_plus,
                                  ResponseLabel::lambda_minus};
  for (auto label : labels) {
    const auto f = make_response(label, p);
    CHECK(response_label_from_string(to_string(label)) == label);
    for (int i = 0; i < 1000; ++i) {
      const double w = u(rng) * p.Omega();
      CHECK(rel_err(f(-w), std::conj(f(w))) < 1e-12);
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double w = u(rng) * p.Omega();
    CHECK(std::abs(chi_m(w, p) * cd(p.Omega() * p.Omega() - w * w, p.gamma_m() * w) / p.Omega() -
                   1.0) < 1e-12);
    CHECK(std::abs(xi_M(w, p) * (cd(p.gamma_M() / 2, w) + p.Delta_M() * p.Delta_M() * chi_M(w, p)) -
                   1.0) < 1e-12);
    CHECK(std::abs(lambda_plus(w, p) * cd(p.kappa() / 2 - 2 * p.gain(), w) - 1.0) < 1e-12);
    CHECK(std::abs(lambda_minus(w, p) * cd(p.kappa() / 2 + 2 * p.gain(), w) - 1.0) < 1e-12);
  }
}

TEST_CASE("mechanical peak location on a dense grid") {
  const double W = 1.0, g = 0.3;
  const double peak = W * std::sqrt(1.0 - g * g / (2 * W * W));
  const int n = 200001;
  const double lo = 0.5, hi = 1.5, step = (hi - lo) / (n - 1);
  double best = 0.0, best_w = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = lo + i * step;
    const double a = std::abs(chi_m(w, W, g));
    if (a > best) {
      best = a;
      best_w = w;
    }
  }
  CHECK(std::abs(best_w - peak) <= 0.5 * step);
}

TEST_CASE("grid evaluation equals pointwise evaluation") {
  SystemParams p(presets::table1());
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(257, 0.1 * p.Omega(), 3 * p.Omega());
  const auto f = make_response(ResponseLabel::chi_M_prime, p);
  const Eigen::VectorXcd values = evaluate_on_grid(grid, f);
  for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(values[i] == f(grid[i]));
  CHECK_THROWS(response_label_from_string("chi_q"));
}
