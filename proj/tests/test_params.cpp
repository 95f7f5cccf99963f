#include <doctest.h>

#include <cmath>

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/params.hpp"
#include "cqnc/presets.hpp"
#include "support.hpp"

using namespace cqnc;
using cqnc::testing::rel_err;

TEST_CASE("drive amplitude follows the square-root power law") {
  const double kappa = hz_to_rad(1e6), omega_L = hz_to_rad(384e12);
  CHECK(drive_amplitude(0.0, omega_L, kappa) == 0.0);
  const double e1 = drive_amplitude(0.05, omega_L, kappa);
  CHECK(rel_err(drive_amplitude(0.1, omega_L, kappa), std::sqrt(2.0) * e1) < 1e-14);
  CHECK(rel_err(drive_amplitude(0.1, omega_L, kappa), 1571434586104.5493) < 1e-12);
  CHECK_THROWS_AS(drive_amplitude(1.0, 0.0, kappa), ParameterError);
  CHECK_THROWS_AS(drive_amplitude(1.0, omega_L, -1.0), ParameterError);
}

TEST_CASE("intracavity amplitude on resonance") {
  const double kappa = 3.0;
  CHECK(intracavity_amplitude(kappa, kappa, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(intracavity_amplitude(0.0, kappa, 0.0, 0.0) == 0.0);
  CHECK(intracavity_amplitude(kappa, kappa, 0.1 * kappa, 0.0) ==
        doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(intracavity_amplitude(kappa, kappa, 0.25 * kappa, 0.0), NumericalError);
  CHECK_THROWS_AS(intracavity_amplitude(kappa, kappa, 0.3 * kappa, 0.0), NumericalError);
}

TEST_CASE("intracavity amplitude is the fixed point of the mean-field equation") {
  // d alpha/dt = (i Delta - kappa/2) alpha + 2 G conj(alpha) + E
  const double kappa = 2.0, gain = 0.1, E = 1.7, Delta = 0.4;
  const double x = kappa / 2 - 2 * gain, y = kappa / 2 + 2 * gain;
  // Real system: [-x, -Delta; Delta, -y] [re; im] = -[E; 0]
  Eigen::Matrix2d M;
  M << -x, -Delta, Delta, -y;
  const Eigen::Vector2d fixed = M.lu().solve(Eigen::Vector2d(-E, 0));
  CHECK(rel_err(intracavity_amplitude(E, kappa, gain, Delta), fixed.norm()) < 1e-14);
}

TEST_CASE("effective couplings") {
  ParamSet p = presets::table1();
  p.drive.alpha = 100.0;
  SystemParams s(p);
  CHECK(rel_err(s.g(), 8885.7658763167325) < 1e-14);
  CHECK(s.g() / s.derived().alpha == std::sqrt(2.0) * s.couplings().g0);

  p.drive.alpha = 0.0;
  CHECK(SystemParams(p).g() == 0.0);

  ParamSet m = presets::table1();
  m.couplings.convention = CouplingConvention::effective;
  m.couplings.alpha_M = 37.0;
  SystemParams sm(m);
  CHECK(sm.derived().G_OM_eff / sm.derived().alpha_M == std::sqrt(2.0) * sm.couplings().G_OM);
  CHECK(sm.magnon_coupling() == sm.derived().G_OM_eff);

  SystemParams matched = sm.modified([&](ParamSet& q) {
    q.couplings.alpha_M.reset();
    q.couplings.G_OM_eff = sm.g();
  });
  CHECK(matched.derived().G_OM_eff - matched.g() == 0.0);
}

TEST_CASE("table parameters at one microwatt") {
  SystemParams s(presets::table1());
  CHECK(rel_err(s.derived().E_L, 5801260695.4480674) < 1e-12);
  CHECK(rel_err(s.derived().alpha, 1846.5986316905726) < 1e-12);
  CHECK(rel_err(s.g(), 164084.4310872926) < 1e-12);
  CHECK(s.magnon_coupling() == s.couplings().G_OM);
}

TEST_CASE("derived state is recomputed after edits") {
  SystemParams a(presets::table1());
  SystemParams b = a.modified([](ParamSet& p) { p.drive.power *= 4.0; });
  CHECK(rel_err(b.g(), 2.0 * a.g()) < 1e-14);
  CHECK(b.g() / b.derived().alpha == std::sqrt(2.0) * b.couplings().g0);
}

TEST_CASE("invalid parameters are rejected") {
  auto bad = [](auto edit) {
    ParamSet p = presets::table1();
    edit(p);
    return p;
  };
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.mechanical.omega_m = 0; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.mechanical.gamma_m = -1; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.cavity.kappa = 0; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.magnon.gamma_M = 0; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.opa.phase = 0.5; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.opa.gain = -1; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) { p.mechanical.mass = 0.0; })), ParameterError);
  CHECK_THROWS_AS(SystemParams(bad([](ParamSet& p) {
                    p.couplings.alpha_M = 1.0;
                    p.couplings.G_OM_eff = 1.0;
                  })),
                  ParameterError);
}

TEST_CASE("opa-enhanced mean field refuses the above-threshold gain") {
  ParamSet p = presets::table1();
  p.drive.mean_field = MeanFieldModel::opa_enhanced;
  CHECK_THROWS_AS(SystemParams{p}, NumericalError);
  p.opa.gain = 0.1 * p.cavity.kappa;
  SystemParams s(p);
  SystemParams passive(presets::table1_stable());
  CHECK(rel_err(s.derived().alpha, passive.derived().alpha * (0.5 / 0.3)) < 1e-13);
}

TEST_CASE("stability report") {
  ParamSet p0 = presets::table1();
  p0.opa.gain = 0.0;
  SystemParams bare(p0);
  const auto r0 = stability_check(bare);
  CHECK(r0.stable);
  CHECK(r0.amplitude_quadrature_stable);

  const auto r3 = stability_check(SystemParams(presets::table1()));
  CHECK_FALSE(r3.stable);
  CHECK_FALSE(r3.amplitude_quadrature_stable);
  CHECK(rel_err(r3.amplitude_quadrature_damping, -0.1 * presets::table1().cavity.kappa) < 1e-12);
  CHECK(r3.eigenvalues.real().maxCoeff() > 0);

  ParamSet p2 = presets::table1();
  p2.opa.gain = 0.2 * p2.cavity.kappa;
  const auto r2 = stability_check(SystemParams(p2));
  CHECK(rel_err(r2.amplitude_quadrature_damping, 0.1 * p2.cavity.kappa) < 1e-12);
  CHECK(r2.stable == (r2.eigenvalues.real().array() < 0).all());
}

TEST_CASE("stability is monotone in the OPA gain") {
  ParamSet p = presets::table1();
  bool previous = true;
  for (double r = 0.0; r <= 0.4; r += 0.01) {
    p.opa.gain = r * p.cavity.kappa;
    const bool stable = stability_check(SystemParams(p)).amplitude_quadrature_stable;
    if (!previous) CHECK_FALSE(stable);
    previous = stable;
  }
}
