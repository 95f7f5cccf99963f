#include <doctest.h>

#include <sstream>

#include "cqnc/config.hpp"
#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/presets.hpp"
#include "cqnc/series_io.hpp"
#include "support.hpp"

using namespace cqnc;
using cqnc::testing::rel_err;

namespace {

ParamSet parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* minimal = R"([mechanical]
omega_m_hz = 1e7
gamma_m_hz = 100
[cavity]
kappa_hz = 1e6
lambda_L_nm = 1064
[magnon]
gamma_M_hz = 200
[couplings]
g0_hz = 10
[drive]
power_w = 1e-6
)";

void check_same(const ParamSet& a, const ParamSet& b) {
  CHECK(rel_err(a.mechanical.omega_m, b.mechanical.omega_m) < 1e-15);
  CHECK(rel_err(a.mechanical.gamma_m, b.mechanical.gamma_m) < 1e-15);
  CHECK(a.mechanical.temperature == b.mechanical.temperature);
  CHECK(a.mechanical.mass == b.mechanical.mass);
  CHECK(rel_err(a.cavity.kappa, b.cavity.kappa) < 1e-15);
  CHECK(rel_err(a.cavity.wavelength_L, b.cavity.wavelength_L) < 1e-15);
  CHECK(rel_err(a.magnon.gamma_M, b.magnon.gamma_M) < 1e-15);
  CHECK(rel_err(a.magnon.detuning_M, b.magnon.detuning_M) < 1e-15);
  CHECK(std::abs(a.opa.gain - b.opa.gain) <= 1e-15 * a.cavity.kappa);
  CHECK(rel_err(a.couplings.g0, b.couplings.g0) < 1e-15);
  CHECK(std::abs(a.couplings.G_OM - b.couplings.G_OM) <= 1e-15 * a.couplings.g0);
  CHECK(a.couplings.convention == b.couplings.convention);
  CHECK(a.drive.power == b.drive.power);
  CHECK(a.drive.mean_field == b.drive.mean_field);
}

} // namespace

TEST_CASE("config units and defaults") {
  const ParamSet p = parse(minimal);
  CHECK(p.mechanical.omega_m == two_pi * 1e7);
  CHECK(p.cavity.wavelength_L == 1064e-9);
  CHECK(p.magnon.detuning_M == p.mechanical.omega_m);
  CHECK(p.opa.gain == 0.0);
  CHECK(p.mechanical.temperature == 0.0);
  CHECK(!p.mechanical.mass);
  CHECK(p.couplings.convention == CouplingConvention::effective);
  CHECK(p.drive.mean_field == MeanFieldModel::passive);
}

TEST_CASE("config round trip") {
  for (ParamSet p : {presets::table1(), presets::fig2(), presets::table1_stable()}) {
    p.mechanical.mass = 1e-12;
    p.mechanical.temperature = 4.2;
    std::ostringstream os;
    write_config(os, p);
    check_same(parse(os.str()), p);
  }
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_WITH_AS(parse(std::string(minimal) + "[drive2]\nx = 1\n"),
                       doctest::Contains("unknown config section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(std::string(minimal) + "[opa]\ngain = 1\n"),
                       doctest::Contains("opa.gain"), ConfigError);
  std::string missing = minimal;
  missing.replace(missing.find("kappa_hz"), 8, "kappa_xx");
  CHECK_THROWS_AS(parse(missing), ConfigError);
  std::string bad = minimal;
  bad.replace(bad.find("= 100"), 5, "= 1oo");
  CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("invalid number"), ConfigError);
  CHECK_THROWS_AS(parse(std::string(minimal) + "[opa]\ntheta = 0\n[couplings]\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
}

TEST_CASE("shipped configs equal the presets") {
  const std::string dir = CQNC_CONFIG_DIR;
  check_same(load_config(dir + "/table1.ini"), presets::table1());
  check_same(load_config(dir + "/stable_g01.ini"), presets::table1_stable());
  check_same(load_config(dir + "/fig2.ini"), presets::fig2());
}

TEST_CASE("parameter json lists derived values") {
  const auto j = params_to_json(SystemParams(presets::table1()));
  CHECK(rel_err(j["derived_rad_s"]["g"].get<double>(), 164084.4310872926) < 1e-12);
  CHECK(j["couplings"]["cqnc_coupling"] == "G_OM");
}

TEST_CASE("csv and json round trip") {
  SpectrumSeries s;
  s.omegas = {1.0 / 3.0, 2.0, 1e7 * std::acos(-1.0)};
  s.add_channel("a", {0.1, 1e-300, 7.0 / 9.0});
  s.add_channel("b", {3.0, 4.0, 5.0});
  std::stringstream ss;
  write_csv(ss, s);
  const auto back = read_csv(ss);
  CHECK(back.omegas == s.omegas);
  CHECK(back.channel("a") == s.channel("a"));
  CHECK(back.channel("b") == s.channel("b"));
  const auto j = to_json(s, 2.0);
  const auto from_json = series_from_json(j);
  CHECK(from_json.omegas == s.omegas);
  CHECK(from_json.channel("a") == s.channel("a"));
  CHECK(j.contains("omega_over_Omega"));
}
