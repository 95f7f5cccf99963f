#include <doctest.h>

#include "cqnc/analysis.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/presets.hpp"
#include "support.hpp"

using namespace cqnc;
using cqnc::testing::rel_err;

TEST_CASE("matching the table set") {
  SystemParams p(presets::table1());
  const auto report = match_cqnc(p);
  CHECK(report.status == MatchStatus::ok);
  CHECK(report.residual_curve < 1e-9);
  CHECK(report.seed_residual < 1e-5);
  CHECK(rel_err(report.seed_residual_at_Omega, p.gamma_m() / (4 * p.Omega())) < 1e-3);
  CHECK(std::abs(report.wrong_sign_residual - 2.0) < 1e-3);
  CHECK(report.detuning_sign == 1.0);
  CHECK(std::abs(report.gamma_M_shift) <= match_box);
  CHECK(std::abs(report.Delta_M_shift) <= match_box);
  CHECK(std::abs(report.coupling_shift) <= match_box);
  CHECK(report.residual_curve <= report.seed_residual);
  CHECK(rel_err(max_match_residual(report.matched_params, report.window), report.residual_curve) < 1e-12);
}

TEST_CASE("matching is idempotent") {
  SystemParams p(presets::table1());
  const auto first = match_cqnc(p);
  const auto second = match_cqnc(first.matched_params);
  CHECK(second.residual_curve <= first.residual_curve * (1 + 1e-6) + 1e-15);
  CHECK(rel_err(second.matched_params.gamma_M(), first.matched_params.gamma_M()) < 1e-6);
  CHECK(rel_err(second.matched_params.Delta_M(), first.matched_params.Delta_M()) < 1e-6);
  CHECK(rel_err(second.matched_params.magnon_coupling(), first.matched_params.magnon_coupling()) < 1e-6);
}

TEST_CASE("matching other operating points") {
  for (const SystemParams& p : {SystemParams(presets::fig2()), SystemParams(presets::table1_stable())}) {
    const auto report = match_cqnc(p);
    CHECK(report.residual_curve < match_warning_threshold);
    CHECK(report.status == MatchStatus::ok);
  }
  ParamSet eff = presets::table1();
  eff.couplings.convention = CouplingConvention::effective;
  const auto report = match_cqnc(SystemParams(eff));
  CHECK(report.residual_curve < match_warning_threshold);
  CHECK(rel_err(report.matched_params.magnon_coupling(), report.matched_params.g()) < 0.1);
}

TEST_CASE("matching residual definition") {
  SystemParams p(presets::table1());
  SystemParams off = p.modified([](ParamSet& s) { s.couplings.G_OM = 0.0; });
  CHECK(rel_err(match_residual(off, p.Omega()), 1.0) < 1e-15);
  SystemParams dark = p.modified([](ParamSet& s) { s.drive.power = 0.0; });
  CHECK_THROWS_AS(match_cqnc(dark), ParameterError);
  CHECK_THROWS_AS(match_cqnc(p, FrequencyWindow{2.0, 1.0}), ParameterError);
}

TEST_CASE("variant parsing") {
  CHECK(parse_variant("sql").kind == VariantKind::sql);
  CHECK(!parse_variant("opa_hybrid").value);
  CHECK(*parse_variant("opa_hybrid:0.3").value == 0.3);
  CHECK(*parse_variant("gamma_mismatch:0.3").value == 0.3);
  CHECK(parse_variant("coupling_mismatch:0.01").name() == "coupling_mismatch:0.01");
  CHECK_THROWS_WITH_AS(parse_variant("bogus"), doctest::Contains("cqnc_floor"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_variant("gamma_mismatch"), doctest::Contains("requires a value"),
                       ParameterError);
  CHECK_THROWS_AS(parse_variant("sql:1"), ParameterError);
  CHECK_THROWS_AS(parse_variant("gamma_mismatch:abc"), ParameterError);
  CHECK_THROWS_AS(parse_variants({}), ParameterError);
  for (const char* name : {"standard", "opa_hybrid", "cqnc", "cqnc_floor", "sql", "gamma_mismatch",
                           "coupling_mismatch", "hybrid_total"}) {
    CHECK(valid_variant_names().find(name) != std::string::npos);
  }
}

TEST_CASE("frequency sweep channels") {
  SystemParams p(presets::table1());
  const auto omegas = log_grid(0.5 * p.Omega(), 2.0 * p.Omega(), 9);
  const auto variants = parse_variants({"sql", "cqnc_floor", "cqnc", "standard", "coupling_mismatch:0.01"});
  const auto series = frequency_sweep(p, omegas, variants);
  REQUIRE(series.channels.size() == variants.size());
  const auto matched = match_cqnc(p).matched_params;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double w = omegas[i];
    CHECK(series.channel("sql")[i] == s_sql(p, w));
    CHECK(series.channel("cqnc_floor")[i] == s_cqnc_floor(p, w));
    CHECK(series.channel("cqnc")[i] == s_add_printed(matched, w).total_excluding_thermal());
    CHECK(series.channel("standard")[i] == s_standard(p, w).total_excluding_thermal());
    CHECK(series.channel("coupling_mismatch:0.01")[i] == evaluate_variant(p, variants[4], w));
  }
}

TEST_CASE("opa hybrid variant removes the magnon") {
  SystemParams p(presets::table1_stable());
  const double w = 0.7 * p.Omega();
  SystemParams bare = p.modified([](ParamSet& s) {
    s.couplings.G_OM = 0.0;
    s.opa.gain = 0.3 * s.cavity.kappa;
  });
  CHECK(rel_err(evaluate_variant(p, parse_variant("opa_hybrid:0.3"), w),
                s_add(bare, w).total_excluding_thermal()) < 1e-14);
  CHECK(rel_err(evaluate_variant(p, parse_variant("hybrid_total"), w),
                s_add(p, w).total_excluding_thermal()) < 1e-14);
}

TEST_CASE("power sweep of the standard sensor") {
  SystemParams p(presets::table1());
  const auto powers = log_grid(1e-15, 1e-6, 91);
  const auto r = power_sweep(p, powers, p.Omega(), parse_variant("standard"));
  CHECK(r.axis == "power_w");
  CHECK(r.interior);
  CHECK(r.refined);
  CHECK(r.min_value <= r.spectra_at[r.grid_argmin]);
  CHECK(rel_err(r.min_value, std::sqrt(2.0)) < 1e-6);
  CHECK(r.argmin > powers[r.grid_argmin - 1]);
  CHECK(r.argmin < powers[r.grid_argmin + 1]);
  SystemParams at = p.modified([&](ParamSet& s) { s.drive.power = r.argmin; });
  CHECK(rel_err(at.g(), std::pow(2.0, -0.25) * g_sql(p, p.Omega())) < 1e-3);
}

TEST_CASE("larger OPA gain moves the optimum to lower power") {
  SystemParams p(presets::table1());
  const auto powers = log_grid(1e-9, 1e-1, 81);
  const auto low = power_sweep(p, powers, p.Omega(), parse_variant("opa_hybrid:0.1"));
  const auto high = power_sweep(p, powers, p.Omega(), parse_variant("opa_hybrid:0.3"));
  REQUIRE(low.interior);
  REQUIRE(high.interior);
  CHECK(high.argmin < low.argmin);
  // The optimum power scales as 1 / |lambda_+(Omega)|^2.
  const double k = p.kappa(), W = p.Omega();
  const double ratio = (0.01 * k * k + W * W) / (0.09 * k * k + W * W);
  CHECK(rel_err(high.argmin / low.argmin, ratio) < 1e-5);
  CHECK(rel_err(low.min_value, 0.5) < 1e-8);
  CHECK(rel_err(high.min_value, 0.5) < 1e-8);
}

TEST_CASE("power sweep input checks") {
  SystemParams p(presets::table1());
  const auto v = parse_variant("standard");
  CHECK_THROWS_AS(power_sweep(p, {}, p.Omega(), v), ParameterError);
  CHECK_THROWS_AS(power_sweep(p, {1e-6, 1e-7}, p.Omega(), v), ParameterError);
  CHECK_THROWS_AS(power_sweep(p, {0.0, 1e-7}, p.Omega(), v), ParameterError);
  const auto edge = power_sweep(p, {1e-3, 1e-2}, p.Omega(), v);
  CHECK(!edge.interior);
  CHECK(!edge.refined);
  CHECK(edge.argmin == 1e-3);
}
