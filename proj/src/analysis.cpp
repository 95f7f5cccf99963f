#include "cqnc/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <boost/math/tools/minima.hpp>

#include "cqnc/errors.hpp"
#include "cqnc/response.hpp"

namespace cqnc {

namespace {

using cd = std::complex<double>;

SystemParams with_matching(const SystemParams& params, double gamma_M, double Delta_M,
                           double coupling) {
  return params.modified([&](ParamSet& p) {
    p.magnon.gamma_M = gamma_M;
    p.magnon.detuning_M = Delta_M;
    if (p.couplings.convention == CouplingConvention::bare) {
      p.couplings.G_OM = coupling;
    } else {
      p.couplings.alpha_M.reset();
      p.couplings.G_OM_eff = coupling;
    }
  });
}

// 1 + (G^2 / g^2) chi'_M / chi_m; its modulus is the normalized residual.
cd residual(double omega, double Omega, double gamma_m, double g, double gamma_M, double Delta_M,
            double G) {
  return 1.0 + (G * G) / (g * g) * chi_M_prime(omega, gamma_M, Delta_M) /
                   chi_m(omega, Omega, gamma_m);
}

} // namespace

FrequencyWindow default_window(const SystemParams& params) {
  return {0.5 * params.Omega(), 2.0 * params.Omega()};
}

double match_residual(const SystemParams& params, double omega) {
  const double g = params.g();
  if (!(g > 0)) throw ParameterError("no transduction: g = 0");
  return std::abs(residual(omega, params.Omega(), params.gamma_m(), g, params.gamma_M(),
                           params.Delta_M(), params.magnon_coupling()));
}

double max_match_residual(const SystemParams& params, const FrequencyWindow& window,
                          std::size_t points) {
  double worst = 0.0;
  for (double w : log_grid(window.lo, window.hi, points)) {
    worst = std::max(worst, match_residual(params, w));
  }
  return worst;
}

MatchReport match_cqnc(const SystemParams& params, const FrequencyWindow& window) {
  if (!(params.g() > 0)) throw ParameterError("match_cqnc: no transduction (g = 0)");
  if (!(window.lo > 0) || !(window.hi > window.lo)) {
    throw ParameterError("match_cqnc: window must satisfy 0 < lo < hi");
  }
  const double Omega = params.Omega(), gamma_m = params.gamma_m(), g = params.g();
  const std::array<double, 3> seed{gamma_m, Omega, g};
  const auto fit_grid = log_grid(window.lo, window.hi, 401);
  const auto n = static_cast<Eigen::Index>(fit_grid.size());

  auto values = [&](const Eigen::Vector3d& x) {
    return std::array<double, 3>{seed[0] * (1 + x[0]), seed[1] * (1 + x[1]), seed[2] * (1 + x[2])};
  };
  auto residual_vector = [&](const Eigen::Vector3d& x) {
    const auto v = values(x);
    Eigen::VectorXd r(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const cd z = residual(fit_grid[k], Omega, gamma_m, g, v[0], v[1], v[2]);
      r[2 * k] = z.real();
      r[2 * k + 1] = z.imag();
    }
    return r;
  };
  auto jacobian = [&](const Eigen::Vector3d& x) {
    const auto v = values(x);
    Eigen::MatrixXd J(2 * n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double w = fit_grid[k];
      const cd s(v[0] / 2, w);
      const cd den = s * s + v[1] * v[1];
      const cd cmp = -v[1] / den;
      const cd scale = (v[2] * v[2]) / (g * g) / chi_m(w, Omega, gamma_m);
      const cd d_gamma = scale * (v[1] * s / (den * den)) * seed[0];
      const cd d_Delta = scale * ((v[1] * v[1] - s * s) / (den * den)) * seed[1];
      const cd d_G = 2.0 * cmp / (v[2] * v[2]) * scale * v[2] * seed[2];
      J(2 * k, 0) = d_gamma.real();
      J(2 * k + 1, 0) = d_gamma.imag();
      J(2 * k, 1) = d_Delta.real();
      J(2 * k + 1, 1) = d_Delta.imag();
      J(2 * k, 2) = d_G.real();
      J(2 * k + 1, 2) = d_G.imag();
    }
    return J;
  };

  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::VectorXd r = residual_vector(x);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  int iterations = 0;
  bool converged = false;
  while (!converged && iterations < 100 && cost > 0.0) {
    ++iterations;
    const Eigen::MatrixXd J = jacobian(x);
    const Eigen::Matrix3d JtJ = J.transpose() * J;
    const Eigen::Vector3d Jtr = J.transpose() * r;
    bool accepted = false;
    while (mu < 1e12) {
      Eigen::Matrix3d H = JtJ;
      H.diagonal() *= (1.0 + mu);
      const Eigen::Vector3d step = H.ldlt().solve(-Jtr);
      const Eigen::Vector3d candidate = (x + step).cwiseMax(-match_box).cwiseMin(match_box);
      const Eigen::VectorXd r_new = residual_vector(candidate);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double change = (candidate - x).cwiseAbs().maxCoeff();
        x = candidate;
        r = r_new;
        cost = cost_new;
        mu = std::max(mu / 10.0, 1e-12);
        accepted = true;
        converged = change < 1e-15;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }

  const auto v = values(x);
  MatchReport report{with_matching(params, v[0], v[1], v[2]), window};
  const SystemParams seeded = with_matching(params, seed[0], seed[1], seed[2]);
  report.residual_curve = max_match_residual(report.matched_params, window);
  report.seed_residual = max_match_residual(seeded, window);
  report.seed_residual_at_Omega = match_residual(seeded, Omega);
  report.wrong_sign_residual =
      match_residual(with_matching(params, seed[0], -seed[1], seed[2]), Omega);
  report.detuning_sign = v[1] > 0 ? 1.0 : -1.0;
  report.gamma_M_shift = x[0];
  report.Delta_M_shift = x[1];
  report.coupling_shift = x[2];
  report.iterations = iterations;
  report.status =
      report.residual_curve > match_warning_threshold ? MatchStatus::warning : MatchStatus::ok;
  return report;
}

MatchReport match_cqnc(const SystemParams& params) {
  return match_cqnc(params, default_window(params));
}

namespace {

struct VariantInfo {
  VariantKind kind;
  std::string_view name;
  bool takes_value;
  bool requires_value;
};

constexpr std::array<VariantInfo, 8> variant_table{{
    {VariantKind::standard, "standard", false, false},
    {VariantKind::opa_hybrid, "opa_hybrid", true, false},
    {VariantKind::cqnc, "cqnc", false, false},
    {VariantKind::cqnc_floor, "cqnc_floor", false, false},
    {VariantKind::sql, "sql", false, false},
    {VariantKind::gamma_mismatch, "gamma_mismatch", true, true},
    {VariantKind::coupling_mismatch, "coupling_mismatch", true, true},
    {VariantKind::hybrid_total, "hybrid_total", false, false},
}};

const VariantInfo& info(VariantKind kind) {
  for (const auto& i : variant_table) {
    if (i.kind == kind) return i;
  }
  throw ParameterError("unknown variant kind");
}

bool needs_match(VariantKind kind) {
  return kind == VariantKind::cqnc || kind == VariantKind::gamma_mismatch ||
         kind == VariantKind::coupling_mismatch;
}

SystemParams opa_hybrid_params(const SystemParams& params, std::optional<double> gain_over_kappa) {
  return params.modified([&](ParamSet& p) {
    if (gain_over_kappa) p.opa.gain = *gain_over_kappa * p.cavity.kappa;
    p.couplings.G_OM = 0.0;
    p.couplings.alpha_M.reset();
    p.couplings.G_OM_eff.reset();
  });
}

double evaluate_prepared(const SystemParams& params, const Variant& v, double omega) {
  switch (v.kind) {
    case VariantKind::standard: return s_standard(params, omega).total_excluding_thermal();
    case VariantKind::opa_hybrid: return s_add(params, omega).total_excluding_thermal();
    case VariantKind::cqnc: return s_add_printed(params, omega).total_excluding_thermal();
    case VariantKind::cqnc_floor: return s_cqnc_floor(params, omega);
    case VariantKind::sql: return s_sql(params, omega);
    case VariantKind::gamma_mismatch: return s_cqnc_gamma_mismatch(params, *v.value, omega);
    case VariantKind::coupling_mismatch: return s_cqnc_coupling_mismatch(params, *v.value, omega);
    case VariantKind::hybrid_total: return s_add(params, omega).total_excluding_thermal();
  }
  throw ParameterError("unknown variant");
}

SystemParams prepare(const SystemParams& params, const Variant& v,
                     const std::optional<FrequencyWindow>& window) {
  if (v.kind == VariantKind::opa_hybrid) return opa_hybrid_params(params, v.value);
  if (needs_match(v.kind)) {
    return match_cqnc(params, window.value_or(default_window(params))).matched_params;
  }
  return params;
}

} // namespace

std::string Variant::name() const {
  std::string out(info(kind).name);
  if (value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *value);
    out += ':';
    out += buf;
  }
  return out;
}

std::string valid_variant_names() {
  std::string out;
  for (const auto& i : variant_table) {
    if (!out.empty()) out += ", ";
    out += i.name;
    if (i.requires_value) {
      out += ":<value>";
    } else if (i.takes_value) {
      out += "[:<gain/kappa>]";
    }
  }
  return out;
}

Variant parse_variant(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  for (const auto& i : variant_table) {
    if (i.name != name) continue;
    Variant v{i.kind, std::nullopt};
    if (colon != std::string_view::npos) {
      if (!i.takes_value) throw ParameterError("variant " + std::string(name) + " takes no value");
      const std::string value(text.substr(colon + 1));
      try {
        std::size_t used = 0;
        v.value = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::logic_error&) {
        throw ParameterError("invalid value for variant " + std::string(name) + ": " + value);
      }
    } else if (i.requires_value) {
      throw ParameterError("variant " + std::string(name) + " requires a value (" +
                           std::string(name) + ":<value>)");
    }
    return v;
  }
  throw ParameterError("unknown variant '" + std::string(text) +
                       "'; valid variants: " + valid_variant_names());
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  if (names.empty()) throw ParameterError("no variants given; valid variants: " + valid_variant_names());
  std::vector<Variant> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(parse_variant(n));
  return out;
}

SpectrumSeries frequency_sweep(const SystemParams& params, const std::vector<double>& omegas,
                               const std::vector<Variant>& variants,
                               std::optional<FrequencyWindow> window) {
  if (variants.empty()) throw ParameterError("no variants given; valid variants: " + valid_variant_names());
  SpectrumSeries series;
  series.omegas = omegas;
  series.validate();
  std::optional<SystemParams> matched;
  for (const auto& v : variants) {
    SystemParams prepared = params;
    if (needs_match(v.kind)) {
      if (!matched) matched = prepare(params, v, window);
      prepared = *matched;
    } else {
      prepared = prepare(params, v, window);
    }
    std::vector<double> values(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) values[i] = evaluate_prepared(prepared, v, omegas[i]);
    series.add_channel(v.name(), std::move(values));
  }
  return series;
}

double evaluate_variant(const SystemParams& params, const Variant& variant, double omega) {
  return evaluate_prepared(prepare(params, variant, std::nullopt), variant, omega);
}

SweepResult power_sweep(const SystemParams& params, const std::vector<double>& powers,
                        double omega, const Variant& variant) {
  if (powers.empty()) throw ParameterError("power_sweep: empty power list");
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (!(powers[i] > 0)) throw ParameterError("power_sweep: powers must be positive");
    if (i > 0 && !(powers[i] > powers[i - 1])) {
      throw ParameterError("power_sweep: powers must be strictly increasing");
    }
  }
  auto at_power = [&](double P) {
    const SystemParams p = params.modified([&](ParamSet& s) {
      s.drive.power = P;
      s.drive.alpha.reset();
    });
    return evaluate_variant(p, variant, omega);
  };

  SweepResult r;
  r.axis = "power_w";
  r.channel = variant.name();
  r.omega = omega;
  r.axis_values = powers;
  r.spectra_at.reserve(powers.size());
  for (double P : powers) r.spectra_at.push_back(at_power(P));

  const auto it = std::min_element(r.spectra_at.begin(), r.spectra_at.end());
  r.grid_argmin = static_cast<std::size_t>(it - r.spectra_at.begin());
  r.argmin = powers[r.grid_argmin];
  r.min_value = *it;
  r.interior = r.grid_argmin > 0 && r.grid_argmin + 1 < powers.size();
  if (r.interior) {
    const double lo = std::log(powers[r.grid_argmin - 1]);
    const double hi = std::log(powers[r.grid_argmin + 1]);
    auto f = [&](double log_p) { return at_power(std::exp(log_p)); };
    const auto [log_p, value] = boost::math::tools::brent_find_minima(f, lo, hi, 40);
    if (value <= r.min_value) {
      r.argmin = std::exp(log_p);
      r.min_value = value;
      r.refined = true;
    }
  }
  return r;
}

} // namespace cqnc
