#include "cqnc/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/series_io.hpp"

namespace cqnc {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"mechanical", {"omega_m_hz", "gamma_m_hz", "mass_kg", "temperature_k"}},
      {"cavity", {"kappa_hz", "lambda_L_nm", "detuning_c_hz"}},
      {"magnon", {"gamma_M_hz", "detuning_M_hz"}},
      {"opa", {"opa_gain_over_kappa", "theta"}},
      {"couplings", {"g0_hz", "G_OM_hz", "alpha_M", "G_OM_eff_hz", "cqnc_coupling"}},
      {"drive", {"power_w", "alpha", "mean_field"}},
  };
  return s;
}

void check_schema(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown config section: [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key outside of a section: " + section);
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

double number(const pt::ptree& tree, const std::string& path) {
  const auto text = tree.get_optional<std::string>(path);
  if (!text) throw ConfigError("missing required key: " + path);
  try {
    std::size_t used = 0;
    const double v = std::stod(*text, &used);
    if (used != text->size()) throw std::invalid_argument(*text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid number for " + path + ": '" + *text + "'");
  }
}

std::optional<double> optional_number(const pt::ptree& tree, const std::string& path) {
  if (!tree.get_optional<std::string>(path)) return std::nullopt;
  return number(tree, path);
}

double number_or(const pt::ptree& tree, const std::string& path, double fallback) {
  return optional_number(tree, path).value_or(fallback);
}

} // namespace

ParamSet parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_schema(tree);

  ParamSet p;
  p.mechanical.omega_m = hz_to_rad(number(tree, "mechanical.omega_m_hz"));
  p.mechanical.gamma_m = hz_to_rad(number(tree, "mechanical.gamma_m_hz"));
  p.mechanical.mass = optional_number(tree, "mechanical.mass_kg");
  p.mechanical.temperature = number_or(tree, "mechanical.temperature_k", 0.0);

  p.cavity.kappa = hz_to_rad(number(tree, "cavity.kappa_hz"));
  p.cavity.wavelength_L = number(tree, "cavity.lambda_L_nm") * 1e-9;
  p.cavity.detuning_c = hz_to_rad(number_or(tree, "cavity.detuning_c_hz", 0.0));

  p.magnon.gamma_M = hz_to_rad(number(tree, "magnon.gamma_M_hz"));
  p.magnon.detuning_M = hz_to_rad(
      number_or(tree, "magnon.detuning_M_hz", number(tree, "mechanical.omega_m_hz")));

  p.opa.gain = number_or(tree, "opa.opa_gain_over_kappa", 0.0) * p.cavity.kappa;
  p.opa.phase = number_or(tree, "opa.theta", 0.0);

  p.couplings.g0 = hz_to_rad(number(tree, "couplings.g0_hz"));
  p.couplings.G_OM = hz_to_rad(number_or(tree, "couplings.G_OM_hz", 0.0));
  p.couplings.alpha_M = optional_number(tree, "couplings.alpha_M");
  if (auto v = optional_number(tree, "couplings.G_OM_eff_hz")) p.couplings.G_OM_eff = hz_to_rad(*v);
  const auto convention = tree.get<std::string>("couplings.cqnc_coupling", "G_OM_eff");
  if (convention == "G_OM") {
    p.couplings.convention = CouplingConvention::bare;
  } else if (convention == "G_OM_eff") {
    p.couplings.convention = CouplingConvention::effective;
  } else {
    throw ConfigError("cqnc_coupling must be G_OM or G_OM_eff, got '" + convention + "'");
  }

  p.drive.power = number(tree, "drive.power_w");
  p.drive.alpha = optional_number(tree, "drive.alpha");
  const auto mean_field = tree.get<std::string>("drive.mean_field", "passive");
  if (mean_field == "passive") {
    p.drive.mean_field = MeanFieldModel::passive;
  } else if (mean_field == "opa_enhanced") {
    p.drive.mean_field = MeanFieldModel::opa_enhanced;
  } else {
    throw ConfigError("mean_field must be passive or opa_enhanced, got '" + mean_field + "'");
  }
  return p;
}

ParamSet load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path.string());
  return parse_config(is);
}

SystemParams load_params(const std::filesystem::path& path) {
  return SystemParams(load_config(path));
}

void write_config(std::ostream& os, const ParamSet& p) {
  const auto f = [](double v) { return format_double(v); };
  os << "[mechanical]\n";
  os << "omega_m_hz = " << f(rad_to_hz(p.mechanical.omega_m)) << '\n';
  os << "gamma_m_hz = " << f(rad_to_hz(p.mechanical.gamma_m)) << '\n';
  if (p.mechanical.mass) os << "mass_kg = " << f(*p.mechanical.mass) << '\n';
  os << "temperature_k = " << f(p.mechanical.temperature) << '\n';
  os << "\n[cavity]\n";
  os << "kappa_hz = " << f(rad_to_hz(p.cavity.kappa)) << '\n';
  os << "lambda_L_nm = " << f(p.cavity.wavelength_L * 1e9) << '\n';
  os << "detuning_c_hz = " << f(rad_to_hz(p.cavity.detuning_c)) << '\n';
  os << "\n[magnon]\n";
  os << "gamma_M_hz = " << f(rad_to_hz(p.magnon.gamma_M)) << '\n';
  os << "detuning_M_hz = " << f(rad_to_hz(p.magnon.detuning_M)) << '\n';
  os << "\n[opa]\n";
  os << "opa_gain_over_kappa = " << f(p.opa.gain / p.cavity.kappa) << '\n';
  os << "theta = " << f(p.opa.phase) << '\n';
  os << "\n[couplings]\n";
  os << "g0_hz = " << f(rad_to_hz(p.couplings.g0)) << '\n';
  os << "G_OM_hz = " << f(rad_to_hz(p.couplings.G_OM)) << '\n';
  if (p.couplings.alpha_M) os << "alpha_M = " << f(*p.couplings.alpha_M) << '\n';
  if (p.couplings.G_OM_eff) os << "G_OM_eff_hz = " << f(rad_to_hz(*p.couplings.G_OM_eff)) << '\n';
  os << "cqnc_coupling = " << to_string(p.couplings.convention) << '\n';
  os << "\n[drive]\n";
  os << "power_w = " << f(p.drive.power) << '\n';
  if (p.drive.alpha) os << "alpha = " << f(*p.drive.alpha) << '\n';
  os << "mean_field = " << to_string(p.drive.mean_field) << '\n';
}

nlohmann::json params_to_json(const SystemParams& params) {
  const auto& p = params.inputs();
  const auto& d = params.derived();
  nlohmann::json j;
  j["mechanical"] = {{"omega_m_hz", rad_to_hz(p.mechanical.omega_m)},
                     {"gamma_m_hz", rad_to_hz(p.mechanical.gamma_m)},
                     {"temperature_k", p.mechanical.temperature}};
  if (p.mechanical.mass) j["mechanical"]["mass_kg"] = *p.mechanical.mass;
  j["cavity"] = {{"kappa_hz", rad_to_hz(p.cavity.kappa)},
                 {"lambda_L_nm", p.cavity.wavelength_L * 1e9},
                 {"detuning_c_hz", rad_to_hz(p.cavity.detuning_c)}};
  j["magnon"] = {{"gamma_M_hz", rad_to_hz(p.magnon.gamma_M)},
                 {"detuning_M_hz", rad_to_hz(p.magnon.detuning_M)}};
  j["opa"] = {{"opa_gain_over_kappa", p.opa.gain / p.cavity.kappa}, {"theta", p.opa.phase}};
  j["couplings"] = {{"g0_hz", rad_to_hz(p.couplings.g0)},
                    {"G_OM_hz", rad_to_hz(p.couplings.G_OM)},
                    {"cqnc_coupling", std::string(to_string(p.couplings.convention))}};
  if (p.couplings.alpha_M) j["couplings"]["alpha_M"] = *p.couplings.alpha_M;
  if (p.couplings.G_OM_eff) j["couplings"]["G_OM_eff_hz"] = rad_to_hz(*p.couplings.G_OM_eff);
  j["drive"] = {{"power_w", p.drive.power},
                {"mean_field", std::string(to_string(p.drive.mean_field))}};
  if (p.drive.alpha) j["drive"]["alpha"] = *p.drive.alpha;
  j["derived_rad_s"] = {{"omega_L", d.omega_L},       {"E_L", d.E_L},
                        {"alpha", d.alpha},           {"g", d.g},
                        {"alpha_M", d.alpha_M},       {"G_OM_eff", d.G_OM_eff},
                        {"magnon_coupling", params.magnon_coupling()}};
  return j;
}

} // namespace cqnc
