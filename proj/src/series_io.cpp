#include "cqnc/series_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cqnc/errors.hpp"

namespace cqnc {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError("invalid number in CSV: '" + text + "'");
  }
  return v;
}

} // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& os, const SpectrumSeries& series) {
  series.validate();
  os << "omega_rad_s";
  for (const auto& c : series.channels) os << ',' << c.name;
  os << '\n';
  for (std::size_t i = 0; i < series.omegas.size(); ++i) {
    os << format_double(series.omegas[i]);
    for (const auto& c : series.channels) os << ',' << format_double(c.values[i]);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const SpectrumSeries& series) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path.string());
  write_csv(os, series);
  if (!os) throw ConfigError("write failed: " + path.string());
}

SpectrumSeries read_csv(std::istream& is, SpectrumUnits units) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV");
  const auto header = split(line);
  if (header.empty() || header[0] != "omega_rad_s") {
    throw ConfigError("CSV header must start with omega_rad_s");
  }
  SpectrumSeries s;
  s.units = units;
  for (std::size_t k = 1; k < header.size(); ++k) s.channels.push_back({header[k], {}});
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw ConfigError("CSV row has wrong field count");
    s.omegas.push_back(parse_double(fields[0]));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      s.channels[k - 1].values.push_back(parse_double(fields[k]));
    }
  }
  s.validate();
  return s;
}

SpectrumSeries read_csv(const std::filesystem::path& path, SpectrumUnits units) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path.string());
  return read_csv(is, units);
}

nlohmann::json to_json(const SpectrumSeries& series, std::optional<double> Omega) {
  series.validate();
  nlohmann::json j;
  j["units"] = to_string(series.units);
  j["omega_rad_s"] = series.omegas;
  if (Omega) {
    std::vector<double> ratio(series.omegas.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = series.omegas[i] / *Omega;
    j["omega_over_Omega"] = ratio;
  }
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : series.channels) channels.push_back({{"name", c.name}, {"values", c.values}});
  j["channels"] = channels;
  return j;
}

SpectrumSeries series_from_json(const nlohmann::json& j) {
  SpectrumSeries s;
  try {
    s.units = spectrum_units_from_string(j.at("units").get<std::string>());
    s.omegas = j.at("omega_rad_s").get<std::vector<double>>();
    for (const auto& c : j.at("channels")) {
      s.channels.push_back({c.at("name").get<std::string>(), c.at("values").get<std::vector<double>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed spectrum JSON: ") + e.what());
  }
  s.validate();
  return s;
}

} // namespace cqnc
