#pragma once

// SpectrumSeries serialization.  CSV: header `omega_rad_s,<channel>...`, one
// row per frequency, values printed with 17 significant digits so a write/read
// cycle is bit-exact.  JSON: the same data plus units and omega / Omega.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "cqnc/spectra.hpp"

namespace cqnc {

std::string format_double(double value);

void write_csv(std::ostream& os, const SpectrumSeries& series);
void write_csv(const std::filesystem::path& path, const SpectrumSeries& series);
SpectrumSeries read_csv(std::istream& is, SpectrumUnits units = SpectrumUnits::dimensionless);
SpectrumSeries read_csv(const std::filesystem::path& path,
                        SpectrumUnits units = SpectrumUnits::dimensionless);

// When Omega is given, an `omega_over_Omega` array is included.
nlohmann::json to_json(const SpectrumSeries& series, std::optional<double> Omega = std::nullopt);
SpectrumSeries series_from_json(const nlohmann::json& j);

} // namespace cqnc
