// CSV and JSON serialization of correlation surfaces.
//
// CSV layout: a header row of tenor labels in months, then n rows of n
// comma-separated decimals. Missing entries are written as "nan".
// JSON layout: {"tenors": [months...], "values": [[...], ...]}, missing
// entries as null.
#pragma once

#include "frc/core.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace frc {

void write_surface_csv(std::ostream& out, const CorrelationSurface& s);
CorrelationSurface read_surface_csv(std::istream& in);

nlohmann::json surface_to_json(const CorrelationSurface& s);
CorrelationSurface surface_from_json(const nlohmann::json& j);

void save_surface(const std::filesystem::path& path, const CorrelationSurface& s);
/// Dispatches on extension: .json reads JSON, anything else CSV.
CorrelationSurface load_surface(const std::filesystem::path& path);

/// Writes a plain matrix with the grid header (used for error fields and
/// covariance exports, which are not correlation surfaces).
void write_matrix_csv(std::ostream& out, const TenorGrid& grid, const Eigen::MatrixXd& m);

}  // namespace frc
