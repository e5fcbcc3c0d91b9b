#include "frc/surface_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace frc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t line_no) {
  if (s == "nan" || s == "NaN" || s == "NA" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

void write_cell(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

}  // namespace

void write_matrix_csv(std::ostream& out, const TenorGrid& grid, const Eigen::MatrixXd& m) {
  out << grid.to_months_string() << '\n';
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      write_cell(out, m(i, j));
    }
    out << '\n';
  }
  out.precision(old_prec);
}

void write_surface_csv(std::ostream& out, const CorrelationSurface& s) {
  write_matrix_csv(out, s.grid(), s.values());
}

CorrelationSurface read_surface_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "empty surface file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  TenorGrid grid = TenorGrid::parse_months(line);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd values(n, n);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (row >= n) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": too many rows");
    auto cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != n) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                        " fields, got " + std::to_string(cells.size()));
    }
    for (Eigen::Index j = 0; j < n; ++j) values(row, j) = parse_cell(cells[static_cast<std::size_t>(j)], line_no);
    ++row;
  }
  if (row != n) throw Error(Errc::ParseError, "expected " + std::to_string(n) + " rows, got " + std::to_string(row));
  return CorrelationSurface(std::move(grid), std::move(values));
}

nlohmann::json surface_to_json(const CorrelationSurface& s) {
  nlohmann::json j;
  std::vector<int> months;
  for (std::size_t i = 0; i < s.size(); ++i) months.push_back(s.grid().months(i));
  j["tenors"] = months;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.values().rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.values().cols(); ++k) {
      const double v = s.values()(i, k);
      if (std::isnan(v)) {
        r.push_back(nullptr);
      } else {
        r.push_back(v);
      }
    }
    rows.push_back(std::move(r));
  }
  j["values"] = std::move(rows);
  return j;
}

CorrelationSurface surface_from_json(const nlohmann::json& j) {
  try {
    std::vector<int> tenors;
    for (int m : j.at("tenors").get<std::vector<int>>()) {
      if (m % kMonthsPerTenor != 0) throw Error(Errc::InvalidGrid, "tenor not a multiple of 3 months");
      tenors.push_back(m / kMonthsPerTenor);
    }
    TenorGrid grid(std::move(tenors));
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto& rows = j.at("values");
    if (static_cast<Eigen::Index>(rows.size()) != n) throw Error(Errc::ParseError, "values row count mismatch");
    Eigen::MatrixXd values(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(r.size()) != n) throw Error(Errc::ParseError, "values column count mismatch");
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto& cell = r.at(static_cast<std::size_t>(k));
        values(i, k) = cell.is_null() ? std::numeric_limits<double>::quiet_NaN() : cell.get<double>();
      }
    }
    return CorrelationSurface(std::move(grid), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

void save_surface(const std::filesystem::path& path, const CorrelationSurface& s) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  if (path.extension() == ".json") {
    out << surface_to_json(s).dump(2) << '\n';
  } else {
    write_surface_csv(out, s);
  }
}

CorrelationSurface load_surface(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path.string());
  if (path.extension() == ".json") {
    try {
      return surface_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, e.what());
    }
  }
  return read_surface_csv(in);
}

}  // namespace frc
