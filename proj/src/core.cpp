#include "frc/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace frc {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::InvalidSurface: return "InvalidSurface";
    case Errc::InactiveFieldSet: return "InactiveFieldSet";
    case Errc::NonPositiveParameter: return "NonPositiveParameter";
    case Errc::DegenerateRoots: return "DegenerateRoots";
    case Errc::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case Errc::SizeTooSmall: return "SizeTooSmall";
    case Errc::SingularOperator: return "SingularOperator";
    case Errc::NonDiagonalizable: return "NonDiagonalizable";
    case Errc::UnstableIntegration: return "UnstableIntegration";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateRecord: return "DuplicateRecord";
    case Errc::NonMonotoneTime: return "NonMonotoneTime";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

// ---------------------------------------------------------------- TenorGrid

TenorGrid::TenorGrid(std::vector<int> tenors) : tenors_(std::move(tenors)) {
  for (std::size_t i = 0; i < tenors_.size(); ++i) {
    if (tenors_[i] < 1) {
      throw Error(Errc::InvalidGrid, "tenor " + std::to_string(tenors_[i]) + " < 1 quarter");
    }
    if (i > 0 && tenors_[i] <= tenors_[i - 1]) {
      throw Error(Errc::InvalidGrid, "tenors must be strictly increasing");
    }
  }
}

TenorGrid TenorGrid::contiguous(int n) {
  if (n < 1) throw Error(Errc::InvalidGrid, "grid size must be positive");
  std::vector<int> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = i + 1;
  return TenorGrid(std::move(t));
}

TenorGrid TenorGrid::parse_months(std::string_view text) {
  std::vector<int> tenors;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    auto field = text.substr(pos, end - pos);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
    if (field.empty()) {
      if (end == text.size() && tenors.empty() && pos == 0) break;
      throw Error(Errc::ParseError, "empty tenor label");
    }
    int months = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), months);
    if (ec != std::errc{} || p != field.data() + field.size()) {
      throw Error(Errc::ParseError, "bad tenor label '" + std::string(field) + "'");
    }
    if (months % kMonthsPerTenor != 0) {
      throw Error(Errc::InvalidGrid, "tenor " + std::to_string(months) + " months is not a multiple of 3");
    }
    tenors.push_back(months / kMonthsPerTenor);
    pos = end + 1;
  }
  return TenorGrid(std::move(tenors));
}

int TenorGrid::max_tenor() const {
  if (tenors_.empty()) throw Error(Errc::InvalidGrid, "empty grid");
  return tenors_.back();
}

std::optional<std::size_t> TenorGrid::index_of(int tenor) const {
  auto it = std::lower_bound(tenors_.begin(), tenors_.end(), tenor);
  if (it == tenors_.end() || *it != tenor) return std::nullopt;
  return static_cast<std::size_t>(it - tenors_.begin());
}

std::string TenorGrid::to_months_string() const {
  std::string out;
  for (std::size_t i = 0; i < tenors_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(months(i));
  }
  return out;
}

// ---------------------------------------------------------------- ModelParams

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::BB04: return "bb04";
    case Variant::BBL3: return "bbl3";
    case Variant::BBL2: return "bbl2";
    case Variant::BBD3: return "bbd3";
    case Variant::BBD2: return "bbd2";
    case Variant::BBDL: return "bbdl";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto v : {Variant::BB04, Variant::BBL3, Variant::BBL2, Variant::BBD3, Variant::BBD2, Variant::BBDL}) {
    if (lower == to_string(v)) return v;
  }
  throw Error(Errc::InvalidArgument, "unknown variant '" + std::string(name) + "'");
}

ModelParams ModelParams::bb04(double psi_bar, double mu, double nu) {
  ModelParams p;
  p.variant = Variant::BB04;
  p.psi_bar = psi_bar;
  p.mu = mu;
  p.nu = nu;
  return p;
}

ModelParams ModelParams::bbl3(double psi, double mu, double nu) {
  ModelParams p;
  p.variant = Variant::BBL3;
  p.psi = psi;
  p.mu = mu;
  p.nu = nu;
  return p;
}

ModelParams ModelParams::bbl2(double psi, double mu) {
  ModelParams p;
  p.variant = Variant::BBL2;
  p.psi = psi;
  p.mu = mu;
  return p;
}

ModelParams ModelParams::bbd3(double psi, double mu, double nu) {
  ModelParams p = bbl3(psi, mu, nu);
  p.variant = Variant::BBD3;
  return p;
}

ModelParams ModelParams::bbd2(double psi, double mu) {
  ModelParams p = bbl2(psi, mu);
  p.variant = Variant::BBD2;
  return p;
}

ModelParams ModelParams::bbdl(double kappa) {
  ModelParams p;
  p.variant = Variant::BBDL;
  p.kappa = kappa;
  return p;
}

double ModelParams::nu_or_inf() const {
  return nu ? *nu : std::numeric_limits<double>::infinity();
}

namespace {

struct FieldMask {
  bool psi, mu, nu, kappa, psi_bar;
};

FieldMask mask_for(Variant v) {
  switch (v) {
    case Variant::BB04: return {false, true, true, false, true};
    case Variant::BBL3:
    case Variant::BBD3: return {true, true, true, false, false};
    case Variant::BBL2:
    case Variant::BBD2: return {true, true, false, false, false};
    case Variant::BBDL: return {false, false, false, true, false};
  }
  return {};
}

void check_field(const char* name, const std::optional<double>& value, bool active, bool allow_inf = false) {
  if (!active) {
    if (value) throw Error(Errc::InactiveFieldSet, std::string(name) + " is not used by this variant");
    return;
  }
  if (!value) throw Error(Errc::InvalidArgument, std::string(name) + " is required by this variant");
  const double v = *value;
  if (std::isnan(v) || v <= 0.0) {
    throw Error(Errc::NonPositiveParameter, std::string(name) + " must be positive");
  }
  if (std::isinf(v) && !allow_inf) throw Error(Errc::InvalidArgument, std::string(name) + " must be finite");
}

}  // namespace

void validate_params(const ModelParams& p) {
  const auto m = mask_for(p.variant);
  check_field("psi", p.psi, m.psi);
  check_field("mu", p.mu, m.mu);
  check_field("nu", p.nu, m.nu, /*allow_inf=*/true);
  check_field("kappa", p.kappa, m.kappa);
  check_field("psi_bar", p.psi_bar, m.psi_bar);
  if (p.psi_bar && *p.psi_bar > 1.0) {
    throw Error(Errc::InvalidArgument, "psi_bar must lie in (0, 1]");
  }
}

std::vector<std::string> active_parameter_names(Variant v) {
  switch (v) {
    case Variant::BB04: return {"psi_bar", "mu", "nu"};
    case Variant::BBL3:
    case Variant::BBD3: return {"psi", "mu", "nu"};
    case Variant::BBL2:
    case Variant::BBD2: return {"psi", "mu"};
    case Variant::BBDL: return {"kappa"};
  }
  return {};
}

Eigen::VectorXd active_vector(const ModelParams& p) {
  validate_params(p);
  switch (p.variant) {
    case Variant::BB04: return Eigen::Vector3d(*p.psi_bar, *p.mu, *p.nu);
    case Variant::BBL3:
    case Variant::BBD3: return Eigen::Vector3d(*p.psi, *p.mu, *p.nu);
    case Variant::BBL2:
    case Variant::BBD2: return Eigen::Vector2d(*p.psi, *p.mu);
    case Variant::BBDL: return Eigen::VectorXd::Constant(1, *p.kappa);
  }
  return {};
}

ModelParams from_active_vector(Variant v, const Eigen::VectorXd& x) {
  const auto names = active_parameter_names(v);
  if (static_cast<std::size_t>(x.size()) != names.size()) {
    throw Error(Errc::InvalidArgument, "parameter vector has wrong length for variant");
  }
  switch (v) {
    case Variant::BB04: return ModelParams::bb04(x[0], x[1], x[2]);
    case Variant::BBL3: return ModelParams::bbl3(x[0], x[1], x[2]);
    case Variant::BBD3: return ModelParams::bbd3(x[0], x[1], x[2]);
    case Variant::BBL2: return ModelParams::bbl2(x[0], x[1]);
    case Variant::BBD2: return ModelParams::bbd2(x[0], x[1]);
    case Variant::BBDL: return ModelParams::bbdl(x[0]);
  }
  return {};
}

// ---------------------------------------------------------------- CorrelationSurface

CorrelationSurface::CorrelationSurface(TenorGrid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (values_.rows() != n || values_.cols() != n) {
    throw Error(Errc::InvalidSurface, "matrix shape does not match tenor grid");
  }
  constexpr double tol = 1e-12;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(values_(i, i) - 1.0) <= tol)) {
      throw Error(Errc::InvalidSurface, "diagonal entry " + std::to_string(i) + " is not 1");
    }
    values_(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (std::isnan(a) || std::isnan(b)) {
        if (!(std::isnan(a) && std::isnan(b))) {
          throw Error(Errc::InvalidSurface, "asymmetric missing-data pattern");
        }
        continue;
      }
      if (std::abs(a - b) > tol) throw Error(Errc::InvalidSurface, "matrix is not symmetric");
      if (std::abs(a) > 1.0 + tol || std::abs(b) > 1.0 + tol) {
        throw Error(Errc::InvalidSurface, "correlation outside [-1, 1]");
      }
      const double v = std::clamp(0.5 * (a + b), -1.0, 1.0);
      values_(i, j) = v;
      values_(j, i) = v;
    }
  }
}

bool CorrelationSurface::has_missing() const { return values_.array().isNaN().any(); }

CorrelationSurface CorrelationSurface::from_covariance(TenorGrid grid, const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  Eigen::VectorXd inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0) || !std::isfinite(cov(i, i))) {
      throw Error(Errc::NumericalBreakdown, "non-positive variance in covariance matrix");
    }
    inv_sd[i] = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rho(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = 0.5 * (cov(i, j) + cov(j, i)) * inv_sd[i] * inv_sd[j];
      rho(i, j) = rho(j, i) = std::clamp(v, -1.0, 1.0);
    }
  }
  return CorrelationSurface(std::move(grid), std::move(rho));
}

// ---------------------------------------------------------------- DynamicsParams

void DynamicsParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::NonPositiveParameter, "tau must be positive");
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw Error(Errc::NonPositiveParameter, "delta_t must be positive");
  }
  if (!(big_d > 0.0)) throw Error(Errc::NonPositiveParameter, "D must be positive");
  if (!(epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be non-negative");
}

}  // namespace frc
