// Shared domain types: errors, tenor grids, model parameters, correlation
// surfaces and Langevin dynamics parameters.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frc {

enum class Errc {
  InvalidArgument,
  InvalidGrid,
  InvalidSurface,
  InactiveFieldSet,
  NonPositiveParameter,
  DegenerateRoots,
  QuadratureNonConvergence,
  SizeTooSmall,
  SingularOperator,
  NonDiagonalizable,
  UnstableIntegration,
  InsufficientSamples,
  InsufficientData,
  ParseError,
  DuplicateRecord,
  NonMonotoneTime,
  GridMismatch,
  NonConvergence,
  NumericalBreakdown,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Months per tenor step. Tenors are stored as integer counts of quarters.
inline constexpr int kMonthsPerTenor = 3;

/// Ordered set of quoted tenors in quarter units (1 == 3 months).
class TenorGrid {
 public:
  TenorGrid() = default;
  explicit TenorGrid(std::vector<int> tenors);

  /// Contiguous grid 1..n (3 to 3n months).
  static TenorGrid contiguous(int n);
  /// Parses a comma-separated list of month labels ("3,6,9").
  static TenorGrid parse_months(std::string_view text);

  std::size_t size() const noexcept { return tenors_.size(); }
  bool empty() const noexcept { return tenors_.empty(); }
  int operator[](std::size_t i) const { return tenors_[i]; }
  int months(std::size_t i) const { return tenors_[i] * kMonthsPerTenor; }
  const std::vector<int>& tenors() const noexcept { return tenors_; }
  int max_tenor() const;
  std::optional<std::size_t> index_of(int tenor) const;

  /// Inverse of parse_months.
  std::string to_months_string() const;

  friend bool operator==(const TenorGrid&, const TenorGrid&) = default;

 private:
  std::vector<int> tenors_;
};

enum class Variant { BB04, BBL3, BBL2, BBD3, BBD2, BBDL };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

/// Parameter vector of a correlation model. Only the fields used by the
/// variant may be set:
///   BB04 -> psi_bar, mu, nu     BBL3, BBD3 -> psi, mu, nu
///   BBL2, BBD2 -> psi, mu       BBDL -> kappa
/// psi is in months. mu and nu are per quarter for the continuous variants
/// and dimensionless for the discrete ones. A missing nu on BBL2/BBD2 means
/// nu = +inf.
struct ModelParams {
  Variant variant = Variant::BBDL;
  std::optional<double> psi;
  std::optional<double> mu;
  std::optional<double> nu;
  std::optional<double> kappa;
  std::optional<double> psi_bar;

  static ModelParams bb04(double psi_bar, double mu, double nu);
  static ModelParams bbl3(double psi, double mu, double nu);
  static ModelParams bbl2(double psi, double mu);
  static ModelParams bbd3(double psi, double mu, double nu);
  static ModelParams bbd2(double psi, double mu);
  static ModelParams bbdl(double kappa);

  /// nu for the variant, +inf when the variant fixes it.
  double nu_or_inf() const;
};

/// Throws Error{InactiveFieldSet} or Error{NonPositiveParameter}.
void validate_params(const ModelParams& p);

/// Names of the active (calibrated) parameters, in vector order.
std::vector<std::string> active_parameter_names(Variant v);
Eigen::VectorXd active_vector(const ModelParams& p);
ModelParams from_active_vector(Variant v, const Eigen::VectorXd& x);

/// Symmetric matrix of Pearson correlations over a tenor grid.
///
/// Off-diagonal entries may be NaN to mark pairs without enough data; the
/// NaN pattern must itself be symmetric. Positive semidefiniteness is not
/// required.
class CorrelationSurface {
 public:
  /// Symmetry and unit-diagonal are checked to 1e-12 and then enforced
  /// exactly; entries outside [-1, 1] by more than 1e-12 are rejected.
  CorrelationSurface(TenorGrid grid, Eigen::MatrixXd values);

  const TenorGrid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  bool has_missing() const;

  /// Normalizes a covariance matrix into a correlation surface.
  static CorrelationSurface from_covariance(TenorGrid grid, const Eigen::MatrixXd& cov);

 private:
  TenorGrid grid_;
  Eigen::MatrixXd values_;
};

struct DynamicsParams {
  double tau = 1.0;      // relaxation time, same units as delta_t
  double big_d = 0.5;    // noise variance is 2 * big_d per unit time
  double epsilon = 0.0;  // idiosyncratic noise, relative to 2 * big_d
  double delta_t = 1.0;  // observation bin width

  void validate() const;
};

}  // namespace frc
