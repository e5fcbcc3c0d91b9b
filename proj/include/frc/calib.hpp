// Calibration: the typical error Sigma, multi-start simplex fits, Hessian
// sloppiness analysis and Epps-curve fits of (tau, epsilon).
#pragma once

#include "frc/bbdl.hpp"
#include "frc/core.hpp"
#include "frc/empirics.hpp"
#include "frc/models.hpp"
#include "frc/simplex.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace frc {

/// Standard deviation of E = model - empirical over the n^2 entries (or the
/// n(n-1) off-diagonal ones). NaN entries of either surface are skipped.
/// Throws Error{GridMismatch} when the grids differ.
double sigma_error(const CorrelationSurface& model, const CorrelationSurface& empirical, bool exclude_diagonal = false);

struct FitOptions {
  int starts = 10;
  std::uint64_t seed = 20240601;
  int threads = 0;                 // 0 = hardware concurrency
  bool exclude_diagonal = false;
  ModelOptions model;
  double box_lower = 1e-3;
  double box_upper = 1e3;
  double start_lower = 0.1;        // starting points are drawn log-uniformly
  double start_upper = 10.0;       // in [start_lower, start_upper]
  std::vector<Eigen::VectorXd> initial_points;  // overrides the quasi-random starts
  SimplexOptions simplex;
  bool require_convergence = true; // throw Error{NonConvergence} if no start converged
};

struct StartReport {
  Eigen::VectorXd start;
  Eigen::VectorXd result;
  double sigma_error = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
  bool monotone = true;  // best objective never increased across accepted steps
};

struct FitReport {
  Variant variant = Variant::BBDL;
  ModelParams params;
  double sigma_error = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
  int restarts = 0;
  bool exclude_diagonal = false;
  int n_mat = kDefaultMatrixSize;
  std::uint64_t seed = 0;
  std::vector<StartReport> starts;
};

/// Sigma of the model surface at `params` against `empirical`.
double fit_objective(const ModelParams& params, const CorrelationSurface& empirical, const FitOptions& options);

/// Multi-start Nelder-Mead on the log of the active parameters. Starts run
/// concurrently; the best start (ties by index) is reported.
FitReport fit(Variant variant, const CorrelationSurface& empirical, const FitOptions& options = {});

/// Quasi-random starting points (Halton with a seeded rotation) in log space.
std::vector<Eigen::VectorXd> start_points(int dim, int count, std::uint64_t seed, double lower, double upper);

struct HessianReport {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns follow eigenvalues
  Eigen::MatrixXd hessian_half_step;
  double richardson_discrepancy = 0.0;  // max |H(h) - H(h/2)| / max |H(h/2)|
  bool richardson_ok = true;            // discrepancy <= 10%
  double step = 1e-3;
};

/// H_ij = p_i p_j d^2 f / dp_i dp_j by central differences with relative step
/// h, symmetrized, with a Richardson check at h/2. Throws
/// Error{NumericalBreakdown} on non-finite differences.
HessianReport hessian_of(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& p,
                         double h = 1e-3);
HessianReport hessian(Variant variant, const ModelParams& p_star, const CorrelationSurface& empirical,
                      const FitOptions& options = {}, double h = 1e-3);

/// Model of the binned equal-time covariance of one tenor pair, normalized to
/// 2D = 1 and without the epsilon term.
struct EppsModel {
  std::function<Eigen::Matrix2d(double tau_seconds, double delta_t_seconds)> covariance;
};

/// psi << 1 model: the operator is diagonalized once.
EppsModel epps_model_bbdl(const OperatorMatrix& m, std::pair<int, int> pair);
/// psi >> 1 model (BBD3 / BBD2 parameters).
EppsModel epps_model_discrete(const ModelParams& params, std::pair<int, int> pair);

/// Correlation with the 2 D epsilon dt term added to both variances.
double epps_model_correlation(const EppsModel& model, double tau_seconds, double epsilon, double delta_t_seconds);

struct EppsFit {
  double tau_minutes = 0.0;
  double epsilon = 0.0;
  double residual = 0.0;  // RMS correlation error over the used scales
  int scales_used = 0;
  bool converged = false;
};

struct EppsFitOptions {
  std::vector<std::pair<double, double>> starts = {{30.0, 1e-3}, {10.0, 1e-2}, {120.0, 1e-4}};  // (tau minutes, epsilon)
  double tau_min_minutes = 1e-2, tau_max_minutes = 1e5;
  double eps_min = 1e-10, eps_max = 10.0;
  SimplexOptions simplex;
};

/// Least squares over (log tau, log epsilon) of model minus empirical
/// correlations, equal weights per scale. Needs at least 5 finite scales.
EppsFit fit_epps(const EppsCurve& curve, const EppsModel& model, const EppsFitOptions& options = {});

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const HessianReport& r, const std::vector<std::string>& names);
nlohmann::json to_json(const EppsFit& r);

}  // namespace frc
