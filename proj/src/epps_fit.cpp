#include "frc/calib.hpp"

#include "frc/discrete.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace frc {

namespace {

Eigen::Matrix2d pick(const Eigen::MatrixXd& c, bool swapped) {
  Eigen::Matrix2d out = c.topLeftCorner(2, 2);
  if (swapped) std::swap(out(0, 0), out(1, 1));
  return out;
}

TenorGrid pair_grid(std::pair<int, int> pair, bool& swapped) {
  if (pair.first == pair.second) throw Error(Errc::InvalidArgument, "pair needs two distinct tenors");
  swapped = pair.first > pair.second;
  return TenorGrid({std::min(pair.first, pair.second), std::max(pair.first, pair.second)});
}

}  // namespace

EppsModel epps_model_bbdl(const OperatorMatrix& m, std::pair<int, int> pair) {
  bool swapped = false;
  const TenorGrid grid = pair_grid(pair, swapped);
  if (grid.max_tenor() >= m.size) throw Error(Errc::SizeTooSmall, "pair exceeds the operator size");
  auto eig = std::make_shared<OperatorEigen>(diagonalize(m));
  const std::vector<int> rows = grid.tenors();
  return {[eig, rows, swapped](double tau, double dt) {
    return pick(cov_bbdl_finite_tau(*eig, DynamicsParams{tau, 0.5, 0.0, dt}, rows), swapped);
  }};
}

EppsModel epps_model_discrete(const ModelParams& params, std::pair<int, int> pair) {
  validate_params(params);
  bool swapped = false;
  const TenorGrid grid = pair_grid(pair, swapped);
  const PsyTimeSpec clock = discrete_clock(params);
  const DiscreteSymbol sym{*params.mu, params.nu_or_inf()};
  return {[=](double tau, double dt) {
    return pick(cov_delta_a_finite_tau_matrix(sym, clock, DynamicsParams{tau, 0.5, 0.0, dt}, grid), swapped);
  }};
}

double epps_model_correlation(const EppsModel& model, double tau_seconds, double epsilon, double delta_t_seconds) {
  Eigen::Matrix2d c = model.covariance(tau_seconds, delta_t_seconds);
  c(0, 0) += epsilon * delta_t_seconds;
  c(1, 1) += epsilon * delta_t_seconds;
  return c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
}

EppsFit fit_epps(const EppsCurve& curve, const EppsModel& model, const EppsFitOptions& options) {
  std::vector<std::pair<double, double>> data;
  for (std::size_t i = 0; i < curve.scales.size(); ++i) {
    if (std::isfinite(curve.correlations[i])) data.emplace_back(curve.scales[i], curve.correlations[i]);
  }
  if (data.size() < 5) throw Error(Errc::InsufficientData, "Epps fit needs at least 5 usable scales");
  auto objective = [&](const Eigen::VectorXd& l) {
    const double tau_s = 60.0 * std::exp(l[0]);
    const double eps = std::exp(l[1]);
    double ss = 0.0;
    for (const auto& [dt, rho] : data) {
      const double d = epps_model_correlation(model, tau_s, eps, dt) - rho;
      ss += d * d;
    }
    return ss / static_cast<double>(data.size());
  };
  SimplexOptions sopt = options.simplex;
  sopt.lower = Eigen::Vector2d(std::log(options.tau_min_minutes), std::log(options.eps_min));
  sopt.upper = Eigen::Vector2d(std::log(options.tau_max_minutes), std::log(options.eps_max));
  sopt.spread_tol = std::min(sopt.spread_tol, 1e-14);
  EppsFit best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& [tau0, eps0] : options.starts) {
    const SimplexResult r = nelder_mead(objective, Eigen::Vector2d(std::log(tau0), std::log(eps0)), sopt);
    if (r.value < best_value) {
      best_value = r.value;
      best.tau_minutes = std::exp(r.x[0]);
      best.epsilon = std::exp(r.x[1]);
      best.converged = r.converged;
    }
  }
  if (!std::isfinite(best_value)) throw Error(Errc::NumericalBreakdown, "Epps objective is not finite");
  if (!best.converged) throw Error(Errc::NonConvergence, "Epps fit did not converge");
  best.residual = std::sqrt(best_value);
  best.scales_used = static_cast<int>(data.size());
  return best;
}

}  // namespace frc
