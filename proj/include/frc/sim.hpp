// Langevin simulation of the lattice noise field dA/dt = (1/tau)(-M A + eta)
// and Monte-Carlo estimators built on its paths.
#pragma once

#include "frc/bbdl.hpp"
#include "frc/core.hpp"
#include "frc/discrete.hpp"
#include "frc/empirics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace frc {

enum class SimOperator {
  LdStencil,  // I - Delta^2/mu^2 + Delta^4/nu^4 with ghost nodes A_{-j} = A_j
  MMatrix,    // OperatorMatrix with J applied to the noise
};

enum class Integrator { EulerMaruyama, ExactOU };

struct SimConfig {
  SimOperator op = SimOperator::MMatrix;
  DiscreteSymbol symbol;                 // LdStencil
  std::optional<OperatorMatrix> matrix;  // MMatrix; defaults to build_m(kappa, n_tenors)
  double kappa = 0.92;
  int n_tenors = 10;                     // lattice sites theta = 0..n_tenors-1
  double tau = 1.0;
  double big_d = 0.5;
  double dt_step = 0.1;
  long n_steps = 1000;                   // recorded steps after burn-in
  long burn_in = 100;
  std::uint64_t seed = 7;
  double epsilon = 0.0;                  // idiosyncratic noise on the integral
  Integrator integrator = Integrator::ExactOU;
  long record_stride = 1;

  /// Throws Error{InvalidArgument} when a guard fails:
  /// dt_step <= tau/10, burn_in >= 10 tau/dt_step, n_steps >= 2.
  void validate() const;
};

/// Recorded trajectory. Row r of a_values and integral is taken at times[r];
/// integral holds the running integral of A since the end of the burn-in,
/// including the epsilon noise.
struct NoiseFieldPath {
  Eigen::VectorXd times;
  Eigen::MatrixXd a_values;
  Eigen::MatrixXd integral;
  double record_dt = 0.0;
};

/// Deterministic given cfg.seed. Throws Error{UnstableIntegration} when any
/// |A| exceeds 1e12.
NoiseFieldPath simulate(const SimConfig& cfg);

/// Non-overlapping increments Delta A of width delta_t, one row per bin.
/// delta_t must be a multiple of the record interval.
Eigen::MatrixXd bin_increments(const NoiseFieldPath& path, double delta_t);

struct SampleCovariance {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd std_error;  // batch-means standard errors
  long n_bins = 0;
};

/// Sample covariance of Delta A with batch-means standard errors over
/// `batches` contiguous batches. Throws Error{InsufficientSamples} for fewer
/// than 10 bins per batch.
SampleCovariance sample_equal_time_cov(const NoiseFieldPath& path, double delta_t, int batches = 50);

/// Forward-rate increments sigma_theta Delta A_theta / sd(Delta A_theta) * sqrt(delta_t).
Eigen::MatrixXd synth_forward_increments(const NoiseFieldPath& path, const Eigen::VectorXd& sigma,
                                         double delta_t);

/// Quotes 100 - scale * integral for the given lattice sites, one per record,
/// with path time measured in seconds from `start`.
PriceSeries path_to_prices(const NoiseFieldPath& path, const std::vector<int>& sites, double scale = 1.0,
                           TimestampUs start = 0);

/// CSV with columns time,tenor_index,value.
void write_path_csv(std::ostream& out, const NoiseFieldPath& path);

}  // namespace frc
