// Continuous-tenor stiff string correlator and the BB04 / BBL3 / BBL2
// correlation models built on it.
#pragma once

#include "frc/core.hpp"
#include "frc/psytime.hpp"

#include <complex>
#include <utility>

namespace frc {

/// Line tension mu and stiffness nu, both per quarter. nu may be +inf.
struct StiffStringParams {
  double mu = 1.0;
  double nu = 1.0;
};

/// Roots (alpha_plus, alpha_minus) of w^2 / nu^4 - w / mu^2 + 1 = 0, computed
/// in complex arithmetic. alpha_minus is taken from the product identity
/// alpha_plus * alpha_minus = nu^4 so that it stays accurate for nu >> mu.
std::pair<std::complex<double>, std::complex<double>> alpha_pm(const StiffStringParams& p);

/// Stiff string correlator evaluated directly from the two roots. Throws
/// Error{DegenerateRoots} when |alpha_plus - alpha_minus| < 1e-9 |alpha_plus|.
/// nu must be finite.
double d_bb_direct(const StiffStringParams& p, double theta, double theta_p);

/// Stiff string correlator (unnormalized; only ratios are meaningful).
/// Degenerate roots are resolved by averaging at nu * (1 +- 1e-6); nu = +inf
/// uses the tension-only limit (mu/2)(exp(-mu(t+t')) + exp(-mu|t-t'|)).
double d_bb(const StiffStringParams& p, double theta, double theta_p);

/// Pearson correlation of the continuous model at perceived tenors.
double rho_bbl(const StiffStringParams& p, const PsyTimeSpec& clock, double theta, double theta_p);

/// Correlation surface for BB04, BBL3 or BBL2 parameters.
CorrelationSurface continuous_surface(const ModelParams& params, const TenorGrid& grid);

}  // namespace frc
