// Lattice correlators for the psi >> 1 regime: the Fourier symbol L_d, the
// D_k integrals, their residue closed forms, the relaxation propagator and
// the BBD3 / BBD2 correlation models.
#pragma once

#include "frc/core.hpp"
#include "frc/psytime.hpp"

#include <functional>
#include <limits>

namespace frc {

/// Dimensionless line tension and stiffness on the tenor lattice.
struct DiscreteSymbol {
  double mu = 1.0;
  double nu = std::numeric_limits<double>::infinity();
};

/// L_d(xi) = 1 + 2(1 - cos xi)/mu^2 + 4(1 - cos xi)^2/nu^4.
double l_d(const DiscreteSymbol& sym, double xi);

/// Evaluates (1/pi) int_0^pi 2 cos(xi z_i) cos(xi z_j) w(xi) dxi for all
/// pairs of z by composite 20-point Gauss-Legendre quadrature. The panel count
/// doubles until two successive matrices agree to 1e-10 (relative to the
/// largest entry, floored at 1), up to 2^15 nodes; otherwise
/// Error{QuadratureNonConvergence}.
Eigen::MatrixXd cosine_transform_matrix(const std::function<double(double)>& weight,
                                        const Eigen::VectorXd& z);

/// D_k(z_i, z_j) = (1/pi) int_0^pi 2 cos(xi z_i) cos(xi z_j) / L_d(xi)^k dxi.
Eigen::MatrixXd d_k_matrix(const DiscreteSymbol& sym, int k, const Eigen::VectorXd& z);
double d_k_quadrature(const DiscreteSymbol& sym, int k, double theta, double theta_p);

/// Closed forms of D_1 and D_2 on integer tenors from the residues of the
/// poles inside the unit circle. nu may be infinite. Throws
/// Error{DegenerateRoots} when two poles (nearly) coincide.
double d_1_residue(const DiscreteSymbol& sym, int theta, int theta_p);
double d_2_residue(const DiscreteSymbol& sym, int theta, int theta_p);
/// Shared implementation for k in {1, 2}.
double d_k_residue(const DiscreteSymbol& sym, int k, int theta, int theta_p);

/// G(theta, theta', dt) = (1/pi) int_0^pi 2 cos(xi theta) cos(xi theta') exp(-L_d dt / tau) dxi.
double propagator(const DiscreteSymbol& sym, double tau, int theta, int theta_p, double dt);

/// Clock of the BBD3 / BBD2 variants: log-hyperbolic with psi in quarters.
PsyTimeSpec discrete_clock(const ModelParams& params);

double rho_bbd(const DiscreteSymbol& sym, const PsyTimeSpec& clock, double theta, double theta_p);

/// Correlation surface for BBD3 or BBD2 parameters.
CorrelationSurface discrete_surface(const ModelParams& params, const TenorGrid& grid);

/// Equal-time covariance of the binned field Delta A at finite relaxation
/// time: 2D (1/pi) int 2 cos cos / L_d^2 (tau / L_d) phi(L_d dt / tau) with
/// phi(y) = y - 1 + exp(-y). The epsilon term of DynamicsParams is not added.
double cov_delta_a_finite_tau(const DiscreteSymbol& sym, const PsyTimeSpec& clock,
                              const DynamicsParams& dyn, double theta, double theta_p);
Eigen::MatrixXd cov_delta_a_finite_tau_matrix(const DiscreteSymbol& sym, const PsyTimeSpec& clock,
                                              const DynamicsParams& dyn, const TenorGrid& grid);

/// phi(y) = y - 1 + exp(-y), accurate for small y.
double ou_integral_kernel(double y);

}  // namespace frc
