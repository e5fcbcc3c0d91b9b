// The psi << 1 lattice model: the relaxation operator M, the image matrix J,
// the stationary correlator M^-1 J^2 M^-T and its finite-tau counterpart.
#pragma once

#include "frc/band_lu.hpp"
#include "frc/core.hpp"

#include <complex>
#include <optional>

namespace frc {

inline constexpr int kDefaultMatrixSize = 500;
/// Rows kept beyond the largest quoted tenor when restricting to a grid.
inline constexpr int kBoundaryMargin = 100;

enum class OperatorForm {
  KappaLimit,  // tridiagonal, kappa = mu psi with nu psi -> inf
  General,     // pentadiagonal with kappa1 = mu psi and kappa2 = nu psi
  FinitePsi,   // pentadiagonal lattice operator at finite psi (quarters)
};

/// Relaxation operator on tenors 0..size-1. Stencil columns that fall below
/// zero are folded back onto their mirror image (A_{-j} = A_j).
struct OperatorMatrix {
  OperatorForm form = OperatorForm::KappaLimit;
  int size = 0;
  double kappa = 0.0;
  std::optional<double> kappa2;  // General form; +inf allowed
  std::optional<double> psi;     // FinitePsi form, in quarters
  BandedMatrix entries;

  Eigen::MatrixXd dense() const { return entries.dense(); }
};

/// kappa-limit operator
///   M = I - (theta/kappa^2)(I_1 - I_-1) - (theta^2/kappa^2)(I_1 - 2I + I_-1),
/// or, when kappa2 is given, the general pentadiagonal operator in
/// (kappa, kappa2). Throws Error{SizeTooSmall} for n_mat < 3.
OperatorMatrix build_m(double kappa, int n_mat = kDefaultMatrixSize, std::optional<double> kappa2 = {});

/// Lattice operator at finite psi (quarters) with dimensionless mu and nu
/// (nu may be +inf). Depends on psi beyond the products mu psi and nu psi;
/// tends to build_m(mu psi, n_mat, nu psi) as psi -> 0.
OperatorMatrix build_m_finite_psi(double psi, double mu, double nu, int n_mat = kDefaultMatrixSize);

/// Diagonal of J: 2 at theta = 0, 1 elsewhere.
Eigen::VectorXd image_boundary_diagonal(int n);

/// Stationary correlator M^-1 J^2 M^-T on the full lattice (without the
/// 2 D dt factor). Throws Error{SingularOperator} when the LU pivot ratio
/// falls below 1e-13.
Eigen::MatrixXd cov_bbdl(const OperatorMatrix& m);
/// Rows and columns of cov_bbdl at the grid tenors, via transposed solves.
Eigen::MatrixXd cov_bbdl_grid(const OperatorMatrix& m, const TenorGrid& grid);

/// Correlation surface of the kappa-limit model. Throws Error{SizeTooSmall}
/// unless max tenor < n_mat - kBoundaryMargin.
CorrelationSurface rho_bbdl(double kappa, const TenorGrid& grid, int n_mat = kDefaultMatrixSize);
CorrelationSurface rho_bbdl(const OperatorMatrix& m, const TenorGrid& grid);

/// Right eigenvectors P, their inverse and the eigenvalues of M.
struct OperatorEigen {
  Eigen::MatrixXcd p;
  Eigen::MatrixXcd p_inv;
  Eigen::VectorXcd lambda;
  double condition = 0.0;  // ||P||_1 ||P^-1||_1 with unit-norm columns
};

/// Throws Error{NonDiagonalizable} when the eigenvector matrix has
/// condition number above 1e12.
OperatorEigen diagonalize(const OperatorMatrix& m);

/// Smallest real part among the eigenvalues of M.
double min_real_eigenvalue(const OperatorMatrix& m);

/// Equal-time covariance of Delta A at finite tau, including the 2 D factor:
///   2D P (W o F) P^T,  W = P^-1 J^2 P^-T,
///   F_kk' = tau (phi(x l_k)/l_k^2 + phi(x l_k')/l_k'^2) / (l_k + l_k'),
/// with x = dt/tau and phi(y) = y - 1 + exp(-y). The epsilon term is not
/// included. Restricted to the grid rows when a grid is passed.
Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorMatrix& m, const DynamicsParams& dyn);
Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorMatrix& m, const DynamicsParams& dyn,
                                    const TenorGrid& grid);
Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorEigen& eig, const DynamicsParams& dyn,
                                    const std::vector<int>& rows);

/// tau >> dt limit: 2D (dt^2/tau) P (W o [1/(l_k + l_k')]) P^T.
Eigen::MatrixXd cov_bbdl_large_tau(const OperatorMatrix& m, const DynamicsParams& dyn);

/// phi(y) = y - 1 + exp(-y) for complex y.
std::complex<double> ou_integral_kernel(std::complex<double> y);

}  // namespace frc
