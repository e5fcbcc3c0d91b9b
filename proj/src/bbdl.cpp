#include "frc/bbdl.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace frc {

namespace {

using cplx = std::complex<double>;

constexpr double kSingularPivotRatio = 1e-13;
constexpr double kMaxEigenCondition = 1e12;

void add_folded(BandedMatrix& m, int row, int col, double value) {
  if (col < 0) col = -col;
  if (col >= m.size()) return;
  m.at(row, col) += value;
}

// Pentadiagonal stencil with coefficient a(theta) multiplying the derivative
// bands; kappa1 = mu psi and kappa2 = nu psi.
BandedMatrix pentadiagonal(int n, double kappa1, double kappa2, double shift) {
  BandedMatrix m(n, 2, 2);
  const double inv_k1 = 1.0 / (kappa1 * kappa1);
  const double inv_k2 = std::isinf(kappa2) ? 0.0 : 1.0 / std::pow(kappa2, 4);
  for (int t = 0; t < n; ++t) {
    const double a = shift + t;
    const double c1 = a * (inv_k2 - inv_k1);
    const double c2 = a * a * (7.0 * inv_k2 - inv_k1);
    const double c3 = 6.0 * a * a * a * inv_k2;
    const double c4 = a * a * a * a * inv_k2;
    const double band[5] = {
        -0.5 * c3 + c4,                    // offset -2
        -0.5 * c1 + c2 + c3 - 4.0 * c4,    // offset -1
        1.0 - 2.0 * c2 + 6.0 * c4,         // offset 0
        0.5 * c1 + c2 - c3 - 4.0 * c4,     // offset +1
        0.5 * c3 + c4,                     // offset +2
    };
    for (int d = -2; d <= 2; ++d) add_folded(m, t, t + d, band[d + 2]);
  }
  return m;
}

BandLU factorize(const OperatorMatrix& m) {
  BandLU lu(m.entries);
  if (lu.pivot_ratio() < kSingularPivotRatio) {
    throw Error(Errc::SingularOperator, "relaxation operator is numerically singular");
  }
  return lu;
}

void check_grid_fits(const TenorGrid& grid, int n_mat) {
  if (grid.empty()) throw Error(Errc::InvalidGrid, "empty tenor grid");
  if (grid.max_tenor() >= n_mat - kBoundaryMargin) {
    throw Error(Errc::SizeTooSmall, "operator size must exceed the largest tenor by " +
                                        std::to_string(kBoundaryMargin) + " rows");
  }
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& c) {
  const double scale = c.real().cwiseAbs().maxCoeff();
  if (c.imag().cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(Errc::NumericalBreakdown, "finite-tau covariance has a non-negligible imaginary part");
  }
  Eigen::MatrixXd r = c.real();
  return 0.5 * (r + r.transpose());
}

Eigen::MatrixXcd weight_matrix(const OperatorEigen& eig) {
  Eigen::MatrixXcd w = eig.p_inv;
  w.col(0) *= 4.0;  // P^-1 J^2
  return w * eig.p_inv.transpose();
}

std::vector<int> all_rows(int n) {
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  return rows;
}

std::vector<int> grid_rows(const OperatorMatrix& m, const TenorGrid& grid) {
  if (grid.max_tenor() >= m.size) throw Error(Errc::SizeTooSmall, "grid exceeds the operator size");
  return grid.tenors();
}

Eigen::MatrixXcd sandwich(const OperatorEigen& eig, const Eigen::MatrixXcd& inner, const std::vector<int>& rows) {
  Eigen::MatrixXcd pg(static_cast<Eigen::Index>(rows.size()), eig.p.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) pg.row(static_cast<Eigen::Index>(i)) = eig.p.row(rows[i]);
  return pg * inner * pg.transpose();
}

}  // namespace

OperatorMatrix build_m(double kappa, int n_mat, std::optional<double> kappa2) {
  if (!(kappa > 0.0)) throw Error(Errc::NonPositiveParameter, "kappa must be positive");
  if (n_mat < 3) throw Error(Errc::SizeTooSmall, "operator size must be at least 3");
  OperatorMatrix m;
  m.size = n_mat;
  m.kappa = kappa;
  if (kappa2) {
    if (!(*kappa2 > 0.0)) throw Error(Errc::NonPositiveParameter, "kappa2 must be positive");
    m.form = OperatorForm::General;
    m.kappa2 = kappa2;
    m.entries = pentadiagonal(n_mat, kappa, *kappa2, 0.0);
    return m;
  }
  m.form = OperatorForm::KappaLimit;
  m.entries = BandedMatrix(n_mat, 1, 1);
  const double k2 = kappa * kappa;
  for (int t = 0; t < n_mat; ++t) {
    const double th = t;
    m.entries.at(t, t) = 1.0 + 2.0 * th * th / k2;
    if (t + 1 < n_mat) m.entries.at(t, t + 1) = -(th + th * th) / k2;
    if (t > 0) m.entries.at(t, t - 1) = (th - th * th) / k2;
  }
  return m;
}

OperatorMatrix build_m_finite_psi(double psi, double mu, double nu, int n_mat) {
  if (!(psi > 0.0) || !(mu > 0.0) || !(nu > 0.0)) {
    throw Error(Errc::NonPositiveParameter, "psi, mu and nu must be positive");
  }
  if (n_mat < 3) throw Error(Errc::SizeTooSmall, "operator size must be at least 3");
  OperatorMatrix m;
  m.form = OperatorForm::FinitePsi;
  m.size = n_mat;
  m.kappa = mu * psi;
  m.kappa2 = nu * psi;
  m.psi = psi;
  m.entries = pentadiagonal(n_mat, mu * psi, nu * psi, psi);
  return m;
}

Eigen::VectorXd image_boundary_diagonal(int n) {
  Eigen::VectorXd j = Eigen::VectorXd::Ones(n);
  if (n > 0) j[0] = 2.0;
  return j;
}

Eigen::MatrixXd cov_bbdl(const OperatorMatrix& m) {
  const BandLU lu = factorize(m);
  Eigen::MatrixXd x = image_boundary_diagonal(m.size).asDiagonal();
  lu.solve_in_place(x);
  Eigen::MatrixXd c = x * x.transpose();
  return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd cov_bbdl_grid(const OperatorMatrix& m, const TenorGrid& grid) {
  const std::vector<int> rows = grid_rows(m, grid);
  const BandLU lu = factorize(m);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m.size, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(rows[i], static_cast<Eigen::Index>(i)) = 1.0;
  lu.solve_transpose_in_place(y);
  y.row(0) *= 2.0;
  Eigen::MatrixXd c = y.transpose() * y;
  return 0.5 * (c + c.transpose());
}

CorrelationSurface rho_bbdl(double kappa, const TenorGrid& grid, int n_mat) {
  check_grid_fits(grid, n_mat);
  return rho_bbdl(build_m(kappa, n_mat), grid);
}

CorrelationSurface rho_bbdl(const OperatorMatrix& m, const TenorGrid& grid) {
  check_grid_fits(grid, m.size);
  return CorrelationSurface::from_covariance(grid, cov_bbdl_grid(m, grid));
}

OperatorEigen diagonalize(const OperatorMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.dense(), true);
  if (es.info() != Eigen::Success) throw Error(Errc::NonDiagonalizable, "eigen decomposition failed");
  OperatorEigen out;
  out.p = es.eigenvectors();
  out.lambda = es.eigenvalues();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(out.p);
  out.p_inv = lu.inverse();
  const double norm_p = out.p.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inv = out.p_inv.cwiseAbs().colwise().sum().maxCoeff();
  out.condition = norm_p * norm_inv;
  if (!std::isfinite(out.condition) || out.condition > kMaxEigenCondition) {
    throw Error(Errc::NonDiagonalizable, "eigenvector matrix is ill-conditioned");
  }
  return out;
}

double min_real_eigenvalue(const OperatorMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.dense(), false);
  if (es.info() != Eigen::Success) throw Error(Errc::NumericalBreakdown, "eigenvalue computation failed");
  return es.eigenvalues().real().minCoeff();
}

cplx ou_integral_kernel(cplx y) {
  if (std::abs(y) < 0.1) {
    cplx term = y * y / 2.0;
    cplx sum = 0.0;
    for (int j = 3; j < 14; ++j) {
      sum += term;
      term *= -y / static_cast<double>(j);
    }
    return sum;
  }
  return y - 1.0 + std::exp(-y);
}

Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorEigen& eig, const DynamicsParams& dyn,
                                    const std::vector<int>& rows) {
  dyn.validate();
  const Eigen::Index n = eig.lambda.size();
  const double x = dyn.delta_t / dyn.tau;
  Eigen::VectorXcd g(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx l = eig.lambda[k];
    g[k] = ou_integral_kernel(x * l) / (l * l);
  }
  Eigen::MatrixXcd inner = weight_matrix(eig);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      inner(i, j) *= dyn.tau * (g[i] + g[j]) / (eig.lambda[i] + eig.lambda[j]);
    }
  }
  return 2.0 * dyn.big_d * realify(sandwich(eig, inner, rows));
}

Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorMatrix& m, const DynamicsParams& dyn) {
  return cov_bbdl_finite_tau(diagonalize(m), dyn, all_rows(m.size));
}

Eigen::MatrixXd cov_bbdl_finite_tau(const OperatorMatrix& m, const DynamicsParams& dyn,
                                    const TenorGrid& grid) {
  return cov_bbdl_finite_tau(diagonalize(m), dyn, grid_rows(m, grid));
}

Eigen::MatrixXd cov_bbdl_large_tau(const OperatorMatrix& m, const DynamicsParams& dyn) {
  dyn.validate();
  const OperatorEigen eig = diagonalize(m);
  const Eigen::Index n = eig.lambda.size();
  Eigen::MatrixXcd inner = weight_matrix(eig);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) inner(i, j) /= eig.lambda[i] + eig.lambda[j];
  }
  const double scale = 2.0 * dyn.big_d * dyn.delta_t * dyn.delta_t / dyn.tau;
  return scale * realify(sandwich(eig, inner, all_rows(m.size)));
}

}  // namespace frc
