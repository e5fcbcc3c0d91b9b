// Banded matrices and their LU factorization with partial pivoting.
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace frc {

/// Square matrix with kl sub-diagonals and ku super-diagonals.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int size() const noexcept { return n_; }
  int lower() const noexcept { return kl_; }
  int upper() const noexcept { return ku_; }
  bool in_band(int i, int j) const noexcept { return j - i >= -kl_ && j - i <= ku_; }

  /// Entry (i, j); zero outside the band.
  double operator()(int i, int j) const;
  /// Mutable entry; (i, j) must lie inside the band.
  double& at(int i, int j);

  Eigen::MatrixXd dense() const;
  /// y = A x
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  Eigen::MatrixXd data_;  // row i, column (j - i + kl)
};

class BandLU {
 public:
  explicit BandLU(const BandedMatrix& a);

  /// Solves A X = B in place.
  void solve_in_place(Eigen::MatrixXd& b) const;
  /// Solves A^T X = B in place.
  void solve_transpose_in_place(Eigen::MatrixXd& b) const;

  Eigen::MatrixXd solve(Eigen::MatrixXd b) const {
    solve_in_place(b);
    return b;
  }
  Eigen::MatrixXd solve_transpose(Eigen::MatrixXd b) const {
    solve_transpose_in_place(b);
    return b;
  }

  /// min |u_kk| / max |u_kk|; zero when a pivot vanished.
  double pivot_ratio() const noexcept { return pivot_ratio_; }

 private:
  int n_, kl_, ku_;
  Eigen::MatrixXd u_;  // row i, column (j - i); width kl + ku + 1
  Eigen::MatrixXd l_;  // row k, multiplier for row k + 1 + r in column r
  std::vector<int> piv_;
  double pivot_ratio_ = 0.0;
};

}  // namespace frc
