#include "frc/band_lu.hpp"

#include "frc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frc {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), data_(Eigen::MatrixXd::Zero(n, kl + ku + 1)) {
  if (n < 1 || kl < 0 || ku < 0) throw Error(Errc::InvalidArgument, "invalid band shape");
}

double BandedMatrix::operator()(int i, int j) const {
  if (!in_band(i, j)) return 0.0;
  return data_(i, j - i + kl_);
}

double& BandedMatrix::at(int i, int j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j)) {
    throw Error(Errc::InvalidArgument, "banded entry outside the band");
  }
  return data_(i, j - i + kl_);
}

Eigen::MatrixXd BandedMatrix::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) out(i, j) = (*this)(i, j);
  }
  return out;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) y[i] += (*this)(i, j) * x[j];
  }
  return y;
}

BandLU::BandLU(const BandedMatrix& a)
    : n_(a.size()), kl_(a.lower()), ku_(a.lower() + a.upper()),
      u_(Eigen::MatrixXd::Zero(a.size(), a.lower() + a.lower() + a.upper() + 1)),
      l_(Eigen::MatrixXd::Zero(a.size(), std::max(1, a.lower()))),
      piv_(static_cast<std::size_t>(a.size())) {
  // Working storage: row i holds columns i - kl .. i + kl + ku.
  const int width = 2 * kl_ + a.upper() + 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, width);
  auto idx = [&](int i, int j) { return j - i + kl_; };
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + a.upper()); ++j) w(i, idx(i, j)) = a(i, j);
  }
  double umin = std::numeric_limits<double>::infinity();
  double umax = 0.0;
  for (int k = 0; k < n_; ++k) {
    const int last_row = std::min(n_ - 1, k + kl_);
    const int last_col = std::min(n_ - 1, k + ku_);
    int p = k;
    for (int i = k + 1; i <= last_row; ++i) {
      if (std::abs(w(i, idx(i, k))) > std::abs(w(p, idx(p, k)))) p = i;
    }
    piv_[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      for (int j = k; j <= last_col; ++j) std::swap(w(k, idx(k, j)), w(p, idx(p, j)));
    }
    const double pivot = w(k, idx(k, k));
    umin = std::min(umin, std::abs(pivot));
    umax = std::max(umax, std::abs(pivot));
    if (pivot == 0.0) continue;
    for (int i = k + 1; i <= last_row; ++i) {
      const double m = w(i, idx(i, k)) / pivot;
      l_(k, i - k - 1) = m;
      if (m == 0.0) continue;
      for (int j = k + 1; j <= last_col; ++j) w(i, idx(i, j)) -= m * w(k, idx(k, j));
    }
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j <= std::min(n_ - 1, i + ku_); ++j) u_(i, j - i) = w(i, idx(i, j));
  }
  pivot_ratio_ = (umax > 0.0 && umin > 0.0) ? umin / umax : 0.0;
}

void BandLU::solve_in_place(Eigen::MatrixXd& b) const {
  if (b.rows() != n_) throw Error(Errc::InvalidArgument, "right-hand side has the wrong size");
  for (int k = 0; k < n_; ++k) {
    const int p = piv_[static_cast<std::size_t>(k)];
    if (p != k) b.row(k).swap(b.row(p));
    for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
      const double m = l_(k, i - k - 1);
      if (m != 0.0) b.row(i) -= m * b.row(k);
    }
  }
  for (int i = n_ - 1; i >= 0; --i) {
    for (int j = i + 1; j <= std::min(n_ - 1, i + ku_); ++j) {
      const double uij = u_(i, j - i);
      if (uij != 0.0) b.row(i) -= uij * b.row(j);
    }
    b.row(i) /= u_(i, 0);
  }
}

void BandLU::solve_transpose_in_place(Eigen::MatrixXd& b) const {
  if (b.rows() != n_) throw Error(Errc::InvalidArgument, "right-hand side has the wrong size");
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - ku_); j < i; ++j) {
      const double uji = u_(j, i - j);
      if (uji != 0.0) b.row(i) -= uji * b.row(j);
    }
    b.row(i) /= u_(i, 0);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
      const double m = l_(k, i - k - 1);
      if (m != 0.0) b.row(k) -= m * b.row(i);
    }
    const int p = piv_[static_cast<std::size_t>(k)];
    if (p != k) b.row(k).swap(b.row(p));
  }
}

}  // namespace frc
