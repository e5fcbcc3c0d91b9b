#include "frc/continuous.hpp"

#include <cmath>
#include <limits>

namespace frc {

namespace {

using cplx = std::complex<double>;

// F(theta, theta', p) = (p/2)(exp(-p(theta+theta')) + exp(-p|theta-theta'|))
cplx image_kernel(double theta, double theta_p, cplx p) {
  return 0.5 * p * (std::exp(-p * (theta + theta_p)) + std::exp(-p * std::abs(theta - theta_p)));
}

void check_tenors(double theta, double theta_p) {
  if (!(theta >= 0.0) || !(theta_p >= 0.0)) throw Error(Errc::InvalidArgument, "tenors must be non-negative");
}

void check_params(const StiffStringParams& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw Error(Errc::NonPositiveParameter, "mu must be positive and finite");
  if (!(p.nu > 0.0)) throw Error(Errc::NonPositiveParameter, "nu must be positive");
}

}  // namespace

std::pair<cplx, cplx> alpha_pm(const StiffStringParams& p) {
  check_params(p);
  if (!std::isfinite(p.nu)) throw Error(Errc::InvalidArgument, "alpha_pm needs a finite nu");
  const double ratio = p.mu / p.nu;
  const double nu4 = std::pow(p.nu, 4);
  const cplx disc = std::sqrt(cplx(1.0 - 4.0 * std::pow(ratio, 4), 0.0));
  const cplx plus = nu4 / (2.0 * p.mu * p.mu) * (1.0 + disc);
  const cplx minus = nu4 / plus;
  return {plus, minus};
}

double d_bb_direct(const StiffStringParams& p, double theta, double theta_p) {
  check_tenors(theta, theta_p);
  const auto [ap, am] = alpha_pm(p);
  if (std::abs(ap - am) < 1e-9 * std::abs(ap)) {
    throw Error(Errc::DegenerateRoots, "alpha_plus and alpha_minus coincide");
  }
  const double nu4 = std::pow(p.nu, 4);
  const cplx term_minus = image_kernel(theta, theta_p, std::sqrt(am)) / am;
  const cplx term_plus = image_kernel(theta, theta_p, std::sqrt(ap)) / ap;
  const cplx prefactor = nu4 / (ap - am);
  const cplx value = prefactor * (term_minus - term_plus);
  const double scale = std::abs(prefactor) * (std::abs(term_minus) + std::abs(term_plus));
  if (std::abs(value.imag()) > 1e-10 * scale + std::numeric_limits<double>::min()) {
    throw Error(Errc::NumericalBreakdown, "stiff string correlator has a non-negligible imaginary part");
  }
  return value.real();
}

double d_bb(const StiffStringParams& p, double theta, double theta_p) {
  check_params(p);
  check_tenors(theta, theta_p);
  if (std::isinf(p.nu)) {
    return 0.5 * p.mu * (std::exp(-p.mu * (theta + theta_p)) + std::exp(-p.mu * std::abs(theta - theta_p)));
  }
  try {
    return d_bb_direct(p, theta, theta_p);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateRoots) throw;
  }
  constexpr double shift = 1e-6;
  const double lo = d_bb_direct({p.mu, p.nu * (1.0 - shift)}, theta, theta_p);
  const double hi = d_bb_direct({p.mu, p.nu * (1.0 + shift)}, theta, theta_p);
  return 0.5 * (lo + hi);
}

double rho_bbl(const StiffStringParams& p, const PsyTimeSpec& clock, double theta, double theta_p) {
  const double z = perceived_time(clock, theta);
  const double zp = perceived_time(clock, theta_p);
  if (z == zp) return 1.0;
  const double v = d_bb(p, z, zp) / std::sqrt(d_bb(p, z, z) * d_bb(p, zp, zp));
  return std::clamp(v, -1.0, 1.0);
}

CorrelationSurface continuous_surface(const ModelParams& params, const TenorGrid& grid) {
  validate_params(params);
  StiffStringParams string{*params.mu, params.nu_or_inf()};
  PsyTimeSpec clock;
  switch (params.variant) {
    case Variant::BB04:
      clock = PsyTimeSpec::power_law(*params.psi_bar);
      break;
    case Variant::BBL3:
    case Variant::BBL2:
      clock = PsyTimeSpec::log_hyperbolic(psi_months_to_tenor_units(*params.psi));
      break;
    default:
      throw Error(Errc::InvalidArgument, "continuous_surface handles BB04, BBL3 and BBL2 only");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = perceived_time(clock, grid[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) cov(i, j) = cov(j, i) = d_bb(string, z[i], z[j]);
  }
  return CorrelationSurface::from_covariance(grid, cov);
}

}  // namespace frc
