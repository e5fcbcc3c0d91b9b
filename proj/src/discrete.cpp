#include "frc/discrete.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace frc {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kGaussPoints = 20;
constexpr std::size_t kMaxNodes = 1u << 15;
constexpr double kQuadTol = 1e-10;

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule composite_rule(std::size_t panels) {
  using gauss = boost::math::quadrature::gauss<double, kGaussPoints>;
  const auto& x = gauss::abscissa();
  const auto& w = gauss::weights();
  Rule rule;
  rule.nodes.reserve(panels * kGaussPoints);
  rule.weights.reserve(panels * kGaussPoints);
  const double h = kPi / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        rule.nodes.push_back(mid + sign * 0.5 * h * x[i]);
        rule.weights.push_back(0.5 * h * w[i]);
      }
    }
  }
  return rule;
}

Eigen::MatrixXd apply_rule(const Rule& rule, const std::function<double(double)>& weight,
                           const Eigen::VectorXd& z) {
  const auto n = z.size();
  const auto m = static_cast<Eigen::Index>(rule.nodes.size());
  Eigen::MatrixXd c(n, m);
  Eigen::VectorXd w(m);
  for (Eigen::Index q = 0; q < m; ++q) {
    const double xi = rule.nodes[static_cast<std::size_t>(q)];
    w[q] = rule.weights[static_cast<std::size_t>(q)] * weight(xi);
    for (Eigen::Index i = 0; i < n; ++i) c(i, q) = std::cos(xi * z[i]);
  }
  Eigen::MatrixXd out = (2.0 / kPi) * c * w.asDiagonal() * c.transpose();
  return 0.5 * (out + out.transpose());
}

double one_minus_cos(double xi) {
  const double s = std::sin(0.5 * xi);
  return 2.0 * s * s;
}

void check_symbol(const DiscreteSymbol& sym) {
  if (!(sym.mu > 0.0)) throw Error(Errc::NonPositiveParameter, "mu must be positive");
  if (!(sym.nu > 0.0)) throw Error(Errc::NonPositiveParameter, "nu must be positive");
}

// The two poles inside the unit circle of the contour integrand. Each root
// alpha of the symbol's quadratic in u = z - 2 + 1/z yields the pair
// z + 1/z = 2 + alpha; the inner member is the reciprocal of the outer one.
std::vector<cplx> inner_poles(const DiscreteSymbol& sym, std::vector<cplx>& all) {
  std::vector<cplx> alphas;
  if (std::isinf(sym.nu)) {
    alphas.push_back(sym.mu * sym.mu);
  } else {
    const double nu4 = std::pow(sym.nu, 4);
    const cplx disc = std::sqrt(cplx(1.0 - 4.0 * std::pow(sym.mu / sym.nu, 4), 0.0));
    const cplx plus = nu4 / (2.0 * sym.mu * sym.mu) * (1.0 + disc);
    alphas.push_back(plus);
    alphas.push_back(nu4 / plus);
  }
  std::vector<cplx> inner;
  all.clear();
  for (const cplx& a : alphas) {
    const cplx s = std::sqrt(a * (a + 4.0));
    const cplx w1 = 1.0 + 0.5 * a + 0.5 * s;
    const cplx w2 = 1.0 + 0.5 * a - 0.5 * s;
    const cplx outer = std::abs(w1) >= std::abs(w2) ? w1 : w2;
    const cplx in = 1.0 / outer;
    if (!(std::abs(in) < 1.0 - 1e-12)) {
      throw Error(Errc::DegenerateRoots, "a pole of the lattice symbol lies on the unit circle");
    }
    inner.push_back(in);
    all.push_back(in);
    all.push_back(outer);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (std::abs(all[i] - all[j]) < 1e-7 * std::max(1.0, std::abs(all[i]))) {
        throw Error(Errc::DegenerateRoots, "poles of the lattice symbol coincide");
      }
    }
  }
  return inner;
}

}  // namespace

double l_d(const DiscreteSymbol& sym, double xi) {
  const double c = one_minus_cos(xi);
  double v = 1.0 + 2.0 * c / (sym.mu * sym.mu);
  if (std::isfinite(sym.nu)) v += 4.0 * c * c / std::pow(sym.nu, 4);
  return v;
}

Eigen::MatrixXd cosine_transform_matrix(const std::function<double(double)>& weight,
                                        const Eigen::VectorXd& z) {
  const double zmax = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
  std::size_t panels = 4;
  while (panels * kGaussPoints < 4 * static_cast<std::size_t>(zmax + 1.0)) panels *= 2;
  Eigen::MatrixXd prev = apply_rule(composite_rule(panels), weight, z);
  while (2 * panels * kGaussPoints <= kMaxNodes) {
    panels *= 2;
    Eigen::MatrixXd next = apply_rule(composite_rule(panels), weight, z);
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    const double diff = (next - prev).cwiseAbs().maxCoeff();
    if (!std::isfinite(diff)) break;
    if (diff < kQuadTol * scale) return next;
    prev = std::move(next);
  }
  throw Error(Errc::QuadratureNonConvergence, "cosine transform did not converge within 2^15 nodes");
}

Eigen::MatrixXd d_k_matrix(const DiscreteSymbol& sym, int k, const Eigen::VectorXd& z) {
  check_symbol(sym);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  return cosine_transform_matrix([&](double xi) { return std::pow(l_d(sym, xi), -k); }, z);
}

double d_k_quadrature(const DiscreteSymbol& sym, int k, double theta, double theta_p) {
  if (!(theta >= 0.0) || !(theta_p >= 0.0)) throw Error(Errc::InvalidArgument, "tenors must be non-negative");
  Eigen::Vector2d z(theta, theta_p);
  return d_k_matrix(sym, k, z)(0, 1);
}

double d_k_residue(const DiscreteSymbol& sym, int k, int theta, int theta_p) {
  check_symbol(sym);
  if (k != 1 && k != 2) throw Error(Errc::InvalidArgument, "residue forms exist for k = 1, 2");
  if (theta < 0 || theta_p < 0) throw Error(Errc::InvalidArgument, "tenors must be non-negative");
  std::vector<cplx> all;
  const std::vector<cplx> inner = inner_poles(sym, all);
  const bool finite_nu = std::isfinite(sym.nu);
  // Integrand c (z^(a+m) + z^(b+m)) / prod (z - r)^k.
  const int m = finite_nu ? 2 * k - 1 : k - 1;
  const double c = finite_nu ? std::pow(sym.nu, 4 * k) : std::pow(-sym.mu * sym.mu, k);
  const int ea = std::abs(theta - theta_p) + m;
  const int eb = theta + theta_p + m;
  auto numer = [&](cplx z) { return c * (std::pow(z, ea) + std::pow(z, eb)); };
  auto dnumer = [&](cplx z) {
    cplx v = 0.0;
    if (ea > 0) v += static_cast<double>(ea) * std::pow(z, ea - 1);
    if (eb > 0) v += static_cast<double>(eb) * std::pow(z, eb - 1);
    return c * v;
  };
  cplx total = 0.0;
  for (const cplx& r : inner) {
    cplx prod = 1.0;
    cplx inv_sum = 0.0;
    for (const cplx& s : all) {
      if (s == r) continue;
      prod *= r - s;
      inv_sum += 1.0 / (r - s);
    }
    if (k == 1) {
      total += numer(r) / prod;
    } else {
      total += (dnumer(r) - 2.0 * numer(r) * inv_sum) / (prod * prod);
    }
  }
  return total.real();
}

double d_1_residue(const DiscreteSymbol& sym, int theta, int theta_p) {
  return d_k_residue(sym, 1, theta, theta_p);
}

double d_2_residue(const DiscreteSymbol& sym, int theta, int theta_p) {
  return d_k_residue(sym, 2, theta, theta_p);
}

double propagator(const DiscreteSymbol& sym, double tau, int theta, int theta_p, double dt) {
  check_symbol(sym);
  if (!(tau > 0.0)) throw Error(Errc::NonPositiveParameter, "tau must be positive");
  if (!(dt >= 0.0)) throw Error(Errc::InvalidArgument, "dt must be non-negative");
  if (theta < 0 || theta_p < 0) throw Error(Errc::InvalidArgument, "tenors must be non-negative");
  Eigen::Vector2d z(theta, theta_p);
  return cosine_transform_matrix([&](double xi) { return std::exp(-l_d(sym, xi) * dt / tau); }, z)(0, 1);
}

PsyTimeSpec discrete_clock(const ModelParams& params) {
  if (params.variant != Variant::BBD3 && params.variant != Variant::BBD2) {
    throw Error(Errc::InvalidArgument, "discrete clock needs a BBD3 or BBD2 parameter set");
  }
  return PsyTimeSpec::log_hyperbolic(psi_months_to_tenor_units(*params.psi));
}

double rho_bbd(const DiscreteSymbol& sym, const PsyTimeSpec& clock, double theta, double theta_p) {
  Eigen::Vector2d z(perceived_time(clock, theta), perceived_time(clock, theta_p));
  const Eigen::MatrixXd d = d_k_matrix(sym, 2, z);
  return std::clamp(d(0, 1) / std::sqrt(d(0, 0) * d(1, 1)), -1.0, 1.0);
}

CorrelationSurface discrete_surface(const ModelParams& params, const TenorGrid& grid) {
  validate_params(params);
  const PsyTimeSpec clock = discrete_clock(params);
  const DiscreteSymbol sym{*params.mu, params.nu_or_inf()};
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = perceived_time(clock, grid[static_cast<std::size_t>(i)]);
  return CorrelationSurface::from_covariance(grid, d_k_matrix(sym, 2, z));
}

double ou_integral_kernel(double y) {
  if (std::abs(y) < 0.1) {
    double term = y * y / 2.0;
    double sum = 0.0;
    for (int j = 3; j < 14; ++j) {
      sum += term;
      term *= -y / j;
    }
    return sum;
  }
  return y + std::expm1(-y);
}

Eigen::MatrixXd cov_delta_a_finite_tau_matrix(const DiscreteSymbol& sym, const PsyTimeSpec& clock,
                                              const DynamicsParams& dyn, const TenorGrid& grid) {
  check_symbol(sym);
  dyn.validate();
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = perceived_time(clock, grid[static_cast<std::size_t>(i)]);
  auto weight = [&](double xi) {
    const double l = l_d(sym, xi);
    return dyn.tau / (l * l * l) * ou_integral_kernel(l * dyn.delta_t / dyn.tau);
  };
  return 2.0 * dyn.big_d * cosine_transform_matrix(weight, z);
}

double cov_delta_a_finite_tau(const DiscreteSymbol& sym, const PsyTimeSpec& clock,
                              const DynamicsParams& dyn, double theta, double theta_p) {
  check_symbol(sym);
  dyn.validate();
  Eigen::Vector2d z(perceived_time(clock, theta), perceived_time(clock, theta_p));
  auto weight = [&](double xi) {
    const double l = l_d(sym, xi);
    return dyn.tau / (l * l * l) * ou_integral_kernel(l * dyn.delta_t / dyn.tau);
  };
  return 2.0 * dyn.big_d * cosine_transform_matrix(weight, z)(0, 1);
}

}  // namespace frc
