// End-to-end acceptance checks, one PASS/FAIL line each. Exit status counts
// outcomes that differ from expectation (see --expect-fail).
#include "frc/bbdl.hpp"
#include "frc/calib.hpp"
#include "frc/core.hpp"
#include "frc/discrete.hpp"
#include "frc/empirics.hpp"
#include "frc/models.hpp"
#include "frc/psytime.hpp"
#include "frc/rng.hpp"
#include "frc/sim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace frc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Residue closed forms against the quadrature on [0,40]^2.
Outcome residues() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<DiscreteSymbol> syms = {{1.06, 2.21}, {0.5, 0.9}, {2.0, 3.5}, {1.3, std::numeric_limits<double>::infinity()}};
  Eigen::VectorXd z(41);
  for (int i = 0; i <= 40; ++i) z[i] = i;
  double worst = 0.0;
  for (const auto& s : syms) {
    for (int k = 1; k <= 2; ++k) {
      const Eigen::MatrixXd q = d_k_matrix(s, k, z);
      for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 40; ++j) worst = std::max(worst, std::abs(q(i, j) - d_k_residue(s, k, i, j)));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0, fmt("max |residue - quadrature| = %.2e over 4 symbols, %.2f s", worst, secs)};
}

// Langevin simulation against the stationary covariance.
Outcome monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kTenors = 10;
  const double delta_t = 1.0;
  SimConfig cfg;
  cfg.op = SimOperator::MMatrix;
  cfg.kappa = 0.92;
  cfg.n_tenors = kTenors + 1;
  cfg.matrix = build_m(cfg.kappa, cfg.n_tenors);
  cfg.tau = 0.01 * delta_t;
  cfg.big_d = 0.5;
  cfg.dt_step = cfg.tau / 10.0;
  const long per_bin = std::lround(delta_t / cfg.dt_step);
  const long bins = 50000;
  cfg.n_steps = per_bin * bins;
  cfg.burn_in = 10 * std::lround(cfg.tau / cfg.dt_step);
  cfg.record_stride = per_bin;
  cfg.seed = 11;
  const NoiseFieldPath path = simulate(cfg);
  const SampleCovariance sc = sample_equal_time_cov(path, delta_t);
  const TenorGrid grid = TenorGrid::contiguous(kTenors);
  const Eigen::MatrixXd target = 2.0 * cfg.big_d * delta_t * cov_bbdl_grid(*cfg.matrix, grid);
  double worst_z = 0.0;
  for (int i = 0; i < kTenors; ++i) {
    for (int j = 0; j < kTenors; ++j) {
      const double z = std::abs(sc.cov(i + 1, j + 1) - target(i, j)) / sc.std_error(i + 1, j + 1);
      worst_z = std::max(worst_z, z);
    }
  }
  const double secs = seconds_since(t0);
  return {worst_z <= 3.0 && secs < 300.0 && sc.n_bins >= 50000,
          fmt("%ld bins, max |sample - analytic| / se = %.2f, %.1f s", sc.n_bins, worst_z, secs)};
}

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

// Small and large tau limits of both finite-tau covariances.
Outcome limits() {
  const TenorGrid grid = TenorGrid::contiguous(39);
  const OperatorMatrix m = build_m(0.92, 200);
  DynamicsParams dyn;
  dyn.big_d = 0.5;
  dyn.delta_t = 1.0;

  dyn.tau = 1e-8;
  const double bbdl_small = max_rel(cov_bbdl_finite_tau(m, dyn, grid), 2.0 * dyn.big_d * dyn.delta_t * cov_bbdl_grid(m, grid));
  dyn.tau = 1e8;
  const Eigen::MatrixXd full = cov_bbdl_large_tau(m, dyn);
  Eigen::MatrixXd large(39, 39);
  for (int i = 0; i < 39; ++i) {
    for (int j = 0; j < 39; ++j) large(i, j) = full(grid[i], grid[j]);
  }
  const double bbdl_large = max_rel(cov_bbdl_finite_tau(m, dyn, grid), large);

  const DiscreteSymbol sym{1.06, 2.21};
  const PsyTimeSpec clock = PsyTimeSpec::identity();
  Eigen::MatrixXd d1(39, 39), d2(39, 39);
  for (int i = 0; i < 39; ++i) {
    for (int j = 0; j < 39; ++j) {
      d1(i, j) = d_1_residue(sym, grid[i], grid[j]);
      d2(i, j) = d_2_residue(sym, grid[i], grid[j]);
    }
  }
  dyn.tau = 1e-8;
  const double psi_small = max_rel(cov_delta_a_finite_tau_matrix(sym, clock, dyn, grid), 2.0 * dyn.big_d * dyn.delta_t * d2);
  dyn.tau = 1e8;
  const double psi_large = max_rel(cov_delta_a_finite_tau_matrix(sym, clock, dyn, grid),
                                   dyn.big_d * dyn.delta_t * dyn.delta_t / dyn.tau * d1);
  const bool ok = bbdl_small <= 1e-6 && bbdl_large <= 1e-4 && psi_small <= 1e-6 && psi_large <= 1e-4;
  return {ok, fmt("bbdl small %.1e large %.1e; stiff string small %.1e large %.1e", bbdl_small, bbdl_large,
                  psi_small, psi_large)};
}

// Noiseless round trips.
Outcome round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  const TenorGrid grid = TenorGrid::contiguous(39);
  const CorrelationSurface bbdl_surface = rho_bbdl(0.92, grid);
  FitOptions opt;
  const FitReport r = fit(Variant::BBDL, bbdl_surface, opt);
  const double kappa = *r.params.kappa;
  int good = 0;
  for (const auto& s : r.starts) {
    if (s.converged && std::abs(s.result[0] - 0.92) <= 1e-3) ++good;
  }

  const ModelParams truth = ModelParams::bbd2(6.0, 0.8);
  const double product = psi_months_to_tenor_units(*truth.psi) * *truth.mu;
  const CorrelationSurface bbd2_surface = model_surface(truth, grid);
  const FitReport r2 = fit(Variant::BBD2, bbd2_surface, opt);
  const double product2 = psi_months_to_tenor_units(*r2.params.psi) * *r2.params.mu;
  int good2 = 0;
  for (const auto& s : r2.starts) {
    if (s.converged && std::abs(psi_months_to_tenor_units(s.result[0]) * s.result[1] / product - 1.0) <= 1e-2) ++good2;
  }
  const double secs = seconds_since(t0);
  const double rel2 = std::abs(product2 / product - 1.0);
  const bool ok = std::abs(kappa - 0.92) <= 1e-3 && good >= 8 && rel2 <= 1e-2 && secs < 120.0;
  return {ok, fmt("kappa %.6f (%d/10 starts), bbd2 psi*mu rel err %.1e (%d/10 starts), %.1f s", kappa, good, rel2,
                  good2, secs)};
}

// Sloppy direction at a BBD2 optimum of a slightly noisy surface.
Outcome sloppiness() {
  const TenorGrid grid = TenorGrid::contiguous(39);
  const CorrelationSurface clean = model_surface(ModelParams::bbd2(2.0, 1.01), grid);
  Eigen::MatrixXd v = clean.values();
  NormalStream noise(5, 0);
  for (int i = 0; i < 39; ++i) {
    for (int j = i + 1; j < 39; ++j) {
      v(i, j) = std::clamp(v(i, j) + 1e-3 * noise.next(), -1.0, 1.0);
      v(j, i) = v(i, j);
    }
  }
  const CorrelationSurface noisy(grid, v);
  const FitReport r = fit(Variant::BBD2, noisy);
  const HessianReport h = hessian(Variant::BBD2, r.params, noisy);
  const double ratio = h.eigenvalues[0] / h.eigenvalues[1];
  const Eigen::Vector2d dir = h.eigenvectors.col(0).normalized();
  const double cosang = std::abs(dir.dot(Eigen::Vector2d(1.0, 1.0).normalized()));
  const double angle = std::acos(std::min(1.0, cosang)) * 180.0 / std::acos(-1.0);
  return {ratio > 10.0 && angle <= 10.0,
          fmt("lambda1/lambda2 = %.1f, angle to (1,1) = %.2f deg, richardson %.1e", ratio, angle,
              h.richardson_discrepancy)};
}

// Epps round trip on simulated intraday data.
Outcome epps() {
  const auto t0 = std::chrono::steady_clock::now();
  const double tau_min = 36.0, eps = 1.6e-3;
  const std::pair<int, int> pair{10, 11};
  SimConfig cfg;
  cfg.matrix = build_m(0.92, 40);
  cfg.n_tenors = 40;
  cfg.tau = 60.0 * tau_min;
  cfg.dt_step = 4.0;
  cfg.n_steps = static_cast<long>(8000.0 * 3600.0 / cfg.dt_step);
  cfg.burn_in = static_cast<long>(std::ceil(10.0 * cfg.tau / cfg.dt_step));
  cfg.epsilon = eps;
  cfg.seed = 36;
  const PriceSeries prices = path_to_prices(simulate(cfg), {pair.first, pair.second}, 1e-2);
  std::vector<double> scales;
  for (int k = 0; k < 12; ++k) scales.push_back(4.0 * std::pow(900.0, k / 11.0));
  const EppsCurve curve = epps_curve(prices, pair, scales);
  const EppsModel model = epps_model_bbdl(*cfg.matrix, pair);
  const EppsFit f = fit_epps(curve, model);
  const double tau_err = std::abs(f.tau_minutes / tau_min - 1.0);
  const double eps_err = std::abs(f.epsilon / eps - 1.0);
  const auto& rho = curve.correlations;
  bool rising = true;
  for (std::size_t i = 1; i < rho.size(); ++i) rising &= rho[i] > rho[i - 1] - 0.01;
  const double fitted_hour = epps_model_correlation(model, 60.0 * f.tau_minutes, f.epsilon, scales.back());
  const double plateau = epps_model_correlation(model, 60.0 * tau_min, 0.0, 1e9);
  const double secs = seconds_since(t0);
  const bool shape = std::abs(rho.front()) < 0.05 && rising && std::abs(rho.back() - fitted_hour) < 0.02;
  return {tau_err <= 0.05 && eps_err <= 0.05 && shape,
          fmt("tau %.2f min (%.1f%%), eps %.3e (%.1f%%), rho(4s) %.3f, rho(3600s) %.3f vs fitted %.3f, "
              "long-bin limit %.3f, %.0f s",
              f.tau_minutes, 100 * tau_err, f.epsilon, 100 * eps_err, rho.front(), rho.back(), fitted_hour, plateau,
              secs)};
}

// Anti-diagonal curvature of the BBDL surface.
Outcome curvature() {
  const CurvatureResult c = antidiagonal_curvature(rho_bbdl(0.92, TenorGrid::contiguous(39)));
  bool decreasing = c.points.size() > 1;
  for (std::size_t i = 1; i < c.points.size(); ++i) decreasing &= c.points[i].curvature < c.points[i - 1].curvature;
  return {decreasing, fmt("%zu anti-diagonals, curvature %.4f at Theta=%d to %.4f at Theta=%d", c.points.size(),
                          c.points.front().curvature, c.points.front().big_theta, c.points.back().curvature,
                          c.points.back().big_theta)};
}

// Symmetry, unit diagonal, PSD; product dependence of the full operator.
Outcome invariants() {
  const TenorGrid grid = TenorGrid::contiguous(39);
  const std::vector<ModelParams> params = {
      ModelParams::bb04(0.5, 1.2, 2.5), ModelParams::bbl3(6.0, 1.06, 2.21), ModelParams::bbl2(6.0, 0.9),
      ModelParams::bbd3(6.0, 1.06, 2.21), ModelParams::bbd2(6.0, 0.9),     ModelParams::bbdl(0.92)};
  double asym = 0.0, diag = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto& p : params) {
    const Eigen::MatrixXd v = model_surface(p, grid).values();
    asym = std::max(asym, (v - v.transpose()).cwiseAbs().maxCoeff());
    diag = std::max(diag, (v.diagonal().array() - 1.0).abs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v).eigenvalues().minCoeff());
  }
  const auto full_m = [&](double psi, double mu, double nu) {
    return rho_bbdl(build_m(mu * psi, kDefaultMatrixSize, nu * psi), grid).values();
  };
  const double product = (full_m(1e-3, 920.0, 2210.0) - full_m(2.5e-4, 3680.0, 8840.0)).cwiseAbs().maxCoeff();
  const bool ok = asym == 0.0 && diag == 0.0 && min_eig >= -1e-9 && product <= 1e-6;
  return {ok, fmt("asym %.1e, diag %.1e, min eigenvalue %.2e, equal-product max diff %.1e", asym, diag, min_eig,
                  product)};
}

// Operator size 500 against 800.
Outcome boundary() {
  const TenorGrid grid = TenorGrid::contiguous(39);
  const double diff = (rho_bbdl(0.92, grid, 500).values() - rho_bbdl(0.92, grid, 800).values()).cwiseAbs().maxCoeff();
  return {diff <= 1e-4, fmt("max |rho(500) - rho(800)| = %.2e", diff)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"residue_vs_quadrature", residues}, {"monte_carlo_covariance", monte_carlo},
      {"limit_consistency", limits},       {"round_trip_calibration", round_trip},
      {"sloppiness", sloppiness},          {"epps_round_trip", epps},
      {"curvature_monotone", curvature},   {"structural_invariants", invariants},
      {"boundary_size_stability", boundary}};
  // usage: frc_acceptance [--expect-fail NAME]... [NAME]
  std::vector<std::string> expected_failures;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      expected_failures.emplace_back(argv[++i]);
    } else {
      only = arg;
    }
  }
  int passed = 0, ran = 0, unexpected = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string& name = checks[i].first;
    if (!only.empty() && only != name) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expect_fail = std::find(expected_failures.begin(), expected_failures.end(), name) != expected_failures.end();
    std::printf("%s %zu %s: %s%s\n", o.pass ? "PASS" : "FAIL", i + 1, name.c_str(), o.detail.c_str(),
                expect_fail ? (o.pass ? " (listed as expected failure)" : " (expected failure)") : "");
    std::fflush(stdout);
    ++ran;
    passed += o.pass ? 1 : 0;
    unexpected += o.pass == expect_fail ? 1 : 0;
  }
  std::printf("%d/%d criteria passed\n", passed, ran);
  return unexpected;
}
