#include "frc/bbdl.hpp"
#include "frc/discrete.hpp"
#include "frc/rng.hpp"
#include "frc/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace frc;

namespace {

double variance(const Eigen::VectorXd& x) {
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

OperatorMatrix scalar_operator() {
  OperatorMatrix m;
  m.size = 1;
  m.kappa = std::numeric_limits<double>::infinity();
  m.entries = BandedMatrix(1, 0, 0);
  m.entries.at(0, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0}, {0, 0, 0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0xa4093822, 0x299f31d0}, {0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal streams") {
  NormalStream a(42, 0), b(42, 0), c(42, 1);
  double sum = 0.0, sq = 0.0, cross = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    const double y = c.next();
    CHECK_EQ(x, b.next());
    sum += x;
    sq += x * x;
    cross += x * y;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross / n) < 5.0 / std::sqrt(n));
  CHECK(a.position() == static_cast<std::uint64_t>(n));
}

TEST_CASE("single tenor stationary variance") {
  SimConfig cfg;
  cfg.matrix = scalar_operator();
  cfg.n_tenors = 1;
  cfg.tau = 1.0;
  cfg.big_d = 0.5;
  cfg.dt_step = 0.1;
  cfg.burn_in = 100;
  cfg.n_steps = 400000;
  cfg.record_stride = 10;
  // J^2 D / tau with J = 2 at the boundary
  const NoiseFieldPath m = simulate(cfg);
  CHECK(variance(m.a_values.col(0)) == doctest::Approx(4.0 * cfg.big_d / cfg.tau).epsilon(0.04));

  // stencil: sqrt(2) noise at theta = 0, flat symbol
  cfg.op = SimOperator::LdStencil;
  cfg.matrix.reset();
  cfg.symbol = {1e8, std::numeric_limits<double>::infinity()};
  const NoiseFieldPath s = simulate(cfg);
  CHECK(variance(s.a_values.col(0)) == doctest::Approx(2.0 * cfg.big_d / cfg.tau).epsilon(0.04));

  cfg.integrator = Integrator::EulerMaruyama;
  cfg.dt_step = 0.01;
  cfg.burn_in = 1000;
  cfg.n_steps = 4000000;
  cfg.record_stride = 100;
  const NoiseFieldPath e = simulate(cfg);
  CHECK(variance(e.a_values.col(0)) == doctest::Approx(2.0 * cfg.big_d / cfg.tau).epsilon(0.04));
}

TEST_CASE("stencil simulation reproduces 2 D dt D_2") {
  const DiscreteSymbol sym{1.0, 2.0};
  SimConfig cfg;
  cfg.op = SimOperator::LdStencil;
  cfg.symbol = sym;
  cfg.n_tenors = 14;
  cfg.tau = 0.01;
  cfg.big_d = 0.5;
  cfg.dt_step = 0.001;
  cfg.burn_in = 100;
  cfg.n_steps = 5000000;
  cfg.record_stride = 1000;
  cfg.seed = 3;
  const NoiseFieldPath path = simulate(cfg);
  const SampleCovariance sc = sample_equal_time_cov(path, 1.0);
  int within = 0, total = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double target = 2.0 * cfg.big_d * d_2_residue(sym, i, j);
      within += std::abs(sc.cov(i, j) - target) <= 3.0 * sc.std_error(i, j) ? 1 : 0;
      ++total;
    }
  }
  CHECK(within >= total - 1);
  CHECK(sc.cov(0, 0) == doctest::Approx(2.0 * cfg.big_d * d_2_residue(sym, 0, 0)).epsilon(0.05));
}

TEST_CASE("exact and Euler integrators agree in distribution") {
  SimConfig cfg;
  cfg.kappa = 0.92;
  cfg.n_tenors = 6;
  cfg.tau = 1.0;
  cfg.dt_step = 0.001;
  cfg.burn_in = 10000;
  cfg.n_steps = 4000000;
  cfg.record_stride = 400;
  const Eigen::MatrixXd mexact = simulate(cfg).a_values;
  cfg.integrator = Integrator::EulerMaruyama;
  const Eigen::MatrixXd meuler = simulate(cfg).a_values;
  for (int j = 1; j < 4; ++j) {
    CHECK(variance(meuler.col(j)) == doctest::Approx(variance(mexact.col(j))).epsilon(0.08));
  }
}

TEST_CASE("simulation guards") {
  SimConfig cfg;
  cfg.tau = 1.0;
  cfg.dt_step = 0.2;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg.dt_step = 0.1;
  cfg.burn_in = 50;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg.burn_in = 100;
  cfg.n_steps = 1;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg.n_steps = 100;
  cfg.matrix = build_m(0.92, 5);
  CHECK_THROWS_AS(simulate(cfg), Error);

  SimConfig unstable;
  unstable.op = SimOperator::LdStencil;
  unstable.symbol = {0.05, std::numeric_limits<double>::infinity()};
  unstable.integrator = Integrator::EulerMaruyama;
  unstable.n_tenors = 6;
  unstable.n_steps = 5000;
  try {
    simulate(unstable);
    FAIL("expected UnstableIntegration");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnstableIntegration);
  }
}

TEST_CASE("seeded runs are reproducible") {
  SimConfig cfg;
  cfg.n_tenors = 4;
  cfg.n_steps = 500;
  cfg.epsilon = 0.1;
  const NoiseFieldPath a = simulate(cfg);
  const NoiseFieldPath b = simulate(cfg);
  CHECK(a.integral == b.integral);
  cfg.seed = 8;
  CHECK(simulate(cfg).integral != a.integral);
}

TEST_CASE("binning, price conversion and export") {
  SimConfig cfg;
  cfg.n_tenors = 4;
  cfg.n_steps = 1000;
  cfg.record_stride = 5;
  const NoiseFieldPath p = simulate(cfg);
  CHECK(p.record_dt == doctest::Approx(0.5));
  const Eigen::MatrixXd inc = bin_increments(p, 2.0);
  CHECK(inc.rows() == 50);
  CHECK(inc.row(0) == (p.integral.row(4) - p.integral.row(0)));
  CHECK_THROWS_AS(bin_increments(p, 0.75), Error);
  CHECK_THROWS_AS(sample_equal_time_cov(p, 2.0), Error);

  const PriceSeries prices = path_to_prices(p, {1, 3}, 0.5);
  CHECK(prices.tenors() == std::vector<int>{1, 3});
  CHECK(prices.observations(3)[7].price == doctest::Approx(100.0 - 0.5 * p.integral(7, 3)));
  CHECK_THROWS_AS(path_to_prices(p, {0}), Error);

  Eigen::VectorXd sigma(4);
  sigma << 1.0, 2.0, 3.0, 4.0;
  const Eigen::MatrixXd f = synth_forward_increments(p, sigma, 2.0);
  for (int j = 0; j < 4; ++j) {
    const Eigen::VectorXd col = f.col(j);
    CHECK(std::sqrt(variance(col) / 2.0) == doctest::Approx(sigma[j]));
  }

  std::ostringstream out;
  write_path_csv(out, p);
  CHECK(out.str().rfind("time,tenor_index,value\n", 0) == 0);
}
