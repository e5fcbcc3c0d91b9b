#include "frc/sim.hpp"

#include "frc/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <vector>

namespace frc {

namespace {

constexpr double kOverflowGuard = 1e12;

Eigen::MatrixXd stencil_operator(const DiscreteSymbol& sym, int n) {
  const double a = 1.0 / (sym.mu * sym.mu);
  const double b = std::isinf(sym.nu) ? 0.0 : 1.0 / std::pow(sym.nu, 4);
  const double band[5] = {b, -a - 4.0 * b, 1.0 + 2.0 * a + 6.0 * b, -a - 4.0 * b, b};
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    for (int d = -2; d <= 2; ++d) {
      const int col = std::abs(t + d);
      if (col < n) k(t, col) += band[d + 2];
    }
  }
  return k;
}

struct Model {
  Eigen::MatrixXd drift;     // K in dA/dt = (1/tau)(-K A + s eta)
  Eigen::VectorXd noise;     // s
};

Model make_model(const SimConfig& cfg) {
  Model m;
  if (cfg.op == SimOperator::MMatrix) {
    const OperatorMatrix op = cfg.matrix ? *cfg.matrix : build_m(cfg.kappa, cfg.n_tenors);
    m.drift = op.dense();
    m.noise = image_boundary_diagonal(op.size);
  } else {
    m.drift = stencil_operator(cfg.symbol, cfg.n_tenors);
    m.noise = Eigen::VectorXd::Ones(cfg.n_tenors);
    m.noise[0] = std::sqrt(2.0);
  }
  return m;
}

void guard(const Eigen::VectorXd& a) {
  if (!(a.cwiseAbs().maxCoeff() <= kOverflowGuard)) {
    throw Error(Errc::UnstableIntegration, "noise field exceeded the overflow guard");
  }
}

}  // namespace

void SimConfig::validate() const {
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, "tau must be positive");
  if (!(big_d >= 0.0)) throw Error(Errc::InvalidArgument, "big_d must be non-negative");
  if (!(epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be non-negative");
  if (!(dt_step > 0.0)) throw Error(Errc::InvalidArgument, "dt_step must be positive");
  if (dt_step > tau / 10.0 * (1.0 + 1e-12)) throw Error(Errc::InvalidArgument, "dt_step must not exceed tau/10");
  if (static_cast<double>(burn_in) < 10.0 * tau / dt_step * (1.0 - 1e-12)) {
    throw Error(Errc::InvalidArgument, "burn_in must cover at least 10 tau");
  }
  if (n_steps < 2) throw Error(Errc::InvalidArgument, "n_steps must be at least 2");
  if (record_stride < 1) throw Error(Errc::InvalidArgument, "record_stride must be positive");
  if (op == SimOperator::MMatrix && matrix && matrix->size != n_tenors) {
    throw Error(Errc::InvalidArgument, "n_tenors must equal the operator size");
  }
  if (n_tenors < 1) throw Error(Errc::InvalidArgument, "n_tenors must be positive");
  if (op == SimOperator::LdStencil && (!(symbol.mu > 0.0) || !(symbol.nu > 0.0))) {
    throw Error(Errc::NonPositiveParameter, "mu and nu must be positive");
  }
}

NoiseFieldPath simulate(const SimConfig& cfg) {
  cfg.validate();
  const Model model = make_model(cfg);
  const int n = static_cast<int>(model.drift.rows());
  const double h = cfg.dt_step;

  std::vector<NormalStream> streams;
  streams.reserve(static_cast<std::size_t>(2 * n));
  for (int c = 0; c < 2 * n; ++c) streams.emplace_back(cfg.seed, static_cast<std::uint32_t>(c));
  Eigen::VectorXd z(2 * n);
  auto draw = [&] {
    for (int c = 0; c < 2 * n; ++c) z[c] = streams[static_cast<std::size_t>(c)].next();
  };

  // One step maps (A, integral increment) -> next values.
  Eigen::MatrixXd phi, root;
  const bool exact = cfg.integrator == Integrator::ExactOU;
  if (exact) {
    const int m = 2 * n;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    b.topLeftCorner(n, n) = -model.drift / cfg.tau;
    b.bottomLeftCorner(n, n).setIdentity();
    Eigen::VectorXd w(m);
    w.head(n) = 2.0 * cfg.big_d * model.noise.array().square() / (cfg.tau * cfg.tau);
    w.tail(n).setConstant(2.0 * cfg.big_d * cfg.epsilon);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    c.topLeftCorner(m, m) = -b * h;
    c.topRightCorner(m, m) = w.asDiagonal();
    c.topRightCorner(m, m) *= h;
    c.bottomRightCorner(m, m) = b.transpose() * h;
    const Eigen::MatrixXd e = c.exp();
    phi = e.bottomRightCorner(m, m).transpose();
    Eigen::MatrixXd q = phi * e.topRightCorner(m, m);
    q = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  const Eigen::VectorXd amp = model.noise * std::sqrt(2.0 * cfg.big_d * h) / cfg.tau;
  const double eps_amp = std::sqrt(2.0 * cfg.big_d * cfg.epsilon * h);

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  auto step = [&] {
    draw();
    if (exact) {
      x.head(n) = a;
      x.tail(n).setZero();
      x = phi * x + root * z;
      a = x.head(n);
      total += x.tail(n);
    } else {
      Eigen::VectorXd next = a - (h / cfg.tau) * (model.drift * a) + amp.cwiseProduct(z.head(n));
      total += 0.5 * h * (a + next) + eps_amp * z.tail(n);
      a = std::move(next);
    }
    guard(a);
  };

  for (long s = 0; s < cfg.burn_in; ++s) step();
  total.setZero();

  const long records = cfg.n_steps / cfg.record_stride + 1;
  NoiseFieldPath path;
  path.record_dt = h * static_cast<double>(cfg.record_stride);
  path.times.resize(records);
  path.a_values.resize(records, n);
  path.integral.resize(records, n);
  path.times[0] = 0.0;
  path.a_values.row(0) = a.transpose();
  path.integral.row(0).setZero();
  for (long r = 1; r < records; ++r) {
    for (long s = 0; s < cfg.record_stride; ++s) step();
    path.times[r] = static_cast<double>(r) * path.record_dt;
    path.a_values.row(r) = a.transpose();
    path.integral.row(r) = total.transpose();
  }
  return path;
}

Eigen::MatrixXd bin_increments(const NoiseFieldPath& path, double delta_t) {
  if (!(delta_t > 0.0) || !(path.record_dt > 0.0)) throw Error(Errc::InvalidArgument, "bin width must be positive");
  const double ratio = delta_t / path.record_dt;
  const long width = std::lround(ratio);
  if (width < 1 || std::abs(ratio - static_cast<double>(width)) > 1e-9 * ratio) {
    throw Error(Errc::InvalidArgument, "bin width must be a multiple of the record interval");
  }
  const long bins = (path.integral.rows() - 1) / width;
  Eigen::MatrixXd out(bins, path.integral.cols());
  for (long b = 0; b < bins; ++b) {
    out.row(b) = path.integral.row((b + 1) * width) - path.integral.row(b * width);
  }
  return out;
}

SampleCovariance sample_equal_time_cov(const NoiseFieldPath& path, double delta_t, int batches) {
  if (batches < 2) throw Error(Errc::InvalidArgument, "need at least two batches");
  const Eigen::MatrixXd x = bin_increments(path, delta_t);
  const long bins = x.rows();
  const long per_batch = bins / batches;
  if (per_batch < 10) throw Error(Errc::InsufficientSamples, "too few bins for batch-means standard errors");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  SampleCovariance out;
  out.n_bins = bins;
  out.cov = centered.transpose() * centered / static_cast<double>(bins - 1);
  const auto n = x.cols();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < batches; ++b) {
    const auto block = centered.middleRows(b * per_batch, per_batch);
    const Eigen::MatrixXd c = block.transpose() * block / static_cast<double>(per_batch);
    sum += c;
    sum_sq += c.cwiseProduct(c);
  }
  const double nb = batches;
  const Eigen::MatrixXd var = (sum_sq - sum.cwiseProduct(sum) / nb) / (nb - 1.0);
  out.std_error = (var.cwiseMax(0.0) / nb).cwiseSqrt();
  return out;
}

Eigen::MatrixXd synth_forward_increments(const NoiseFieldPath& path, const Eigen::VectorXd& sigma,
                                         double delta_t) {
  if (path.integral.rows() < 2) throw Error(Errc::InsufficientSamples, "path has fewer than two records");
  if (sigma.size() != path.integral.cols()) throw Error(Errc::InvalidArgument, "sigma has the wrong length");
  if (!(sigma.minCoeff() > 0.0)) throw Error(Errc::NonPositiveParameter, "sigma must be positive");
  Eigen::MatrixXd x = bin_increments(path, delta_t);
  if (x.rows() < 2) throw Error(Errc::InsufficientSamples, "need at least two bins");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((x.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(x.rows() - 1)).cwiseSqrt();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (!(sd[j] > 0.0)) throw Error(Errc::InsufficientSamples, "tenor has zero increment variance");
    x.col(j) *= sigma[j] * std::sqrt(delta_t) / sd[j];
  }
  return x;
}

PriceSeries path_to_prices(const NoiseFieldPath& path, const std::vector<int>& sites, double scale,
                           TimestampUs start) {
  PriceSeries series;
  for (int site : sites) {
    if (site < 1 || site >= path.integral.cols()) throw Error(Errc::InvalidArgument, "site outside the lattice");
    for (Eigen::Index r = 0; r < path.integral.rows(); ++r) {
      const auto t = start + static_cast<TimestampUs>(std::llround(path.times[r] * 1e6));
      series.add(site, t, 100.0 - scale * path.integral(r, site));
    }
  }
  return series;
}

void write_path_csv(std::ostream& out, const NoiseFieldPath& path) {
  out << "time,tenor_index,value\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < path.a_values.rows(); ++r) {
    for (Eigen::Index j = 0; j < path.a_values.cols(); ++j) {
      out << path.times[r] << ',' << j << ',' << path.a_values(r, j) << '\n';
    }
  }
}

}  // namespace frc
