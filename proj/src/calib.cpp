#include "frc/calib.hpp"

#include "frc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace frc {

namespace {

std::vector<Eigen::Index> common_entries(const CorrelationSurface& a, const CorrelationSurface& b,
                                         bool exclude_diagonal) {
  std::vector<Eigen::Index> out;
  const auto n = static_cast<Eigen::Index>(a.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (exclude_diagonal && i == j) continue;
      if (std::isnan(a.values()(i, j)) || std::isnan(b.values()(i, j))) continue;
      out.push_back(j * n + i);
    }
  }
  return out;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

Eigen::VectorXd log_box(Variant variant, double bound, bool upper) {
  const auto names = active_parameter_names(variant);
  Eigen::VectorXd b(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    double v = std::log(bound);
    if (upper && names[i] == "psi_bar") v = 0.0;
    b[static_cast<Eigen::Index>(i)] = v;
  }
  return b;
}

std::string unit_of(Variant v, const std::string& name) {
  if (name == "psi") return "months";
  if (name == "psi_bar" || name == "kappa") return "dimensionless";
  const bool continuous = v == Variant::BB04 || v == Variant::BBL3 || v == Variant::BBL2;
  return continuous ? "per quarter" : "dimensionless";
}

}  // namespace

double sigma_error(const CorrelationSurface& model, const CorrelationSurface& empirical, bool exclude_diagonal) {
  if (!(model.grid() == empirical.grid())) throw Error(Errc::GridMismatch, "surfaces are defined on different grids");
  const auto idx = common_entries(model, empirical, exclude_diagonal);
  if (idx.empty()) throw Error(Errc::InsufficientData, "no common entries");
  const double* m = model.values().data();
  const double* e = empirical.values().data();
  double mean = 0.0;
  for (auto k : idx) mean += m[k] - e[k];
  mean /= static_cast<double>(idx.size());
  double var = 0.0;
  for (auto k : idx) {
    const double d = m[k] - e[k] - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(idx.size()));
}

double fit_objective(const ModelParams& params, const CorrelationSurface& empirical, const FitOptions& options) {
  return sigma_error(model_surface(params, empirical.grid(), options.model), empirical, options.exclude_diagonal);
}

std::vector<Eigen::VectorXd> start_points(int dim, int count, std::uint64_t seed, double lower, double upper) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};
  if (dim < 1 || dim > 6) throw Error(Errc::InvalidArgument, "unsupported dimension for start points");
  Eigen::VectorXd shift(dim);
  for (int d = 0; d < dim; ++d) {
    const auto w = philox4x32({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
                              {static_cast<std::uint32_t>(d), 0u, 0u, 0x5eedu});
    shift[d] = static_cast<double>(w[0]) * 0x1p-32;
  }
  const double lo = std::log(lower), hi = std::log(upper);
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(k + 1), kPrimes[d]) + shift[d];
      u -= std::floor(u);
      x[d] = lo + u * (hi - lo);
    }
    out.push_back(x);
  }
  return out;
}

FitReport fit(Variant variant, const CorrelationSurface& empirical, const FitOptions& options) {
  const int dim = static_cast<int>(active_parameter_names(variant).size());
  std::vector<Eigen::VectorXd> starts;
  if (!options.initial_points.empty()) {
    for (const auto& p : options.initial_points) {
      if (p.size() != dim || !(p.minCoeff() > 0.0)) throw Error(Errc::InvalidArgument, "invalid initial point");
      starts.push_back(p.array().log().matrix());
    }
  } else {
    if (options.starts < 1) throw Error(Errc::InvalidArgument, "need at least one start");
    starts = start_points(dim, options.starts, options.seed, options.start_lower, options.start_upper);
  }

  SimplexOptions sopt = options.simplex;
  sopt.lower = log_box(variant, options.box_lower, false);
  sopt.upper = log_box(variant, options.box_upper, true);
  auto objective = [&](const Eigen::VectorXd& l) {
    return fit_objective(from_active_vector(variant, l.array().exp().matrix()), empirical, options);
  };

  std::vector<StartReport> reports(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      const SimplexResult r = nelder_mead(objective, starts[i], sopt);
      StartReport& s = reports[i];
      s.start = starts[i].array().exp().matrix();
      s.result = r.x.array().exp().matrix();
      s.sigma_error = r.value;
      s.iterations = r.iterations;
      s.evaluations = r.evaluations;
      s.converged = r.converged;
      s.monotone = std::is_sorted(r.best_log.rbegin(), r.best_log.rend());
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(starts.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].sigma_error < reports[best].sigma_error) best = i;
  }
  FitReport rep;
  rep.variant = variant;
  rep.params = from_active_vector(variant, reports[best].result);
  rep.sigma_error = reports[best].sigma_error;
  rep.iterations = reports[best].iterations;
  for (const auto& s : reports) rep.evaluations += s.evaluations;
  rep.converged = reports[best].converged;
  rep.restarts = static_cast<int>(reports.size());
  rep.exclude_diagonal = options.exclude_diagonal;
  rep.n_mat = options.model.n_mat;
  rep.seed = options.seed;
  rep.starts = std::move(reports);
  if (!std::isfinite(rep.sigma_error)) throw Error(Errc::NumericalBreakdown, "objective is not finite at any start");
  if (options.require_convergence && !rep.converged) {
    throw Error(Errc::NonConvergence, "simplex budget exhausted before convergence");
  }
  return rep;
}

HessianReport hessian_of(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& p,
                         double h) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "step must be positive");
  const Eigen::Index n = p.size();
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj, double step) {
    Eigen::VectorXd q = p;
    q[i] *= 1.0 + si * step;
    q[j] *= 1.0 + sj * step;
    const double v = f(q);
    if (!std::isfinite(v)) throw Error(Errc::NumericalBreakdown, "objective is not finite near the optimum");
    return v;
  };
  const double f0 = f(p);
  if (!std::isfinite(f0)) throw Error(Errc::NumericalBreakdown, "objective is not finite at the optimum");
  auto compute = [&](double step) {
    Eigen::MatrixXd hm(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd up = p, dn = p;
      up[i] *= 1.0 + step;
      dn[i] *= 1.0 - step;
      const double fu = f(up), fd = f(dn);
      if (!std::isfinite(fu) || !std::isfinite(fd)) throw Error(Errc::NumericalBreakdown, "objective is not finite");
      hm(i, i) = (fu - 2.0 * f0 + fd) / (step * step);
      for (Eigen::Index j = 0; j < i; ++j) {
        hm(i, j) = (at(i, 1, j, 1, step) - at(i, 1, j, -1, step) - at(i, -1, j, 1, step) + at(i, -1, j, -1, step)) /
                   (4.0 * step * step);
        hm(j, i) = hm(i, j);
      }
    }
    return hm;
  };
  HessianReport r;
  r.step = h;
  r.hessian = compute(h);
  r.hessian_half_step = compute(0.5 * h);
  if (!r.hessian.allFinite()) throw Error(Errc::NumericalBreakdown, "non-finite Hessian");
  const double scale = r.hessian_half_step.cwiseAbs().maxCoeff();
  r.richardson_discrepancy = scale > 0.0 ? (r.hessian - r.hessian_half_step).cwiseAbs().maxCoeff() / scale : 0.0;
  r.richardson_ok = r.richardson_discrepancy <= 0.1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.hessian);
  r.eigenvalues = es.eigenvalues().reverse();
  r.eigenvectors = es.eigenvectors().rowwise().reverse();
  return r;
}

HessianReport hessian(Variant variant, const ModelParams& p_star, const CorrelationSurface& empirical,
                      const FitOptions& options, double h) {
  if (p_star.variant != variant) throw Error(Errc::InvalidArgument, "parameters do not match the variant");
  auto f = [&](const Eigen::VectorXd& p) {
    return fit_objective(from_active_vector(variant, p), empirical, options);
  };
  return hessian_of(f, active_vector(p_star), h);
}

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j;
  j["variant"] = std::string(to_string(p.variant));
  const auto names = active_parameter_names(p.variant);
  const Eigen::VectorXd v = active_vector(p);
  nlohmann::json values, units;
  for (std::size_t i = 0; i < names.size(); ++i) {
    values[names[i]] = v[static_cast<Eigen::Index>(i)];
    units[names[i]] = unit_of(p.variant, names[i]);
  }
  j["values"] = values;
  j["units"] = units;
  return j;
}

nlohmann::json to_json(const FitReport& r) {
  nlohmann::json j;
  j["variant"] = std::string(to_string(r.variant));
  j["params"] = to_json(r.params);
  j["sigma_error"] = r.sigma_error;
  j["sigma_error_percent"] = 100.0 * r.sigma_error;
  j["sigma_definition"] = r.exclude_diagonal ? "std of model-empirical error, off-diagonal entries"
                                             : "std of model-empirical error, all n^2 entries";
  j["exclude_diagonal"] = r.exclude_diagonal;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  j["restarts"] = r.restarts;
  j["seed"] = r.seed;
  if (r.variant == Variant::BBDL) j["n_mat"] = r.n_mat;
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"start", std::vector<double>(s.start.data(), s.start.data() + s.start.size())},
                      {"result", std::vector<double>(s.result.data(), s.result.data() + s.result.size())},
                      {"sigma_error", s.sigma_error},
                      {"iterations", s.iterations},
                      {"evaluations", s.evaluations},
                      {"converged", s.converged},
                      {"monotone", s.monotone}});
  }
  j["starts"] = starts;
  return j;
}

nlohmann::json to_json(const HessianReport& r, const std::vector<std::string>& names) {
  auto rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out.emplace_back();
      for (Eigen::Index k = 0; k < m.cols(); ++k) out.back().push_back(m(i, k));
    }
    return out;
  };
  nlohmann::json j;
  j["parameters"] = names;
  j["definition"] = "H_ij = p_i p_j d2(Sigma)/dp_i dp_j";
  j["relative_step"] = r.step;
  j["hessian"] = rows(r.hessian);
  j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  j["eigenvectors_columns"] = rows(r.eigenvectors);
  j["richardson_discrepancy"] = r.richardson_discrepancy;
  j["richardson_ok"] = r.richardson_ok;
  return j;
}

nlohmann::json to_json(const EppsFit& r) {
  return {{"tau_minutes", r.tau_minutes},
          {"epsilon", r.epsilon},
          {"residual_rms_correlation", r.residual},
          {"scales_used", r.scales_used},
          {"converged", r.converged}};
}

}  // namespace frc
