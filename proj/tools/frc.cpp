#include "frc/bbdl.hpp"
#include "frc/calib.hpp"
#include "frc/core.hpp"
#include "frc/empirics.hpp"
#include "frc/models.hpp"
#include "frc/sim.hpp"
#include "frc/surface_io.hpp"
#include "frc/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonConvergence = 4;
constexpr std::uint64_t kDefaultSeed = 20240601;

int exit_code_for(frc::Errc code) {
  switch (code) {
    case frc::Errc::NonConvergence:
      return kExitNonConvergence;
    case frc::Errc::DegenerateRoots:
    case frc::Errc::QuadratureNonConvergence:
    case frc::Errc::SingularOperator:
    case frc::Errc::NonDiagonalizable:
    case frc::Errc::UnstableIntegration:
    case frc::Errc::NumericalBreakdown:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

struct Common {
  std::string input;
  std::string output_dir = "out";
  std::string variant = "bbdl";
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  bool exclude_diagonal = false;
  int n_mat = frc::kDefaultMatrixSize;
  std::string format = "csv";
  std::optional<double> psi, mu, nu, kappa, psi_bar;
  std::string tenors;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--input", c.input, "Input file");
  app->add_option("--output-dir", c.output_dir, "Directory for outputs")->capture_default_str();
  app->add_option("--variant", c.variant, "Model variant")
      ->check(CLI::IsMember({"bb04", "bbl3", "bbl2", "bbd3", "bbd2", "bbdl"}, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker cap (0 = all cores)");
  app->add_flag("--exclude-diagonal", c.exclude_diagonal, "Drop diagonal entries from Sigma");
  app->add_option("--n-mat", c.n_mat, "BBDL operator size")->capture_default_str();
  app->add_option("--format", c.format, "Surface output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--psi", c.psi, "psi in months");
  app->add_option("--mu", c.mu, "line tension parameter mu");
  app->add_option("--nu", c.nu, "stiffness parameter nu");
  app->add_option("--kappa", c.kappa, "kappa = mu psi");
  app->add_option("--psi-bar", c.psi_bar, "power-law exponent (bb04)");
}

frc::Variant variant_of(const Common& c) { return frc::parse_variant(c.variant); }

frc::ModelParams params_of(const Common& c) {
  frc::ModelParams p;
  p.variant = variant_of(c);
  p.psi = c.psi;
  p.mu = c.mu;
  p.nu = c.nu;
  p.kappa = c.kappa;
  p.psi_bar = c.psi_bar;
  frc::validate_params(p);
  return p;
}

frc::TenorGrid grid_of(const std::string& text, int fallback) {
  if (text.empty()) return frc::TenorGrid::contiguous(fallback);
  if (text.find(',') != std::string::npos) return frc::TenorGrid::parse_months(text);
  return frc::TenorGrid::contiguous(std::stoi(text));
}

std::string surface_ext(const Common& c) { return c.format == "json" ? ".json" : ".csv"; }

class Manifest {
 public:
  Manifest(std::string command, const Common& c) {
    j_["command"] = std::move(command);
    j_["library_version"] = frc::kVersion;
    j_["config"] = {{"input", c.input},       {"output_dir", c.output_dir}, {"variant", c.variant},
                    {"seed", c.seed},         {"threads", c.threads},       {"exclude_diagonal", c.exclude_diagonal},
                    {"n_mat", c.n_mat},       {"format", c.format},         {"tenors", c.tenors}};
    for (const auto& [name, v] : {std::pair{"psi", c.psi}, {"mu", c.mu}, {"nu", c.nu}, {"kappa", c.kappa},
                                  {"psi_bar", c.psi_bar}}) {
      if (v) j_["config"][name] = *v;
    }
    j_["outputs"] = json::array();
  }
  json& config() { return j_["config"]; }
  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  void status(int code, const std::string& message) {
    j_["exit_code"] = code;
    j_["message"] = message;
  }
  void write(const fs::path& dir) const {
    std::ofstream out(dir / "manifest.json");
    out << j_.dump(2) << '\n';
  }

 private:
  json j_;
};

void write_json(const fs::path& p, const json& j, Manifest& m) {
  std::ofstream out(p);
  out << j.dump(2) << '\n';
  m.output(p);
}

frc::CorrelationSurface empirical_surface(const Common& c, double bin_seconds, int min_pairs) {
  if (c.input.empty()) throw frc::Error(frc::Errc::InvalidArgument, "--input is required");
  std::ifstream probe(c.input);
  if (!probe) throw frc::Error(frc::Errc::ParseError, "cannot open " + c.input);
  std::string first;
  std::getline(probe, first);
  if (first.rfind("timestamp", 0) == 0) {
    const frc::PriceSeries series = frc::ingest_csv_file(c.input);
    const frc::IncrementTable inc = frc::increments(series, bin_seconds);
    const frc::TenorGrid grid = c.tenors.empty() ? frc::TenorGrid(series.tenors()) : grid_of(c.tenors, 0);
    return frc::pearson_surface(inc, grid, min_pairs);
  }
  return frc::load_surface(c.input);
}

int cmd_fit(const Common& c, double bin_seconds, int min_pairs, int starts, bool with_hessian, Manifest& m) {
  const frc::CorrelationSurface emp = empirical_surface(c, bin_seconds, min_pairs);
  frc::FitOptions opt;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.exclude_diagonal = c.exclude_diagonal;
  opt.model.n_mat = c.n_mat;
  opt.starts = starts;
  opt.require_convergence = false;
  const frc::Variant v = variant_of(c);
  const frc::FitReport rep = frc::fit(v, emp, opt);
  json report = frc::to_json(rep);
  const frc::CorrelationSurface model = frc::model_surface(rep.params, emp.grid(), opt.model);
  if (with_hessian) {
    const frc::HessianReport h = frc::hessian(v, rep.params, emp, opt);
    report["hessian"] = frc::to_json(h, frc::active_parameter_names(v));
  }
  const fs::path dir = c.output_dir;
  write_json(dir / "fit_report.json", report, m);
  const std::string ext = surface_ext(c);
  frc::save_surface(dir / ("model_surface" + ext), model);
  m.output(dir / ("model_surface" + ext));
  frc::save_surface(dir / ("empirical_surface" + ext), emp);
  m.output(dir / ("empirical_surface" + ext));
  std::ofstream err(dir / "error_surface.csv");
  frc::write_matrix_csv(err, emp.grid(), model.values() - emp.values());
  m.output(dir / "error_surface.csv");
  std::cout << "variant " << c.variant << "  sigma " << rep.sigma_error << "  converged " << rep.converged << '\n';
  for (std::size_t i = 0; i < frc::active_parameter_names(v).size(); ++i) {
    std::cout << "  " << frc::active_parameter_names(v)[i] << " = " << frc::active_vector(rep.params)[static_cast<Eigen::Index>(i)] << '\n';
  }
  return rep.converged ? kExitOk : kExitNonConvergence;
}

struct SimArgs {
  std::string op = "matrix";
  double tau = 1.0;
  double big_d = 0.5;
  std::optional<double> dt_step;
  long steps = 100000;
  std::optional<long> burn_in;
  double epsilon = 0.0;
  double delta_t = 0.0;
  std::string integrator = "exact";
  long record_stride = 1;
  int lattice = 0;
  bool write_path = true;
};

int cmd_simulate(const Common& c, const SimArgs& a, Manifest& m) {
  frc::SimConfig cfg;
  const int n_tenors = c.tenors.empty() ? 10 : std::stoi(c.tenors);
  cfg.n_tenors = std::max(n_tenors + 1, a.lattice);
  if (a.op == "stencil") {
    cfg.op = frc::SimOperator::LdStencil;
    if (!c.mu) throw frc::Error(frc::Errc::InvalidArgument, "--mu is required for the stencil operator");
    cfg.symbol = {*c.mu, c.nu.value_or(std::numeric_limits<double>::infinity())};
  } else {
    cfg.op = frc::SimOperator::MMatrix;
    cfg.kappa = c.kappa.value_or(0.92);
    cfg.matrix = frc::build_m(cfg.kappa, cfg.n_tenors);
  }
  if (!(a.tau > 0.0)) throw frc::Error(frc::Errc::InvalidArgument, "tau must be positive (dt_step <= tau/10)");
  cfg.tau = a.tau;
  cfg.big_d = a.big_d;
  cfg.dt_step = a.dt_step.value_or(a.tau / 10.0);
  cfg.n_steps = a.steps;
  cfg.burn_in = a.burn_in.value_or(static_cast<long>(std::ceil(10.0 * a.tau / cfg.dt_step)));
  cfg.seed = c.seed;
  cfg.epsilon = a.epsilon;
  cfg.integrator = a.integrator == "euler" ? frc::Integrator::EulerMaruyama : frc::Integrator::ExactOU;
  cfg.record_stride = a.record_stride;
  const double delta_t = a.delta_t > 0.0 ? a.delta_t : 100.0 * a.tau;
  m.config()["simulation"] = {{"operator", a.op},      {"lattice_size", cfg.n_tenors}, {"tau", cfg.tau},
                              {"big_d", cfg.big_d},    {"dt_step", cfg.dt_step},       {"n_steps", cfg.n_steps},
                              {"burn_in", cfg.burn_in}, {"epsilon", cfg.epsilon},      {"integrator", a.integrator},
                              {"record_stride", cfg.record_stride}, {"delta_t", delta_t}};
  const frc::NoiseFieldPath path = frc::simulate(cfg);
  const fs::path dir = c.output_dir;
  if (a.write_path) {
    std::ofstream out(dir / "path.csv");
    frc::write_path_csv(out, path);
    m.output(dir / "path.csv");
  }
  const frc::SampleCovariance sc = frc::sample_equal_time_cov(path, delta_t);
  std::vector<int> sites;
  for (int t = 1; t <= n_tenors; ++t) sites.push_back(t);
  const frc::TenorGrid grid(sites);
  const Eigen::MatrixXd cov = sc.cov.block(1, 1, n_tenors, n_tenors);
  {
    std::ofstream out(dir / "sample_cov.csv");
    frc::write_matrix_csv(out, grid, cov);
    m.output(dir / "sample_cov.csv");
    std::ofstream se(dir / "sample_cov_se.csv");
    frc::write_matrix_csv(se, grid, sc.std_error.block(1, 1, n_tenors, n_tenors));
    m.output(dir / "sample_cov_se.csv");
  }
  const std::string ext = surface_ext(c);
  frc::save_surface(dir / ("sample_corr" + ext), frc::CorrelationSurface::from_covariance(grid, cov));
  m.output(dir / ("sample_corr" + ext));
  if (cfg.op == frc::SimOperator::MMatrix) {
    std::ofstream out(dir / "analytic_cov.csv");
    const Eigen::MatrixXd analytic = 2.0 * cfg.big_d * delta_t * frc::cov_bbdl_grid(*cfg.matrix, grid);
    frc::write_matrix_csv(out, grid, analytic);
    m.output(dir / "analytic_cov.csv");
  }
  std::cout << "simulated " << cfg.n_steps << " steps, " << sc.n_bins << " bins of width " << delta_t << '\n';
  return kExitOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::pair<int, int> parse_pair(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw frc::Error(frc::Errc::InvalidArgument, "--pair expects two maturities in months");
  std::pair<int, int> out;
  for (int k = 0; k < 2; ++k) {
    const double months = v[static_cast<std::size_t>(k)];
    if (months <= 0 || std::fmod(months, 3.0) != 0.0) {
      throw frc::Error(frc::Errc::InvalidArgument, "--pair maturities must be positive multiples of 3 months");
    }
    (k == 0 ? out.first : out.second) = static_cast<int>(months) / 3;
  }
  return out;
}

struct EppsArgs {
  std::string pair = "30,33";
  std::string scales;
  bool synthetic = false;
  double tau_minutes = 36.0;
  double epsilon = 1.6e-3;
  double hours = 500.0;
  double step_seconds = 4.0;
  int lattice = 40;
  int min_pairs = frc::kDefaultMinPairs;
};

int cmd_epps(const Common& c, const EppsArgs& a, Manifest& m) {
  const std::pair<int, int> pair = parse_pair(a.pair);
  std::vector<double> scales = a.scales.empty() ? std::vector<double>{} : parse_list(a.scales);
  if (scales.empty()) {
    for (int k = 0; k < 12; ++k) scales.push_back(4.0 * std::pow(900.0, k / 11.0));
  }
  const fs::path dir = c.output_dir;
  frc::PriceSeries series;
  const frc::Variant v = variant_of(c);
  std::optional<frc::OperatorMatrix> op;
  if (v == frc::Variant::BBDL) op = frc::build_m(c.kappa.value_or(0.92), a.synthetic ? a.lattice : c.n_mat);
  if (a.synthetic) {
    if (!op) throw frc::Error(frc::Errc::InvalidArgument, "synthetic Epps data use the bbdl variant");
    frc::SimConfig cfg;
    cfg.matrix = op;
    cfg.n_tenors = op->size;
    cfg.tau = 60.0 * a.tau_minutes;
    cfg.dt_step = a.step_seconds;
    cfg.n_steps = static_cast<long>(std::llround(a.hours * 3600.0 / a.step_seconds));
    cfg.burn_in = static_cast<long>(std::ceil(10.0 * cfg.tau / cfg.dt_step));
    cfg.epsilon = a.epsilon;
    cfg.seed = c.seed;
    m.config()["synthetic"] = {{"tau_minutes", a.tau_minutes}, {"epsilon", a.epsilon}, {"hours", a.hours},
                               {"step_seconds", a.step_seconds}, {"lattice_size", a.lattice}};
    series = frc::path_to_prices(frc::simulate(cfg), {pair.first, pair.second}, 1e-2);
    std::ofstream out(dir / "synthetic_prices.csv");
    frc::write_price_csv(out, series);
    m.output(dir / "synthetic_prices.csv");
  } else {
    if (c.input.empty()) throw frc::Error(frc::Errc::InvalidArgument, "--input or --synthetic is required");
    series = frc::ingest_csv_file(c.input);
  }
  const frc::EppsCurve curve = frc::epps_curve(series, pair, scales, a.min_pairs);
  for (double s : curve.insufficient_scales()) {
    std::cerr << "warning: InsufficientData at scale " << s << " s\n";
  }
  {
    std::ofstream out(dir / "epps_empirical.csv");
    frc::write_epps_csv(out, curve);
    m.output(dir / "epps_empirical.csv");
  }
  const frc::EppsModel model = op ? frc::epps_model_bbdl(*op, pair) : frc::epps_model_discrete(params_of(c), pair);
  const frc::EppsFit fit = frc::fit_epps(curve, model);
  write_json(dir / "epps_fit.json", frc::to_json(fit), m);
  frc::EppsCurve fitted = curve;
  for (std::size_t i = 0; i < fitted.scales.size(); ++i) {
    fitted.correlations[i] = frc::epps_model_correlation(model, 60.0 * fit.tau_minutes, fit.epsilon, fitted.scales[i]);
  }
  std::ofstream out(dir / "epps_fitted.csv");
  frc::write_epps_csv(out, fitted);
  m.output(dir / "epps_fitted.csv");
  std::cout << "tau " << fit.tau_minutes << " min  epsilon " << fit.epsilon << "  rms " << fit.residual << '\n';
  return kExitOk;
}

int cmd_curvature(const Common& c, Manifest& m) {
  const frc::CorrelationSurface s = c.input.empty()
                                        ? frc::model_surface(params_of(c), grid_of(c.tenors, 39), {c.n_mat})
                                        : frc::load_surface(c.input);
  const frc::CurvatureResult r = frc::antidiagonal_curvature(s);
  if (!r.skipped.empty()) {
    std::cerr << "warning: " << r.skipped.size() << " anti-diagonals with fewer than 10 points omitted\n";
  }
  const fs::path p = fs::path(c.output_dir) / "curvature.csv";
  std::ofstream out(p);
  frc::write_curvature_csv(out, r);
  m.output(p);
  return kExitOk;
}

int cmd_export(const Common& c, Manifest& m) {
  const frc::ModelParams p = params_of(c);
  const frc::CorrelationSurface s = frc::model_surface(p, grid_of(c.tenors, 39), {c.n_mat});
  const fs::path path = fs::path(c.output_dir) / ("surface_" + c.variant + surface_ext(c));
  frc::save_surface(path, s);
  m.output(path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic-string forward-rate correlation models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", frc::kVersion);

  Common common;
  double bin_seconds = 86400.0;
  int min_pairs = frc::kDefaultMinPairs;
  int starts = 10;
  bool with_hessian = false;
  SimArgs sim;
  EppsArgs epps;

  auto* fit = app.add_subcommand("fit", "Calibrate a model to a correlation surface or price CSV");
  add_common(fit, common);
  fit->add_option("--tenors", common.tenors, "Grid as month list when reading prices");
  fit->add_option("--bin-seconds", bin_seconds, "Increment bin width for price input")->capture_default_str();
  fit->add_option("--min-pairs", min_pairs, "Minimum paired observations")->capture_default_str();
  fit->add_option("--starts", starts, "Multi-start count")->capture_default_str();
  fit->add_flag("--hessian", with_hessian, "Also compute the Hessian at the optimum");

  auto* simulate = app.add_subcommand("simulate", "Run the Langevin lattice simulation");
  add_common(simulate, common);
  simulate->add_option("--tenors", common.tenors, "Number of recorded tenors (1..n)");
  simulate->add_option("--operator", sim.op, "matrix or stencil")->check(CLI::IsMember({"matrix", "stencil"}));
  simulate->add_option("--tau", sim.tau, "Relaxation time")->capture_default_str();
  simulate->add_option("--big-d", sim.big_d, "Noise scale D")->capture_default_str();
  simulate->add_option("--dt-step", sim.dt_step, "Integrator step (default tau/10)");
  simulate->add_option("--steps", sim.steps, "Recorded steps")->capture_default_str();
  simulate->add_option("--burn-in", sim.burn_in, "Burn-in steps (default 10 tau/dt_step)");
  simulate->add_option("--epsilon", sim.epsilon, "Idiosyncratic noise scale")->capture_default_str();
  simulate->add_option("--delta-t", sim.delta_t, "Bin width for the sample covariance (default 100 tau)");
  simulate->add_option("--integrator", sim.integrator, "exact or euler")->check(CLI::IsMember({"exact", "euler"}));
  simulate->add_option("--record-stride", sim.record_stride, "Steps between records")->capture_default_str();
  simulate->add_option("--lattice", sim.lattice, "Lattice size (default tenors + 1)");
  simulate->add_flag("!--no-path", sim.write_path, "Skip path.csv");

  auto* eppscmd = app.add_subcommand("epps", "Estimate and fit the Epps curve of a tenor pair");
  add_common(eppscmd, common);
  eppscmd->add_option("--pair", epps.pair, "Tenor pair in months, e.g. 30,33")->capture_default_str();
  eppscmd->add_option("--scales", epps.scales, "Comma-separated bin widths in seconds");
  eppscmd->add_flag("--synthetic", epps.synthetic, "Generate intraday data by simulation");
  eppscmd->add_option("--tau-minutes", epps.tau_minutes, "Synthetic tau")->capture_default_str();
  eppscmd->add_option("--epsilon", epps.epsilon, "Synthetic epsilon")->capture_default_str();
  eppscmd->add_option("--hours", epps.hours, "Synthetic sample length")->capture_default_str();
  eppscmd->add_option("--lattice", epps.lattice, "Synthetic lattice size")->capture_default_str();
  eppscmd->add_option("--min-pairs", epps.min_pairs, "Minimum paired increments")->capture_default_str();

  auto* curvature = app.add_subcommand("curvature", "Anti-diagonal curvature of a surface");
  add_common(curvature, common);
  curvature->add_option("--tenors", common.tenors, "Model grid: count or month list");

  auto* exportcmd = app.add_subcommand("export", "Write a model correlation surface");
  add_common(exportcmd, common);
  exportcmd->add_option("--tenors", common.tenors, "Grid: count or month list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Manifest manifest(name, common);
  int rc = kExitOk;
  std::string message = "ok";
  try {
    fs::create_directories(common.output_dir);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: cannot create output directory: " << e.what() << '\n';
    return kExitInput;
  }
  try {
    if (name == "fit") rc = cmd_fit(common, bin_seconds, min_pairs, starts, with_hessian, manifest);
    if (name == "simulate") rc = cmd_simulate(common, sim, manifest);
    if (name == "epps") rc = cmd_epps(common, epps, manifest);
    if (name == "curvature") rc = cmd_curvature(common, manifest);
    if (name == "export") rc = cmd_export(common, manifest);
    if (rc == kExitNonConvergence) message = "simplex budget exhausted before convergence";
  } catch (const frc::Error& e) {
    rc = exit_code_for(e.code());
    message = e.what();
    std::cerr << "error: " << message << '\n';
  } catch (const std::exception& e) {
    rc = kExitInput;
    message = e.what();
    std::cerr << "error: " << message << '\n';
  }
  manifest.status(rc, message);
  manifest.write(common.output_dir);
  return rc;
}
