#include "frc/simplex.hpp"

#include "frc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace frc {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          const SimplexOptions& opt) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw Error(Errc::InvalidArgument, "empty starting point");
  const bool boxed = opt.lower.size() == n && opt.upper.size() == n;
  auto project = [&](Eigen::VectorXd x) {
    if (boxed) x = x.cwiseMax(opt.lower).cwiseMin(opt.upper);
    return x;
  };
  SimplexResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    double v;
    try {
      v = f(x);
    } catch (const Error&) {
      v = std::numeric_limits<double>::infinity();
    }
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.push_back(project(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = pts[0];
    x[i] += opt.initial_step;
    if (boxed && x[i] > opt.upper[i]) x[i] = pts[0][i] - opt.initial_step;
    pts.push_back(project(x));
  }
  for (const auto& p : pts) vals.push_back(eval(p));

  std::vector<std::size_t> order(pts.size());
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (auto i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  const std::size_t worst = static_cast<std::size_t>(n);
  sort_vertices();
  while (true) {
    double diameter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) diameter = std::max(diameter, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    const double scale = std::max(1.0, pts[0].cwiseAbs().maxCoeff());
    if (diameter / scale < opt.diameter_tol && vals[worst] - vals[0] < opt.spread_tol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= opt.max_evaluations) break;
    ++res.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = project(centroid + (centroid - pts[worst]));
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = project(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc =
          outside ? project(centroid + 0.5 * (xr - centroid)) : project(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = project(pts[0] + 0.5 * (pts[i] - pts[0]));
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_vertices();
    res.best_log.push_back(vals[0]);
  }
  res.x = pts[0];
  res.value = vals[0];
  return res;
}

}  // namespace frc
