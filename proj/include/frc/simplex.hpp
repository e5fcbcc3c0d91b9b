// Nelder-Mead simplex minimization inside a box.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace frc {

struct SimplexOptions {
  double initial_step = 0.5;      // edge length of the starting simplex
  double diameter_tol = 1e-6;     // relative simplex diameter
  double spread_tol = 1e-10;      // max - min objective over the vertices
  long max_evaluations = 5000;
  Eigen::VectorXd lower;          // box; empty means unbounded
  Eigen::VectorXd upper;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
  std::vector<double> best_log;  // best vertex value after each iteration
};

/// Minimizes f from x0. Trial points are projected onto the box; non-finite
/// objective values are treated as +inf.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          const SimplexOptions& options = {});

}  // namespace frc
