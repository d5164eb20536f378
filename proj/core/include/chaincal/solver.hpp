#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chaincal/residuals.hpp"

namespace chaincal {

struct SolverOptions {
  int max_iterations = 200;
  double lambda0 = 1e-3;
  double lambda_down = 3.0;  // divide on accepted step
  double lambda_up = 2.0;    // multiply on rejected step
  double lambda_max = 1e14;
  // Relative cost decrease below which an accepted step stops the solve.
  double cost_tolerance = 1e-14;
  // Step norm (in scaled units) below which an accepted step stops the solve.
  double step_tolerance = 1e-12;
  // Central-difference probe steps per unit family.
  double fd_step_m = 1e-7;
  double fd_step_rad = 1e-7;
  // One internal optimization unit in SI (typical parameter magnitude).
  double param_scale = 1e-2;
  // Rounds of the alternating tracker solve (pose re-fit + short LM pass).
  int tracker_outer_iterations = 60;
};

enum class StopReason {
  CostTolerance,
  StepTolerance,
  MaxIterations,
  LambdaOverflow,
  ZeroCost
};

const char* stop_reason_name(StopReason r);

struct SolveReport {
  Eigen::VectorXd x0;
  Eigen::VectorXd x;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  int rejected_steps = 0;
  int evaluations = 0;
  StopReason reason = StopReason::MaxIterations;
  // Cost after each accepted step (prefixed by the initial cost).
  std::vector<double> cost_trace;
  // Parameter indices whose derivative fell back to a one-sided difference.
  std::vector<int> one_sided_columns;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central-difference Jacobian with per-family steps. A probe producing
// non-finite residuals falls back to the one-sided difference from the other
// side (column recorded in *one_sided); both sides failing is an error.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                 const std::vector<ParamUnit>& units,
                                 const SolverOptions& opts,
                                 std::vector<int>* one_sided = nullptr);

// Levenberg-Marquardt with classic multiplicative damping on the scaled
// normal equations. Only strictly improving steps are accepted, so the
// accepted-cost trace is monotone. Non-finite residuals at x0 raise
// NumericalError; non-finite trial costs are treated as rejections.
SolveReport levenberg_marquardt(const ResidualFn& f, const Eigen::VectorXd& x0,
                                const std::vector<ParamUnit>& units,
                                const SolverOptions& opts);

// Solves a residual system from x0. When the system has tracker rows and the
// pose is not estimated in the parameter vector, alternates Arun pose
// re-fits with LM passes until the pose stabilizes (the two-step scheme).
SolveReport solve_system(ResidualSystem& system, const Eigen::VectorXd& x0,
                         const SolverOptions& opts);

}  // namespace chaincal
