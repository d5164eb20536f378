#include "chaincal/solver.hpp"

#include <cmath>
#include <limits>

namespace chaincal {

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::CostTolerance: return "cost-tolerance";
    case StopReason::StepTolerance: return "step-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::LambdaOverflow: return "lambda-overflow";
    case StopReason::ZeroCost: return "zero-cost";
  }
  return "?";
}

static double fd_step(ParamUnit unit, const SolverOptions& opts) {
  return unit == ParamUnit::Meter ? opts.fd_step_m : opts.fd_step_rad;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                 const std::vector<ParamUnit>& units,
                                 const SolverOptions& opts,
                                 std::vector<int>* one_sided) {
  if (static_cast<int>(units.size()) != x.size())
    throw ConfigError("numeric_jacobian: units/parameter length mismatch");

  Eigen::VectorXd base;
  bool have_base = false;
  Eigen::MatrixXd j;

  for (int c = 0; c < x.size(); ++c) {
    const double h = fd_step(units[static_cast<std::size_t>(c)], opts);
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;

    Eigen::VectorXd rp, rm;
    bool ok_p = true, ok_m = true;
    try {
      rp = f(xp);
      ok_p = rp.allFinite();
    } catch (const NumericalError&) {
      ok_p = false;
    }
    try {
      rm = f(xm);
      ok_m = rm.allFinite();
    } catch (const NumericalError&) {
      ok_m = false;
    }

    Eigen::VectorXd col;
    if (ok_p && ok_m) {
      col = (rp - rm) / (2.0 * h);
    } else {
      if (!have_base) {
        base = f(x);
        have_base = true;
        if (!base.allFinite())
          throw NumericalError("residuals are non-finite at the probe center");
      }
      if (ok_p)
        col = (rp - base) / h;
      else if (ok_m)
        col = (base - rm) / h;
      else
        throw NumericalError("both finite-difference probes failed for column " +
                             std::to_string(c));
      if (one_sided) one_sided->push_back(c);
    }

    if (j.size() == 0) j.resize(col.size(), x.size());
    if (col.size() != j.rows())
      throw NumericalError("residual length changed between probes");
    j.col(c) = col;
  }
  return j;
}

SolveReport levenberg_marquardt(const ResidualFn& f, const Eigen::VectorXd& x0,
                                const std::vector<ParamUnit>& units,
                                const SolverOptions& opts) {
  SolveReport rep;
  rep.x0 = x0;

  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = f(x);
  rep.evaluations = 1;
  if (!r.allFinite())
    throw NumericalError("residuals are non-finite at the initial parameters");

  double cost = r.squaredNorm();
  rep.initial_cost = cost;
  rep.cost_trace.push_back(cost);

  const double s = opts.param_scale;
  double lambda = opts.lambda0;
  rep.reason = StopReason::MaxIterations;

  if (cost == 0.0) {
    rep.x = x;
    rep.final_cost = 0.0;
    rep.reason = StopReason::ZeroCost;
    return rep;
  }

  const int n = static_cast<int>(x.size());
  bool recompute_jacobian = true;
  Eigen::MatrixXd jt_j;
  Eigen::VectorXd jt_r;

  for (int it = 0; it < opts.max_iterations; ++it) {
    rep.iterations = it + 1;

    if (recompute_jacobian) {
      std::vector<int> flagged;
      const Eigen::MatrixXd j = numeric_jacobian(f, x, units, opts, &flagged);
      rep.evaluations += 2 * n;
      for (int c : flagged) rep.one_sided_columns.push_back(c);
      // Work in scaled variables u = x / s, so J_u = J_x * s.
      jt_j = (j.transpose() * j) * (s * s);
      jt_r = (j.transpose() * r) * s;
      recompute_jacobian = false;
    }

    Eigen::MatrixXd a = jt_j;
    a.diagonal().array() += lambda;
    const Eigen::VectorXd du = a.ldlt().solve(-jt_r);
    if (!du.allFinite()) {
      lambda *= opts.lambda_up;
      ++rep.rejected_steps;
      if (lambda > opts.lambda_max) {
        rep.reason = StopReason::LambdaOverflow;
        break;
      }
      continue;
    }

    const Eigen::VectorXd x_trial = x + s * du;
    Eigen::VectorXd r_trial = f(x_trial);
    ++rep.evaluations;
    const double cost_trial =
        r_trial.allFinite() ? r_trial.squaredNorm()
                            : std::numeric_limits<double>::infinity();

    if (cost_trial < cost) {
      const double decrease = cost - cost_trial;
      x = x_trial;
      r.swap(r_trial);
      cost = cost_trial;
      rep.cost_trace.push_back(cost);
      ++rep.accepted_steps;
      lambda = std::max(lambda / opts.lambda_down, 1e-14);
      recompute_jacobian = true;

      if (cost == 0.0) {
        rep.reason = StopReason::ZeroCost;
        break;
      }
      if (decrease <= opts.cost_tolerance * std::max(cost, 1e-300)) {
        rep.reason = StopReason::CostTolerance;
        break;
      }
      if (du.norm() <= opts.step_tolerance) {
        rep.reason = StopReason::StepTolerance;
        break;
      }
    } else {
      lambda *= opts.lambda_up;
      ++rep.rejected_steps;
      if (lambda > opts.lambda_max) {
        rep.reason = StopReason::LambdaOverflow;
        break;
      }
    }
  }

  rep.x = x;
  rep.final_cost = cost;
  return rep;
}

SolveReport solve_system(ResidualSystem& system, const Eigen::VectorXd& x0,
                         const SolverOptions& opts) {
  const auto units = system.units();
  ResidualFn f = [&system](const Eigen::VectorXd& x) {
    return system.evaluate(x);
  };

  const bool has_tracker_rows =
      std::any_of(system.blocks().begin(), system.blocks().end(),
                  [](const ResidualSystem::BlockSpan& b) {
                    return b.kind == BlockKind::Tracker;
                  });

  if (!has_tracker_rows || system.selection().has_tracker_pose())
    return levenberg_marquardt(f, x0, units, opts);

  // Alternate: fit the tracker pose in closed form, then a short LM pass on
  // the kinematic parameters, and repeat. Short passes keep the two blocks
  // tightly coupled; a full inner solve against a stale pose zigzags.
  SolverOptions inner_opts = opts;
  inner_opts.max_iterations = std::min(opts.max_iterations, 8);

  SolveReport rep;
  Eigen::VectorXd x = x0;
  double prev_cost = std::numeric_limits<double>::infinity();
  for (int round = 0; round < opts.tracker_outer_iterations; ++round) {
    const RigidTransform before = system.tracker_pose();
    system.refit_tracker_pose(x);
    const RigidTransform after = system.tracker_pose();

    SolveReport inner = levenberg_marquardt(f, x, units, inner_opts);
    if (round == 0) {
      rep = inner;
    } else {
      rep.x = inner.x;
      rep.final_cost = inner.final_cost;
      rep.iterations += inner.iterations;
      rep.accepted_steps += inner.accepted_steps;
      rep.rejected_steps += inner.rejected_steps;
      rep.evaluations += inner.evaluations;
      rep.reason = inner.reason;
      rep.cost_trace.insert(rep.cost_trace.end(), inner.cost_trace.begin(),
                            inner.cost_trace.end());
    }
    x = inner.x;

    const double pose_shift =
        (before.translation() - after.translation()).norm() +
        (before.linear() - after.linear()).norm();
    const bool pose_stable = round > 0 && pose_shift < 1e-14;
    const bool cost_stable =
        prev_cost - inner.final_cost <=
        opts.cost_tolerance * std::max(inner.final_cost, 1e-300);
    prev_cost = inner.final_cost;
    if (pose_stable || (round > 0 && cost_stable)) break;
  }
  // Final pose refresh so the reported pose matches the reported parameters.
  system.refit_tracker_pose(x);
  rep.final_cost = f(x).squaredNorm();
  ++rep.evaluations;
  return rep;
}

}  // namespace chaincal
