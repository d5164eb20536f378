#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chaincal/residuals.hpp"

namespace chaincal {

// RMSE of one residual kind. `scaled` uses the optimization scale factors
// (one term per residual row); `raw` strips them and uses the natural unit —
// meters for contact/plane/tracker rows, pixels for reprojection, where it is
// the per-observation 2D error norm. Rows that evaluate to NaN (markers that
// lost visibility) are excluded and counted.
struct BlockRmse {
  BlockKind kind = BlockKind::SelfContact;
  int rows = 0;     // residual rows included
  int skipped = 0;  // non-finite rows excluded
  double scaled = 0.0;
  double raw = 0.0;
};

struct EvalReport {
  std::vector<BlockRmse> blocks;  // one entry per kind present in the system
  double total_scaled = 0.0;      // all finite rows together

  const BlockRmse* find(BlockKind kind) const;
};

EvalReport rmse(const ResidualSystem& system, const Eigen::VectorXd& x);

// Element-wise parameter corrections x - baseline; angular entries use the
// shortest signed angle. Throws ConfigError on length mismatch.
struct Correction {
  std::string label;
  ParamUnit unit = ParamUnit::Meter;
  double value = 0.0;
};

std::vector<Correction> corrections(const ParamSelection& sel,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& baseline);

// Generalization check against tracker data: RMSE of || pose·x_tracker -
// fk(joints) || over the records. With no pose given, the best-fit rigid
// pose is computed from the data (the tracker mount is a nuisance parameter
// when comparing kinematic calibrations).
struct TrackerEval {
  double rmse = 0.0;  // m
  int rows = 0;
  RigidTransform pose{RigidTransform::Identity()};
};

TrackerEval tracker_rmse(const RobotModel& model, const Dataset& data,
                         const std::optional<RigidTransform>& pose = {});

// Mean and sample standard deviation over repeated trials.
struct Stats {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

Stats mean_sd(const std::vector<double>& values);

nlohmann::json eval_to_json(const EvalReport& report);

// Long-format CSV: label,block,rows,skipped,scaled_rmse,raw_rmse,raw_unit —
// one line per (labelled report, block).
void write_rmse_csv(const std::string& path,
                    const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace chaincal
