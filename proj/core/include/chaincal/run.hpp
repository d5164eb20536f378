#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chaincal/evaluation.hpp"
#include "chaincal/model_io.hpp"
#include "chaincal/solver.hpp"
#include "chaincal/synth.hpp"

namespace chaincal {

// Everything one calibration run needs, loadable from a JSON file where
// every key is optional and falls back to these defaults. The resolved
// (fully explicit) form is written next to the results so a run can be
// reproduced from its output directory alone.
struct RunConfig {
  std::string model_path;                     // empty = built-in nominal model
  std::map<Provenance, std::string> data;     // dataset CSV path per tag
  std::string preset = "offsets";
  CameraMode camera_mode = CameraMode::FixedCams;
  bool tie_ee_lengths = false;
  SystemOptions blocks;                       // camera_mode is mirrored in here
  ScalePolicy scale;
  SolverOptions solver;
  // Solve the camera mounting first on self-observation alone (arm
  // parameters held at their loaded values), then run the main stage on the
  // updated model.
  bool precalibrate_cameras = false;
  double split_ratio = 0.7;
  std::uint64_t split_seed = 1;
  double perturbation = 0.0;                  // level p; 0 = start at nominal
  std::uint64_t perturb_seed = 1;
  std::string output_dir;                     // empty = write nothing
};

RunConfig run_config_from_json(const nlohmann::json& j); // throws ConfigError
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

struct RunResult {
  ParamSelection selection;
  Eigen::VectorXd baseline;       // selection values of the loaded model
  Eigen::VectorXd x0;             // solve start (perturbed baseline)
  Eigen::VectorXd x;              // solution
  SolveReport report;
  std::optional<SolveReport> precal_report;
  RobotModel model;               // calibrated model
  RigidTransform tracker_pose{RigidTransform::Identity()};
  EvalReport train_eval;
  std::optional<EvalReport> test_eval;
  EvalReport baseline_train_eval; // loaded model, before calibration
  std::optional<EvalReport> baseline_test_eval;
  int skipped_records = 0;
};

// The pipeline on in-memory data: split, optional camera precalibration,
// main solve, train/test/baseline evaluation. Does not touch the filesystem.
RunResult run_calibration(const RobotModel& model,
                          const std::vector<Dataset>& datasets,
                          const RunConfig& cfg);

// File-level wrapper: loads model and datasets per cfg, runs the pipeline,
// and (when output_dir is set) writes resolved_config.json, result.json,
// rmse.csv, and model.json. Outputs carry no timestamps: a rerun of the
// same config and data is byte-identical.
RunResult run_calibration_files(const RunConfig& cfg);

nlohmann::json result_to_json(const RunConfig& cfg, const RunResult& res);

}  // namespace chaincal
