#include "chaincal/run.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace chaincal {

namespace {

using nlohmann::json;

json scale_to_json(const ScalePolicy& s) {
  return json{{"eta_contact", s.eta_contact}, {"eta_plane", s.eta_plane},
              {"eta_pixel", s.eta_pixel},     {"eta_tracker", s.eta_tracker},
              {"p_contact", s.p_contact},     {"p_plane", s.p_plane},
              {"p_pixel", s.p_pixel},         {"pixel_per_meter", s.pixel_per_meter},
              {"fov_pixels", s.fov_pixels},   {"fov_angle", s.fov_angle}};
}

ScalePolicy scale_from_json(const json& j) {
  ScalePolicy s;
  s.eta_contact = j.value("eta_contact", s.eta_contact);
  s.eta_plane = j.value("eta_plane", s.eta_plane);
  s.eta_pixel = j.value("eta_pixel", s.eta_pixel);
  s.eta_tracker = j.value("eta_tracker", s.eta_tracker);
  s.p_contact = j.value("p_contact", s.p_contact);
  s.p_plane = j.value("p_plane", s.p_plane);
  s.p_pixel = j.value("p_pixel", s.p_pixel);
  s.pixel_per_meter = j.value("pixel_per_meter", s.pixel_per_meter);
  s.fov_pixels = j.value("fov_pixels", s.fov_pixels);
  s.fov_angle = j.value("fov_angle", s.fov_angle);
  if (s.eta_contact <= 0 || s.eta_plane <= 0 || s.eta_pixel <= 0 ||
      s.eta_tracker <= 0 || s.p_contact <= 0 || s.p_plane <= 0 ||
      s.p_pixel <= 0 || s.fov_pixels <= 0 || s.fov_angle <= 0)
    throw ConfigError("scale policy weights must be positive");
  return s;
}

json solver_to_json(const SolverOptions& o) {
  return json{{"max_iterations", o.max_iterations},
              {"lambda0", o.lambda0},
              {"lambda_down", o.lambda_down},
              {"lambda_up", o.lambda_up},
              {"lambda_max", o.lambda_max},
              {"cost_tolerance", o.cost_tolerance},
              {"step_tolerance", o.step_tolerance},
              {"fd_step_m", o.fd_step_m},
              {"fd_step_rad", o.fd_step_rad},
              {"param_scale", o.param_scale},
              {"tracker_outer_iterations", o.tracker_outer_iterations}};
}

SolverOptions solver_from_json(const json& j) {
  SolverOptions o;
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.lambda0 = j.value("lambda0", o.lambda0);
  o.lambda_down = j.value("lambda_down", o.lambda_down);
  o.lambda_up = j.value("lambda_up", o.lambda_up);
  o.lambda_max = j.value("lambda_max", o.lambda_max);
  o.cost_tolerance = j.value("cost_tolerance", o.cost_tolerance);
  o.step_tolerance = j.value("step_tolerance", o.step_tolerance);
  o.fd_step_m = j.value("fd_step_m", o.fd_step_m);
  o.fd_step_rad = j.value("fd_step_rad", o.fd_step_rad);
  o.param_scale = j.value("param_scale", o.param_scale);
  o.tracker_outer_iterations =
      j.value("tracker_outer_iterations", o.tracker_outer_iterations);
  if (o.max_iterations < 1 || o.cost_tolerance <= 0 || o.step_tolerance <= 0 ||
      o.lambda_down <= 1 || o.lambda_up <= 1 || o.fd_step_m <= 0 ||
      o.fd_step_rad <= 0 || o.param_scale <= 0)
    throw ConfigError("invalid solver options");
  return o;
}

json blocks_to_json(const SystemOptions& b) {
  return json{{"self_contact", b.self_contact},
              {"planes", b.planes},
              {"self_observation", b.self_observation},
              {"tracker", b.tracker}};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json transform_to_json(const RigidTransform& t) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(t.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_to_json(const SolveReport& r) {
  json j;
  j["initial_cost"] = r.initial_cost;
  j["final_cost"] = r.final_cost;
  j["iterations"] = r.iterations;
  j["accepted_steps"] = r.accepted_steps;
  j["rejected_steps"] = r.rejected_steps;
  j["evaluations"] = r.evaluations;
  j["stop_reason"] = stop_reason_name(r.reason);
  j["cost_trace"] = r.cost_trace;
  j["one_sided_columns"] = r.one_sided_columns;
  return j;
}

std::vector<Dataset> split_part(const std::vector<Dataset>& datasets,
                                double ratio, std::uint64_t seed, bool train) {
  std::vector<Dataset> out;
  for (const auto& d : datasets) {
    auto [tr, te] = split(d, ratio, seed);
    Dataset& part = train ? tr : te;
    if (!part.records.empty()) out.push_back(std::move(part));
  }
  return out;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.model_path = j.value("model", std::string());
    if (cfg.model_path == "nominal") cfg.model_path.clear();
    if (j.contains("data"))
      for (const auto& [tag, path] : j.at("data").items())
        cfg.data[provenance_from_name(tag)] = path.get<std::string>();
    cfg.preset = j.value("preset", cfg.preset);
    if (j.contains("camera_mode"))
      cfg.camera_mode = camera_mode_from_name(j.at("camera_mode").get<std::string>());
    cfg.tie_ee_lengths = j.value("tie_ee_lengths", cfg.tie_ee_lengths);
    if (j.contains("blocks")) {
      const json& b = j.at("blocks");
      cfg.blocks.self_contact = b.value("self_contact", false);
      cfg.blocks.planes = b.value("planes", false);
      cfg.blocks.self_observation = b.value("self_observation", false);
      cfg.blocks.tracker = b.value("tracker", false);
    } else {
      cfg.blocks.self_contact = true;
    }
    if (j.contains("scale")) cfg.scale = scale_from_json(j.at("scale"));
    if (j.contains("solver")) cfg.solver = solver_from_json(j.at("solver"));
    cfg.precalibrate_cameras = j.value("precalibrate_cameras", false);
    if (j.contains("split")) {
      cfg.split_ratio = j.at("split").value("ratio", cfg.split_ratio);
      cfg.split_seed = j.at("split").value("seed", cfg.split_seed);
    }
    if (j.contains("perturbation")) {
      cfg.perturbation = j.at("perturbation").value("level", 0.0);
      cfg.perturb_seed = j.at("perturbation").value("seed", cfg.perturb_seed);
    }
    cfg.output_dir = j.value("output_dir", std::string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  if (cfg.split_ratio <= 0.0 || cfg.split_ratio > 1.0)
    throw ConfigError("split ratio must be in (0, 1]");
  if (cfg.perturbation < 0.0) throw ConfigError("perturbation level must be >= 0");
  cfg.blocks.camera_mode = cfg.camera_mode;
  return cfg;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["model"] = cfg.model_path.empty() ? "nominal" : cfg.model_path;
  json data = json::object();
  for (const auto& [tag, path] : cfg.data) data[provenance_name(tag)] = path;
  j["data"] = std::move(data);
  j["preset"] = cfg.preset;
  j["camera_mode"] = camera_mode_name(cfg.camera_mode);
  j["tie_ee_lengths"] = cfg.tie_ee_lengths;
  j["blocks"] = blocks_to_json(cfg.blocks);
  j["scale"] = scale_to_json(cfg.scale);
  j["solver"] = solver_to_json(cfg.solver);
  j["precalibrate_cameras"] = cfg.precalibrate_cameras;
  j["split"] = json{{"ratio", cfg.split_ratio}, {"seed", cfg.split_seed}};
  j["perturbation"] = json{{"level", cfg.perturbation}, {"seed", cfg.perturb_seed}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse run config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

RunResult run_calibration(const RobotModel& model,
                          const std::vector<Dataset>& datasets,
                          const RunConfig& cfg) {
  RunResult res;
  RobotModel base = model;

  std::vector<Dataset> train = split_part(datasets, cfg.split_ratio,
                                          cfg.split_seed, true);
  std::vector<Dataset> test = split_part(datasets, cfg.split_ratio,
                                         cfg.split_seed, false);
  if (train.empty()) throw ConfigError("no training data after the split");

  // Stage 1 (optional): camera mounting from marker observations alone.
  if (cfg.precalibrate_cameras) {
    if (cfg.camera_mode == CameraMode::NoCams)
      throw ConfigError("camera precalibration needs a camera mode with cameras");
    ParamSelection cam_sel = camera_dh_selection(base);
    SystemOptions cam_opts;
    cam_opts.self_observation = true;
    cam_opts.camera_mode = CameraMode::CamCalib;
    ResidualSystem cam_sys = assemble(base, cam_sel, train, cam_opts, cfg.scale);
    SolveReport cam_report =
        solve_system(cam_sys, cam_sys.initial_params(), cfg.solver);
    base = apply_params(base, cam_sel, cam_report.x);
    res.precal_report = std::move(cam_report);
  }

  res.selection = preset_selection(base, cfg.preset, cfg.camera_mode,
                                   cfg.tie_ee_lengths);
  SystemOptions opts = cfg.blocks;
  opts.camera_mode = cfg.camera_mode;
  if (opts.tracker && !res.selection.has_tracker_pose()) {
    // pose handled by alternation inside solve_system
  }

  ResidualSystem system = assemble(base, res.selection, train, opts, cfg.scale);
  res.baseline = read_params(base, res.selection);
  res.x0 = system.initial_params();
  if (cfg.perturbation > 0.0)
    res.x0 = perturb(res.x0, res.selection, cfg.perturbation, cfg.perturb_seed);

  res.baseline_train_eval = rmse(system, system.initial_params());
  res.report = solve_system(system, res.x0, cfg.solver);
  res.x = res.report.x;
  res.train_eval = rmse(system, res.x);
  res.model = system.model_at(res.x);
  res.tracker_pose = res.selection.has_tracker_pose()
                         ? ResidualSystem::components_to_pose(
                               res.x.tail<6>())
                         : system.tracker_pose();
  res.skipped_records = system.skipped_records();

  if (!test.empty()) {
    ResidualSystem test_system = assemble(base, res.selection, test, opts, cfg.scale);
    test_system.set_tracker_pose(res.tracker_pose);
    res.baseline_test_eval = rmse(test_system, test_system.initial_params());
    res.test_eval = rmse(test_system, res.x);
  }
  return res;
}

nlohmann::json result_to_json(const RunConfig& cfg, const RunResult& res) {
  json j;
  j["config"] = run_config_to_json(cfg);
  j["model_fingerprint"] = model_fingerprint(res.model);
  json labels = json::array();
  for (const auto& e : res.selection.entries) labels.push_back(e.label);
  j["labels"] = std::move(labels);
  j["baseline"] = vector_to_json(res.baseline);
  j["x0"] = vector_to_json(res.x0);
  j["x"] = vector_to_json(res.x);
  json corr = json::object();
  for (const auto& c : corrections(res.selection, res.x, res.baseline))
    corr[c.label] = c.value;
  j["corrections"] = std::move(corr);
  j["solve"] = report_to_json(res.report);
  if (res.precal_report) j["camera_precalibration"] = report_to_json(*res.precal_report);
  j["tracker_pose"] = transform_to_json(res.tracker_pose);
  j["skipped_records"] = res.skipped_records;
  j["train"] = eval_to_json(res.train_eval);
  j["train_before"] = eval_to_json(res.baseline_train_eval);
  if (res.test_eval) j["test"] = eval_to_json(*res.test_eval);
  if (res.baseline_test_eval) j["test_before"] = eval_to_json(*res.baseline_test_eval);
  return j;
}

RunResult run_calibration_files(const RunConfig& cfg) {
  RobotModel model =
      cfg.model_path.empty() ? nominal_robot_model() : load_model(cfg.model_path);
  if (cfg.data.empty()) throw ConfigError("run config names no datasets");
  std::vector<Dataset> datasets;
  for (const auto& [tag, path] : cfg.data) datasets.push_back(load_csv(path, tag));

  RunResult res = run_calibration(model, datasets, cfg);

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    {
      std::ofstream out(dir / "resolved_config.json");
      if (!out) throw ConfigError("cannot write to " + cfg.output_dir);
      out << run_config_to_json(cfg).dump(2) << '\n';
    }
    {
      std::ofstream out(dir / "result.json");
      out << result_to_json(cfg, res).dump(2) << '\n';
    }
    save_model((dir / "model.json").string(), res.model);
    std::vector<std::pair<std::string, EvalReport>> rows;
    rows.emplace_back("train_before", res.baseline_train_eval);
    rows.emplace_back("train", res.train_eval);
    if (res.baseline_test_eval) rows.emplace_back("test_before", *res.baseline_test_eval);
    if (res.test_eval) rows.emplace_back("test", *res.test_eval);
    write_rmse_csv((dir / "rmse.csv").string(), rows);
  }
  return res;
}

}  // namespace chaincal
