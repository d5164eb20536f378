// Command-line front end: calibrate, evaluate, observability, perturb-study,
// and synth subcommands over the chaincal core library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chaincal/evaluation.hpp"
#include "chaincal/model_io.hpp"
#include "chaincal/observability.hpp"
#include "chaincal/run.hpp"
#include "chaincal/solver.hpp"
#include "chaincal/synth.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace chaincal;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

RobotModel load_model_arg(const std::string& arg) {
  return (arg.empty() || arg == "nominal") ? nominal_robot_model()
                                           : load_model(arg);
}

std::vector<Dataset> load_data_args(const std::vector<std::string>& args) {
  std::vector<Dataset> out;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--data expects tag=path, got: " + a);
    out.push_back(load_csv(a.substr(eq + 1), provenance_from_name(a.substr(0, eq))));
  }
  return out;
}

// Applies common command-line overrides on top of a loaded run config.
struct ConfigOverrides {
  std::string preset, camera_mode, output_dir;
  std::optional<double> perturbation, split_ratio;
  std::optional<std::uint64_t> perturb_seed, split_seed;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "parameter preset override");
    cmd->add_option("--camera-mode", camera_mode,
                    "camera mode override (none|fixed|calibrated)");
    cmd->add_option("--output", output_dir, "output directory override");
    cmd->add_option("--perturbation", perturbation, "perturbation level override");
    cmd->add_option("--perturb-seed", perturb_seed, "perturbation seed override");
    cmd->add_option("--split-ratio", split_ratio, "train fraction override");
    cmd->add_option("--split-seed", split_seed, "split seed override");
  }

  void apply(RunConfig& cfg) const {
    if (!preset.empty()) cfg.preset = preset;
    if (!camera_mode.empty()) cfg.camera_mode = camera_mode_from_name(camera_mode);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (perturbation) cfg.perturbation = *perturbation;
    if (perturb_seed) cfg.perturb_seed = *perturb_seed;
    if (split_ratio) cfg.split_ratio = *split_ratio;
    if (split_seed) cfg.split_seed = *split_seed;
    cfg.blocks.camera_mode = cfg.camera_mode;
  }
};

int cmd_calibrate(const std::string& config_path, const ConfigOverrides& over) {
  RunConfig cfg = load_run_config(config_path);
  over.apply(cfg);
  RunResult res = run_calibration_files(cfg);
  std::cout << result_to_json(cfg, res).dump(2) << '\n';
  return 0;
}

int cmd_evaluate(const std::string& model_arg,
                 const std::vector<std::string>& data_args, bool tracker_refit) {
  const RobotModel model = load_model_arg(model_arg);
  const std::vector<Dataset> datasets = load_data_args(data_args);
  if (datasets.empty()) throw ConfigError("evaluate needs at least one --data");

  SystemOptions opts;
  bool any_pixels = false;
  const Dataset* tracker_data = nullptr;
  for (const auto& d : datasets) {
    switch (d.provenance) {
      case Provenance::SelfContact: opts.self_contact = true; break;
      case Provenance::PlaneH1:
      case Provenance::PlaneH2:
      case Provenance::PlaneV: opts.planes = true; break;
      case Provenance::Tracker: tracker_data = &d; break;
      case Provenance::Synthetic: break;
    }
    if (d.pixel_count() > 0) any_pixels = true;
  }
  opts.self_observation = any_pixels && !model.intrinsics.empty();
  opts.camera_mode =
      opts.self_observation ? CameraMode::FixedCams : CameraMode::NoCams;

  json out;
  if (opts.self_contact || opts.planes || opts.self_observation) {
    ParamSelection none; // evaluation only, nothing estimated
    ResidualSystem system = assemble(model, none, datasets, opts, ScalePolicy{});
    out["report"] = eval_to_json(rmse(system, Eigen::VectorXd(0)));
  }
  if (tracker_data) {
    TrackerEval te = tracker_rmse(model, *tracker_data,
                                  tracker_refit
                                      ? std::optional<RigidTransform>{}
                                      : std::optional<RigidTransform>{
                                            RigidTransform::Identity()});
    out["tracker"] = json{{"rmse_m", te.rmse}, {"rows", te.rows},
                          {"pose_refit", tracker_refit}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_observability(const std::string& config_path, const ConfigOverrides& over) {
  RunConfig cfg = load_run_config(config_path);
  over.apply(cfg);
  const RobotModel model = load_model_arg(cfg.model_path);
  if (cfg.data.empty()) throw ConfigError("run config names no datasets");
  std::vector<Dataset> datasets;
  for (const auto& [tag, path] : cfg.data) datasets.push_back(load_csv(path, tag));

  ParamSelection sel = preset_selection(model, cfg.preset, cfg.camera_mode,
                                        cfg.tie_ee_lengths);
  SystemOptions opts = cfg.blocks;
  opts.camera_mode = cfg.camera_mode;
  ResidualSystem system = assemble(model, sel, datasets, opts, cfg.scale);

  int n_configs = 0;
  for (const auto& d : datasets) n_configs += d.pose_count();

  const Eigen::VectorXd x0 = system.initial_params();
  const auto f = [&](const Eigen::VectorXd& x) { return system.evaluate(x); };
  const Eigen::MatrixXd jac = numeric_jacobian(f, x0, system.units(), cfg.solver);
  const ObservabilityReport rep = observability(jac, n_configs);

  json j;
  j["n_configs"] = rep.n_configs;
  j["m_params"] = rep.m_params;
  j["numerical_rank"] = rep.numerical_rank;
  j["o1"] = rep.o1;
  j["o2"] = rep.o2;
  j["o3"] = rep.o3;
  j["o4"] = rep.o4;
  json sv = json::array();
  for (int i = 0; i < rep.singular_values.size(); ++i)
    sv.push_back(rep.singular_values[i]);
  j["singular_values"] = std::move(sv);
  json cols = json::object();
  for (int i = 0; i < sel.size(); ++i)
    cols[sel.entries[static_cast<std::size_t>(i)].label] =
        rep.column_norms[static_cast<std::size_t>(i)];
  j["column_norms"] = std::move(cols);
  json flat = json::array();
  for (int i : rep.unidentifiable)
    flat.push_back(sel.entries[static_cast<std::size_t>(i)].label);
  j["unidentifiable"] = std::move(flat);
  j["near_noise_floor"] = rep.near_noise_floor;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_perturb_study(const std::string& config_path, const ConfigOverrides& over,
                      double level, int trials, std::uint64_t seed0) {
  if (trials < 1) throw ConfigError("perturb-study needs at least one trial");
  RunConfig cfg = load_run_config(config_path);
  over.apply(cfg);
  const std::string out_dir = cfg.output_dir;
  cfg.output_dir.clear(); // individual trials write nothing

  const RobotModel model = load_model_arg(cfg.model_path);
  if (cfg.data.empty()) throw ConfigError("run config names no datasets");
  std::vector<Dataset> datasets;
  for (const auto& [tag, path] : cfg.data) datasets.push_back(load_csv(path, tag));

  std::vector<std::string> labels;
  std::vector<ParamUnit> units;
  std::vector<std::vector<double>> corr; // per parameter, across trials
  std::vector<double> final_costs;
  for (int t = 0; t < trials; ++t) {
    cfg.perturbation = level;
    cfg.perturb_seed = seed0 + static_cast<std::uint64_t>(t);
    RunResult res = run_calibration(model, datasets, cfg);
    const auto cs = corrections(res.selection, res.x, res.baseline);
    if (t == 0) {
      for (const auto& c : cs) {
        labels.push_back(c.label);
        units.push_back(c.unit);
      }
      corr.resize(cs.size());
    }
    for (std::size_t i = 0; i < cs.size(); ++i) corr[i].push_back(cs[i].value);
    final_costs.push_back(res.report.final_cost);
  }

  json j;
  j["level"] = level;
  j["trials"] = trials;
  j["seed0"] = seed0;
  json per_param = json::object();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Stats s = mean_sd(corr[i]);
    per_param[labels[i]] =
        json{{"mean", s.mean},
             {"sd", s.sd},
             {"unit", units[i] == ParamUnit::Radian ? "rad" : "m"}};
  }
  j["corrections"] = std::move(per_param);
  const Stats cost = mean_sd(final_costs);
  j["final_cost"] = json{{"mean", cost.mean}, {"sd", cost.sd}};
  std::cout << j.dump(2) << '\n';

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "perturb_study.csv");
    if (!csv) throw ConfigError("cannot write to " + out_dir);
    csv << "label,unit,mean,sd,n\n";
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Stats s = mean_sd(corr[i]);
      csv << labels[i] << ',' << (units[i] == ParamUnit::Radian ? "rad" : "m")
          << ',' << num(s.mean) << ',' << num(s.sd) << ',' << s.n << '\n';
    }
  }
  return 0;
}

struct SynthArgs {
  std::string output;
  std::string model_arg;
  std::uint64_t seed = 1;
  double contact_sigma = 0.0, pixel_sigma = 0.0, tracker_sigma = 0.0;
  int tracker_poses = 0;
  bool no_planes = false, no_cameras = false;
  std::vector<int> st_grid{4, 4, 2};
  int st_orientations = 9;
  std::vector<int> plane_grid{5, 5};
  int plane_orientations = 5;
};

int cmd_synth(const SynthArgs& a) {
  const RobotModel truth = load_model_arg(a.model_arg);
  SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.contact_sigma = a.contact_sigma;
  cfg.pixel_sigma = a.pixel_sigma;
  cfg.tracker_sigma = a.tracker_sigma;
  cfg.tracker_poses = a.tracker_poses;
  cfg.include_planes = !a.no_planes;
  cfg.include_cameras = !a.no_cameras;
  if (a.st_grid.size() != 3) throw ConfigError("--st-grid expects nx ny nz");
  cfg.st_nx = a.st_grid[0];
  cfg.st_ny = a.st_grid[1];
  cfg.st_nz = a.st_grid[2];
  cfg.st_orientations = a.st_orientations;
  if (a.plane_grid.size() != 2) throw ConfigError("--plane-grid expects nx ny");
  cfg.plane_nx = a.plane_grid[0];
  cfg.plane_ny = a.plane_grid[1];
  cfg.plane_orientations = a.plane_orientations;

  const SynthResult res = generate(truth, cfg);

  fs::create_directories(a.output);
  const fs::path dir(a.output);
  json files = json::object();
  for (const auto& d : res.datasets) {
    std::string tag;
    switch (d.provenance) {
      case Provenance::SelfContact: tag = "st"; break;
      case Provenance::PlaneH1: tag = "hp1"; break;
      case Provenance::PlaneH2: tag = "hp2"; break;
      case Provenance::PlaneV: tag = "vp"; break;
      case Provenance::Tracker: tag = "lt"; break;
      case Provenance::Synthetic: tag = "synthetic"; break;
    }
    const std::string name = tag + ".csv";
    save_csv((dir / name).string(), d);
    files[tag] = json{{"file", name},
                      {"poses", d.pose_count()},
                      {"records", d.record_count()}};
  }
  save_model((dir / "truth.json").string(), truth);

  json j;
  j["seed"] = cfg.seed;
  j["poses"] = res.poses;
  j["ik_failures"] = res.ik_failures;
  j["datasets"] = std::move(files);
  json pose_rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(res.tracker_pose.matrix()(r, c));
    pose_rows.push_back(std::move(row));
  }
  j["tracker_pose"] = std::move(pose_rows);
  {
    std::ofstream out(dir / "gen.json");
    if (!out) throw ConfigError("cannot write to " + a.output);
    out << j.dump(2) << '\n';
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-chain kinematic calibration from contact, planar, "
               "marker, and tracker measurements"};
  app.require_subcommand(1);

  std::string config_path;
  ConfigOverrides over;
  auto* calibrate = app.add_subcommand("calibrate", "run a calibration");
  calibrate->add_option("--config", config_path, "run config JSON")->required();
  over.add_flags(calibrate);

  std::string eval_model;
  std::vector<std::string> eval_data;
  bool tracker_refit = true;
  auto* evaluate = app.add_subcommand("evaluate", "RMSE of a model on datasets");
  evaluate->add_option("--model", eval_model, "model JSON or 'nominal'");
  evaluate->add_option("--data", eval_data, "tag=path (st, hp1, hp2, vp, lt)");
  evaluate->add_flag("!--no-tracker-refit", tracker_refit,
                     "evaluate tracker rows against the identity pose");

  std::string obs_config;
  ConfigOverrides obs_over;
  auto* obs = app.add_subcommand("observability",
                                 "singular-value indices of the system Jacobian");
  obs->add_option("--config", obs_config, "run config JSON")->required();
  obs_over.add_flags(obs);

  std::string study_config;
  ConfigOverrides study_over;
  double study_level = 3.0;
  int study_trials = 20;
  std::uint64_t study_seed = 1;
  auto* study = app.add_subcommand("perturb-study",
                                   "repeated solves from perturbed starts");
  study->add_option("--config", study_config, "run config JSON")->required();
  study->add_option("--level", study_level, "perturbation level p");
  study->add_option("--trials", study_trials, "number of seeded trials");
  study->add_option("--seed", study_seed, "first trial seed");
  study_over.add_flags(study);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate measurement data");
  synth->add_option("--output", synth_args.output, "output directory")->required();
  synth->add_option("--model", synth_args.model_arg, "truth model JSON or 'nominal'");
  synth->add_option("--seed", synth_args.seed, "master seed");
  synth->add_option("--contact-sigma", synth_args.contact_sigma, "contact noise (m)");
  synth->add_option("--pixel-sigma", synth_args.pixel_sigma, "pixel noise (px)");
  synth->add_option("--tracker-sigma", synth_args.tracker_sigma, "tracker noise (m)");
  synth->add_option("--tracker-poses", synth_args.tracker_poses, "tracker pose count");
  synth->add_flag("--no-planes", synth_args.no_planes, "skip plane datasets");
  synth->add_flag("--no-cameras", synth_args.no_cameras, "skip marker observations");
  synth->add_option("--st-grid", synth_args.st_grid, "contact grid nx ny nz")
      ->expected(3);
  synth->add_option("--st-orientations", synth_args.st_orientations,
                    "contact orientation combos (1-9)");
  synth->add_option("--plane-grid", synth_args.plane_grid, "plane grid nx ny")
      ->expected(2);
  synth->add_option("--plane-orientations", synth_args.plane_orientations,
                    "plane orientation combos (1-5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*calibrate) return cmd_calibrate(config_path, over);
    if (*evaluate) return cmd_evaluate(eval_model, eval_data, tracker_refit);
    if (*obs) return cmd_observability(obs_config, obs_over);
    if (*study)
      return cmd_perturb_study(study_config, study_over, study_level,
                               study_trials, study_seed);
    if (*synth) return cmd_synth(synth_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
