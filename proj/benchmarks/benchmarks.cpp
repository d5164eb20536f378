#include <benchmark/benchmark.h>

#include "chaincal/model_io.hpp"
#include "chaincal/residuals.hpp"
#include "chaincal/solver.hpp"
#include "chaincal/synth.hpp"

namespace {

using namespace chaincal;

const RobotModel& model() {
  static const RobotModel m = nominal_robot_model();
  return m;
}

ResidualSystem make_system() {
  SynthConfig cfg;
  cfg.st_nx = 3;
  cfg.st_ny = 3;
  cfg.st_nz = 1;
  cfg.st_orientations = 4;
  cfg.plane_nx = 3;
  cfg.plane_ny = 3;
  cfg.plane_orientations = 2;
  cfg.seed = 7;
  const SynthResult data = generate(model(), cfg);
  ParamSelection sel =
      preset_selection(model(), "offsets", CameraMode::FixedCams);
  SystemOptions opts;
  opts.self_contact = true;
  opts.planes = true;
  opts.self_observation = true;
  opts.camera_mode = CameraMode::FixedCams;
  return assemble(model(), sel, data.datasets, opts, ScalePolicy{});
}

void bm_forward_kinematics(benchmark::State& state) {
  JointConfig q{};
  for (int i = 0; i < kJointCount; ++i) q[i] = 0.1 * i;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_kinematics(model(), "right_arm", q));
  }
}
BENCHMARK(bm_forward_kinematics);

void bm_residual_evaluate(benchmark::State& state) {
  ResidualSystem system = make_system();
  const Eigen::VectorXd x = system.initial_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(system.evaluate(x));
  }
  state.SetItemsProcessed(state.iterations() * system.residual_count());
}
BENCHMARK(bm_residual_evaluate);

void bm_numeric_jacobian(benchmark::State& state) {
  ResidualSystem system = make_system();
  const Eigen::VectorXd x = system.initial_params();
  const auto f = [&](const Eigen::VectorXd& v) { return system.evaluate(v); };
  const auto units = system.units();
  const SolverOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numeric_jacobian(f, x, units, opts));
  }
}
BENCHMARK(bm_numeric_jacobian);

void bm_plane_fit(benchmark::State& state) {
  Rng rng(11);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 100; ++i)
    pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1),
                     0.67 + 1e-4 * rng.normal());
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_plane_svd(pts));
  }
}
BENCHMARK(bm_plane_fit);

void bm_project(benchmark::State& state) {
  const CameraIntrinsics intr = model().intrinsics.at("right_camera");
  const Eigen::Vector3d p(0.1, -0.05, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(intr, p));
  }
}
BENCHMARK(bm_project);

}  // namespace

BENCHMARK_MAIN();
