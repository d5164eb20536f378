// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
// with the measured numbers; the process exits nonzero if any criterion
// fails. Everything runs on generated data and is fully self-contained.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "chaincal/evaluation.hpp"
#include "chaincal/model_io.hpp"
#include "chaincal/observability.hpp"
#include "chaincal/run.hpp"
#include "chaincal/solver.hpp"
#include "chaincal/synth.hpp"

using namespace chaincal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Independent 1-3 parameter optimizer: dense grid then cyclic golden-section.

using CostFn = std::function<double(const Eigen::VectorXd&)>;

double golden_1d(const std::function<double(double)>& f, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::VectorXd grid_golden(const CostFn& cost, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, int grid = 15) {
  const int n = static_cast<int>(lo.size());
  Eigen::VectorXd best = lo;
  double fbest = std::numeric_limits<double>::infinity();
  const int total = static_cast<int>(std::pow(grid, n));
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) {
      const int i = rem % grid;
      rem /= grid;
      x[k] = lo[k] + (hi[k] - lo[k]) * i / (grid - 1);
    }
    const double f = cost(x);
    if (f < fbest) {
      fbest = f;
      best = x;
    }
  }
  Eigen::VectorXd span = (hi - lo) / (grid - 1);
  for (int cycle = 0; cycle < 300; ++cycle) {
    double moved = 0;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd x = best;
      const double nk = golden_1d(
          [&](double v) {
            x[k] = v;
            return cost(x);
          },
          best[k] - 2 * span[k], best[k] + 2 * span[k]);
      moved += std::abs(nk - best[k]);
      best[k] = nk;
    }
    if (moved < 1e-13) break;
  }
  return best;
}

// Quaternion-eigenvector rigid fit, independent of the library's SVD route.
RigidTransform horn_fit(const std::vector<Eigen::Vector3d>& src,
                        const std::vector<Eigen::Vector3d>& dst) {
  const int n = static_cast<int>(src.size());
  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    ca += src[static_cast<std::size_t>(i)];
    cb += dst[static_cast<std::size_t>(i)];
  }
  ca /= n;
  cb /= n;
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i)
    S += (src[static_cast<std::size_t>(i)] - ca) *
         (dst[static_cast<std::size_t>(i)] - cb).transpose();
  const double xx = S(0, 0), xy = S(0, 1), xz = S(0, 2);
  const double yx = S(1, 0), yy = S(1, 1), yz = S(1, 2);
  const double zx = S(2, 0), zy = S(2, 1), zz = S(2, 2);
  Eigen::Matrix4d N;
  N << xx + yy + zz, yz - zy, zx - xz, xy - yx,
       yz - zy, xx - yy - zz, xy + yx, zx + xz,
       zx - xz, xy + yx, yy - xx - zz, yz + zy,
       xy - yx, zx + xz, yz + zy, zz - xx - yy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(N);
  const Eigen::Vector4d q = es.eigenvectors().col(3);
  const Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  RigidTransform t = RigidTransform::Identity();
  t.linear() = quat.normalized().toRotationMatrix();
  t.translation() = cb - t.linear() * ca;
  return t;
}

// ---------------------------------------------------------------------------

// Combined noiseless dataset shared by criteria 1 and 2 (default grids:
// several hundred poses across contact, three planes, and both cameras).
const SynthResult& combined_data(const RobotModel& truth) {
  static const SynthResult gen = [&] {
    SynthConfig cfg;
    cfg.seed = 1;
    return generate(truth, cfg);
  }();
  return gen;
}

SystemOptions combined_blocks(CameraMode mode) {
  SystemOptions opts;
  opts.self_contact = true;
  opts.planes = true;
  opts.self_observation = true;
  opts.camera_mode = mode;
  return opts;
}

Outcome criterion1(const RobotModel& truth) {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthResult& gen = combined_data(truth);
  if (gen.poses < 200)
    return {false, false, fmt("only %d poses generated", gen.poses)};

  const ParamSelection sel =
      preset_selection(truth, "offsets", CameraMode::FixedCams);
  ResidualSystem sys = assemble(truth, sel, gen.datasets,
                                combined_blocks(CameraMode::FixedCams),
                                ScalePolicy{});
  const Eigen::VectorXd xt = sys.initial_params();

  int ok = 0;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Eigen::VectorXd x0 = perturb(xt, sel, 3.0, 1000 + s);
    const SolveReport rep = solve_system(sys, x0, SolverOptions{});
    const double err = (rep.x - xt).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (err < 1e-6) ++ok;
  }
  const double secs = seconds_since(t0);
  const bool pass = ok >= 48 && secs < 60.0;
  return {pass, false,
          fmt("offsets round-trip: %d/50 seeds within 1e-6 (worst %.2e), "
              "%d poses, %.1fs (limit 60s)",
              ok, worst, gen.poses, secs)};
}

Outcome criterion2(const RobotModel& truth) {
  const SynthResult& gen = combined_data(truth);
  const ParamSelection sel =
      preset_selection(truth, "all-dh", CameraMode::CamCalib);
  const SystemOptions opts = combined_blocks(CameraMode::CamCalib);
  ResidualSystem sys = assemble(truth, sel, gen.datasets, opts, ScalePolicy{});
  const Eigen::VectorXd xt = sys.initial_params();

  int ok = 0;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Eigen::VectorXd x0 = perturb(xt, sel, 3.0, 2000 + s);
    const SolveReport rep = solve_system(sys, x0, SolverOptions{});
    const double err = (rep.x - xt).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (err < 1e-5) ++ok;
  }

  // Noisy data, generalization on a withheld workspace sweep. The floor is
  // the positional scale of the injected noise: contact sigma in meters and
  // pixel sigma through the camera geometry (depth / focal length).
  SynthConfig noisy;
  noisy.seed = 2;
  noisy.pixel_sigma = 0.5;
  noisy.contact_sigma = 1e-4;  // 0.1 mm
  const SynthResult ngen = generate(truth, noisy);
  ResidualSystem nsys = assemble(truth, sel, ngen.datasets, opts, ScalePolicy{});
  const SolveReport nrep =
      solve_system(nsys, perturb(xt, sel, 3.0, 7), SolverOptions{});
  const RobotModel calibrated = nsys.model_at(nrep.x);

  SynthConfig withheld;
  withheld.st_nx = withheld.st_ny = withheld.st_nz = 1;
  withheld.st_orientations = 1;
  withheld.include_planes = false;
  withheld.include_cameras = false;
  withheld.tracker_poses = 200;
  withheld.seed = 5;
  const SynthResult wgen = generate(truth, withheld);
  const TrackerEval te =
      tracker_rmse(calibrated, wgen.dataset(Provenance::Tracker));

  const Eigen::Vector3d workspace_center(-0.05, -0.85, 0.9);
  JointConfig q{};
  double depth = 0.0, focal = 0.0;
  int cams = 0;
  for (const auto& chain : truth.chains) {
    if (chain.kind != ChainKind::Camera) continue;
    depth += (forward_kinematics(truth, chain, q).translation() -
              workspace_center)
                 .norm();
    focal += truth.intrinsics.at(chain.name).fx;
    ++cams;
  }
  depth /= cams;
  focal /= cams;
  const double floor_m = std::max(noisy.contact_sigma, 0.5 * depth / focal);

  const bool pass = ok >= 48 && te.rmse <= 3.0 * floor_m;
  return {pass, false,
          fmt("all-dh+calibrated-cams: %d/50 seeds within 1e-5 (worst %.2e); "
              "withheld tracker rmse %.3e m vs noise floor %.3e m (3x = %.3e)",
              ok, worst, te.rmse, floor_m, 3.0 * floor_m)};
}

Outcome criterion3(const RobotModel& truth) {
  double worst_lm = 0.0;

  // One parameter, linear.
  {
    const auto f = [](const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Constant(1, x[0] - 3.0).eval();
    };
    const std::vector<ParamUnit> units(1, ParamUnit::Meter);
    const SolveReport rep = levenberg_marquardt(
        f, Eigen::VectorXd::Zero(1), units, SolverOptions{});
    const CostFn cost = [&](const Eigen::VectorXd& x) {
      return f(x).squaredNorm();
    };
    Eigen::VectorXd lo(1), hi(1);
    lo << 0.0;
    hi << 5.0;
    const Eigen::VectorXd oracle = grid_golden(cost, lo, hi, 41);
    worst_lm = std::max(worst_lm, (rep.x - oracle).cwiseAbs().maxCoeff());
  }

  // Two parameters, nonlinear coupling.
  {
    const auto f = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd r(3);
      r << x[0] - 0.3, x[1] + 0.2, 0.5 * x[0] * x[1] + 0.05;
      return r;
    };
    const std::vector<ParamUnit> units(2, ParamUnit::Meter);
    const SolveReport rep = levenberg_marquardt(
        f, Eigen::VectorXd::Zero(2), units, SolverOptions{});
    const CostFn cost = [&](const Eigen::VectorXd& x) {
      return f(x).squaredNorm();
    };
    Eigen::VectorXd lo(2), hi(2);
    lo << -1, -1;
    hi << 1, 1;
    const Eigen::VectorXd oracle = grid_golden(cost, lo, hi);
    worst_lm = std::max(worst_lm, (rep.x - oracle).cwiseAbs().maxCoeff());
  }

  // Three parameters, nonlinear.
  {
    const auto f = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd r(4);
      r << x[0] - 0.3, x[1] + 0.2, x[2] * x[1] - 0.1, 0.5 * x[0] * x[2] + 0.05;
      return r;
    };
    const std::vector<ParamUnit> units(3, ParamUnit::Meter);
    const SolveReport rep = levenberg_marquardt(
        f, Eigen::VectorXd::Constant(3, 0.1), units, SolverOptions{});
    const CostFn cost = [&](const Eigen::VectorXd& x) {
      return f(x).squaredNorm();
    };
    Eigen::VectorXd lo(3), hi(3);
    lo << -1, -1, -1;
    hi << 1, 1, 1;
    const Eigen::VectorXd oracle = grid_golden(cost, lo, hi);
    worst_lm = std::max(worst_lm, (rep.x - oracle).cwiseAbs().maxCoeff());
  }

  // One real parameter: end-effector length from contact data.
  {
    SynthConfig cfg;
    cfg.st_nx = 3;
    cfg.st_ny = 3;
    cfg.st_nz = 1;
    cfg.st_orientations = 4;
    cfg.include_planes = false;
    cfg.include_cameras = false;
    cfg.seed = 23;
    const SynthResult gen = generate(truth, cfg);
    ParamSelection sel;
    sel.add(truth, "EE1", DHField::d);
    SystemOptions so;
    so.self_contact = true;
    ResidualSystem sys = assemble(truth, sel, gen.datasets, so, ScalePolicy{});
    Eigen::VectorXd x0 = sys.initial_params();
    x0[0] += 0.004;
    const SolveReport rep = solve_system(sys, x0, SolverOptions{});
    const CostFn cost = [&](const Eigen::VectorXd& x) {
      return sys.evaluate(x).squaredNorm();
    };
    Eigen::VectorXd lo(1), hi(1);
    lo << 0.33;
    hi << 0.37;
    const Eigen::VectorXd oracle = grid_golden(cost, lo, hi, 41);
    worst_lm = std::max(worst_lm, (rep.x - oracle).cwiseAbs().maxCoeff());
  }

  // Rigid fit vs the quaternion oracle on noisy correspondences.
  Rng rng(31415);
  double worst_fit = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d axis =
        Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    const double angle = rng.uniform(-3.0, 3.0);
    const Eigen::Matrix3d R0 = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const Eigen::Vector3d t0(rng.uniform(-2, 2), rng.uniform(-2, 2),
                             rng.uniform(-2, 2));
    std::vector<Eigen::Vector3d> src, dst;
    for (int i = 0; i < 20; ++i) {
      const Eigen::Vector3d p(rng.uniform(-1, 1), rng.uniform(-1, 1),
                              rng.uniform(-1, 1));
      const Eigen::Vector3d noise(rng.normal(0, 0.01), rng.normal(0, 0.01),
                                  rng.normal(0, 0.01));
      src.push_back(p);
      dst.push_back(R0 * p + t0 + noise);
    }
    const RigidTransform a = arun_fit(src, dst);
    const RigidTransform h = horn_fit(src, dst);
    const double gap = (a.matrix() - h.matrix()).cwiseAbs().maxCoeff();
    worst_fit = std::max(worst_fit, gap);
  }

  const bool pass = worst_lm < 1e-6 && worst_fit < 1e-8;
  return {pass, false,
          fmt("LM vs grid+golden worst gap %.2e (limit 1e-6) on 4 problems; "
              "arun vs quaternion oracle worst gap %.2e (limit 1e-8) on 100 "
              "noisy fits",
              worst_lm, worst_fit)};
}

Outcome criterion4() {
  Rng rng(4242);
  double worst_angle = 0.0, worst_resid = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d n =
        Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    Eigen::Vector3d u = n.cross(Eigen::Vector3d::UnitX());
    if (u.norm() < 1e-6) u = n.cross(Eigen::Vector3d::UnitY());
    u.normalize();
    const Eigen::Vector3d v = n.cross(u).normalized();
    const Eigen::Vector3d c(rng.uniform(-2, 2), rng.uniform(-2, 2),
                            rng.uniform(-2, 2));
    const int count = 10 + static_cast<int>(rng.uniform(0.0, 991.0));
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      pts.push_back(c + rng.uniform(-1, 1) * u + rng.uniform(-1, 1) * v);

    const Plane fit = fit_plane_svd(pts);
    worst_angle = std::max(worst_angle, fit.n.cross(n).norm());
    for (const auto& p : pts)
      worst_resid = std::max(worst_resid, std::abs(fit.n.dot(p) + fit.d));
  }
  const bool pass = worst_angle < 1e-10 && worst_resid < 1e-12;
  return {pass, false,
          fmt("100 exact planes, 10-1000 points: worst normal error %.2e rad "
              "(limit 1e-10), worst point residual %.2e m (limit 1e-12)",
              worst_angle, worst_resid)};
}

Outcome criterion5(const RobotModel& truth) {
  // Row scaling law: scaling every residual by c scales O1, O3, O4 by |c|
  // and leaves O2 unchanged.
  Rng rng(99);
  Eigen::MatrixXd J(40, 6);
  for (int r = 0; r < J.rows(); ++r)
    for (int c = 0; c < J.cols(); ++c) J(r, c) = rng.normal();
  const ObservabilityReport base = observability(J, 40);
  const double c = -2.5;
  const ObservabilityReport scaled = observability(c * J, 40);
  const double tol = 1e-12;
  bool laws = std::abs(scaled.o1 - std::abs(c) * base.o1) < tol * base.o1;
  laws = laws && std::abs(scaled.o2 - base.o2) < tol;
  laws = laws && std::abs(scaled.o3 - std::abs(c) * base.o3) < tol * base.o3;
  laws = laws && std::abs(scaled.o4 - std::abs(c) * base.o4) < tol * base.o4;

  // Zero column: O3 = O4 = 0 exactly, the column is flagged, rank drops.
  Eigen::MatrixXd Jz = J;
  Jz.col(3).setZero();
  const ObservabilityReport zr = observability(Jz, 40);
  laws = laws && zr.o3 == 0.0 && zr.o4 == 0.0;
  laws = laws && zr.unidentifiable == std::vector<int>{3};
  laws = laws && zr.numerical_rank == 5;

  // Combining chains raises the volume index on the same pose set.
  SynthConfig cfg;
  cfg.st_nx = 2;
  cfg.st_ny = 3;
  cfg.st_nz = 1;
  cfg.st_orientations = 4;
  cfg.include_planes = false;
  cfg.seed = 37;
  const SynthResult gen = generate(truth, cfg);
  const ParamSelection sel =
      preset_selection(truth, "all-dh", CameraMode::FixedCams);
  const int n = gen.dataset(Provenance::SelfContact).pose_count();
  const SolverOptions sopts;

  SystemOptions contact_only;
  contact_only.self_contact = true;
  ResidualSystem sys1 =
      assemble(truth, sel, gen.datasets, contact_only, ScalePolicy{});
  const auto f1 = [&](const Eigen::VectorXd& x) { return sys1.evaluate(x); };
  const ObservabilityReport single = observability(
      numeric_jacobian(f1, sys1.initial_params(), sys1.units(), sopts), n);

  SystemOptions with_cams = contact_only;
  with_cams.self_observation = true;
  with_cams.camera_mode = CameraMode::FixedCams;
  ResidualSystem sys2 =
      assemble(truth, sel, gen.datasets, with_cams, ScalePolicy{});
  const auto f2 = [&](const Eigen::VectorXd& x) { return sys2.evaluate(x); };
  const ObservabilityReport combined = observability(
      numeric_jacobian(f2, sys2.initial_params(), sys2.units(), sopts), n);

  // Contact alone leaves the shared-turntable direction unobservable (rank
  // deficit, O1 = 0); adding the camera chain restores full rank.
  const bool trend = combined.o1 > single.o1 &&
                     combined.numerical_rank == sel.size() &&
                     single.numerical_rank < sel.size();
  const bool pass = laws && trend;
  return {pass, false,
          fmt("scaling/zero-column laws %s; on %d poses contact-only O1 %.3e "
              "(rank %d/%d) vs combined-chain O1 %.3e (rank %d/%d): %s",
              laws ? "hold" : "VIOLATED", n, single.o1,
              single.numerical_rank, sel.size(), combined.o1,
              combined.numerical_rank, sel.size(),
              trend ? "combined exceeds single" : "NO IMPROVEMENT")};
}

Outcome criterion6() {
  return {true, true,
          "reproducing the published measurement campaign's numbers needs its "
          "recorded dataset, which is not present in this workspace and "
          "cannot be downloaded here; per the criterion's own terms it is "
          "replaced by the self-contained criteria 1-5"};
}

Outcome criterion7(const RobotModel& truth) {
  // Contact-only data with straight (anti-parallel) approaches: the center
  // distance depends on the tied tool length d through |2d - (2*0.35 + 2r)|,
  // so the objective has exact zeros at the true length and at its
  // pass-through alias, one ball diameter longer.
  SynthConfig cfg;
  cfg.st_orientations = 1;
  cfg.include_planes = false;
  cfg.include_cameras = false;
  cfg.seed = 21;
  const SynthResult gen = generate(truth, cfg);

  ParamSelection sel;
  sel.add_tied(truth, {"EE1", "EE2"}, DHField::d, "d_EE");
  SystemOptions opts;
  opts.self_contact = true;
  ResidualSystem sys = assemble(truth, sel, gen.datasets, opts, ScalePolicy{});

  std::vector<double> minima;
  for (int i = 0; i <= 60; ++i) {
    Eigen::VectorXd x0(1);
    x0 << 0.10 + 0.01 * i;
    const SolveReport rep = solve_system(sys, x0, SolverOptions{});
    minima.push_back(rep.x[0]);
  }
  std::sort(minima.begin(), minima.end());
  std::vector<double> clusters{minima.front()};
  for (double m : minima)
    if (m - clusters.back() > 5e-3) clusters.push_back(m);

  const double true_len = 0.350;
  const double alias = true_len + 2.0 * truth.ee_radius;
  const bool pass = clusters.size() == 2 &&
                    std::abs(clusters[0] - true_len) < 1e-4 &&
                    std::abs(clusters[1] - alias) < 1e-4 &&
                    clusters[0] <= true_len + 1e-4 &&
                    clusters[1] >= alias - 1e-4;
  std::string lst;
  for (double cm : clusters) lst += fmt("%.6f ", cm);
  return {pass, false,
          fmt("sweep of 61 starts in [0.10, 0.70] m converged to %zu basins "
              "{ %s} vs true %.3f and alias %.3f",
              clusters.size(), lst.c_str(), true_len, alias)};
}

Outcome criterion8(const RobotModel& truth) {
  const fs::path dir = "/tmp/chaincal_acceptance_c8";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SynthConfig cfg;
  cfg.st_nx = 2;
  cfg.st_ny = 2;
  cfg.st_nz = 1;
  cfg.st_orientations = 3;
  cfg.plane_nx = 4;
  cfg.plane_ny = 3;
  cfg.plane_orientations = 2;
  cfg.contact_sigma = 1e-4;
  cfg.pixel_sigma = 0.5;
  cfg.seed = 9;
  const SynthResult gen = generate(truth, cfg);

  RunConfig rc;
  for (const auto& d : gen.datasets) {
    const std::string path =
        (dir / (std::string(provenance_name(d.provenance)) + ".csv")).string();
    save_csv(path, d);
    rc.data[d.provenance] = path;
  }
  rc.preset = "offsets";
  rc.camera_mode = CameraMode::FixedCams;
  rc.blocks.self_contact = true;
  rc.blocks.planes = true;
  rc.blocks.self_observation = true;
  rc.blocks.camera_mode = rc.camera_mode;
  rc.split_ratio = 0.75;
  rc.split_seed = 2;
  rc.perturbation = 2.0;
  rc.perturb_seed = 4;
  rc.output_dir = (dir / "out").string();

  const std::vector<std::string> names = {"result.json", "model.json",
                                          "rmse.csv", "resolved_config.json"};
  auto snapshot = [&] {
    std::map<std::string, std::string> bytes;
    for (const auto& n : names) {
      std::ifstream in(dir / "out" / n, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      bytes[n] = ss.str();
    }
    return bytes;
  };

  run_calibration_files(rc);
  const auto first = snapshot();
  run_calibration_files(rc);
  const auto second = snapshot();

  bool identical = true;
  for (const auto& n : names)
    identical = identical && !first.at(n).empty() && first.at(n) == second.at(n);
  return {identical, false,
          fmt("repeated run with identical config+seed: result.json, "
              "model.json, rmse.csv, resolved_config.json %s",
              identical ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const RobotModel truth = nominal_robot_model();
  int failures = 0;
  const auto report = [&](int n, const Outcome& o) {
    const char* tag = o.skipped ? "SKIPPED" : o.pass ? "PASS" : "FAIL";
    std::printf("criterion %d: %s - %s\n", n, tag, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !o.skipped) ++failures;
  };

  report(1, criterion1(truth));
  report(2, criterion2(truth));
  report(3, criterion3(truth));
  report(4, criterion4());
  report(5, criterion5(truth));
  report(6, criterion6());
  report(7, criterion7(truth));
  report(8, criterion8(truth));

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria satisfied\n");
  return 0;
}
