#include "chaincal/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

namespace chaincal {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n <= 1) {
    v.push_back(0.5 * (a + b));
    return v;
  }
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

std::vector<int> arm_joint_indices(const RobotModel& model, int arm) {
  const auto& chain = model.chain(arm_chain_name(model, arm));
  std::vector<int> idx;
  for (int li : chain.links) {
    const auto& link = model.links[static_cast<std::size_t>(li)];
    if (link.actuated && link.encoder >= 1) idx.push_back(link.encoder);
  }
  return idx;
}

// Randomized joint configurations with their sphere centers, used to pick a
// starting point near an inverse-kinematics target.
struct SeedPool {
  std::vector<JointConfig> configs;
  std::vector<Eigen::Vector3d> centers;
};

SeedPool make_seed_pool(const RobotModel& model, int arm, std::uint64_t seed) {
  SeedPool pool;
  Rng rng(Rng::mix(seed, 0x5eedULL + static_cast<std::uint64_t>(arm)));
  const auto enc = arm_joint_indices(model, arm);
  for (int k = 0; k < 64; ++k) {
    JointConfig q{};
    for (int j : enc) q[j] = rng.uniform(-1.7, 1.7);
    pool.configs.push_back(q);
    pool.centers.push_back(ee_center(model, arm, q));
  }
  return pool;
}

bool ik_multistart(const RobotModel& model, int arm,
                   const Eigen::Vector3d& target, const Eigen::Vector3d& z_dir,
                   const SeedPool& pool, JointConfig& joints) {
  JointConfig warm = joints;
  if (solve_arm_ik(model, arm, target, z_dir, warm)) {
    joints = warm;
    return true;
  }
  const auto enc = arm_joint_indices(model, arm);
  std::vector<int> order(pool.configs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return (pool.centers[static_cast<std::size_t>(a)] - target).squaredNorm() <
           (pool.centers[static_cast<std::size_t>(b)] - target).squaredNorm();
  });
  const int tries = std::min<int>(8, static_cast<int>(order.size()));
  for (int k = 0; k < tries; ++k) {
    JointConfig q = joints;
    for (int j : enc) q[j] = pool.configs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])][j];
    if (solve_arm_ik(model, arm, target, z_dir, q)) {
      joints = q;
      return true;
    }
  }
  return false;
}

// Appends one marker detection row per visible (arm, face, camera) triple.
// Noise draws happen in a fixed order so the stream is reproducible.
void emit_markers(const RobotModel& truth, const std::vector<int>& arms,
                  const JointConfig& q, long pose_id, double pixel_sigma,
                  Rng& rng, Dataset& out) {
  struct Cam {
    int index;
    const CameraIntrinsics* intr;
    RigidTransform pose;
  };
  std::vector<Cam> cams;
  int cam_index = 0;
  for (const auto& chain : truth.chains) {
    if (chain.kind != ChainKind::Camera) continue;
    ++cam_index;
    cams.push_back({cam_index, &truth.intrinsics.at(chain.name),
                    forward_kinematics(truth, chain, q)});
  }
  for (int arm : arms) {
    for (const auto& [face, local] : truth.markers) {
      (void)local;
      const RigidTransform world = marker_world_pose(truth, arm, face, q);
      const Eigen::Vector3d normal = world.linear().col(2);
      for (const Cam& cam : cams) {
        const Eigen::Vector3d in_cam = cam.pose.inverse() * world.translation();
        if (in_cam.z() <= 0.0) continue;
        const Eigen::Vector3d view =
            (cam.pose.translation() - world.translation()).normalized();
        if (normal.dot(view) < 0.25) continue; // faces the camera, not grazing
        PixelObservation px;
        try {
          px = project(*cam.intr, in_cam);
        } catch (const BehindCameraError&) {
          continue;
        }
        if (cam.intr->width > 0 && (px.u < 0.0 || px.u > cam.intr->width)) continue;
        if (cam.intr->height > 0 && (px.v < 0.0 || px.v > cam.intr->height)) continue;
        px.u += pixel_sigma * rng.normal();
        px.v += pixel_sigma * rng.normal();
        DatasetRecord r;
        r.pose_id = pose_id;
        r.arm = arm;
        r.joints = q;
        r.face = face;
        r.camera = cam.index;
        r.pixel = px;
        out.records.push_back(r);
      }
    }
  }
}

RigidTransform default_tracker_pose() {
  RigidTransform t = RigidTransform::Identity();
  t.linear() = (Eigen::AngleAxisd(2.1, Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(0.35, Eigen::Vector3d::UnitX()))
                   .toRotationMatrix();
  t.translation() = Eigen::Vector3d(2.4, 1.1, 0.25);
  return t;
}

void check_config(const SynthConfig& cfg) {
  if (cfg.st_nx < 1 || cfg.st_ny < 1 || cfg.st_nz < 1)
    throw ConfigError("contact grid dimensions must be positive");
  if (cfg.st_orientations < 1 || cfg.st_orientations > 9)
    throw ConfigError("contact orientation count must be 1..9");
  if (cfg.plane_nx < 1 || cfg.plane_ny < 1)
    throw ConfigError("plane grid dimensions must be positive");
  if (cfg.plane_orientations < 1 || cfg.plane_orientations > 5)
    throw ConfigError("plane orientation count must be 1..5");
  if (cfg.tracker_poses < 0) throw ConfigError("tracker pose count must be >= 0");
  if (cfg.contact_sigma < 0 || cfg.pixel_sigma < 0 || cfg.tracker_sigma < 0)
    throw ConfigError("noise levels must be >= 0");
}

}  // namespace

const Dataset& SynthResult::dataset(Provenance tag) const {
  for (const auto& d : datasets)
    if (d.provenance == tag) return d;
  throw ConfigError(std::string("generated data has no ") + provenance_name(tag) +
                    " dataset");
}

bool solve_arm_ik(const RobotModel& model, int arm,
                  const Eigen::Vector3d& target, const Eigen::Vector3d& z_dir,
                  JointConfig& joints, double tol) {
  const auto& chain = model.chain(arm_chain_name(model, arm));
  const auto enc = arm_joint_indices(model, arm);
  if (enc.size() != 6) throw ConfigError("arm inverse kinematics needs six joints");
  if (z_dir.norm() < 1e-9) throw ConfigError("degenerate tool direction");
  const Eigen::Vector3d zhat = z_dir.normalized();
  constexpr double kDirWeight = 0.25; // meters of error per unit direction error

  // Residual [center - target; w (z - zhat)] with the geometric Jacobian of a
  // revolute chain: column j is [k x (c - o); w (k x z)] for joint axis k
  // through point o.
  auto assemble = [&](const JointConfig& q, Eigen::Matrix<double, 6, 1>& e,
                      Eigen::Matrix<double, 6, 6>& J) {
    RigidTransform t = RigidTransform::Identity();
    std::array<Eigen::Vector3d, 6> axis, origin;
    int col = 0;
    for (int li : chain.links) {
      const DHLink& link = model.links[static_cast<std::size_t>(li)];
      if (link.actuated && link.encoder >= 1) {
        axis[static_cast<std::size_t>(col)] = t.linear().col(2);
        origin[static_cast<std::size_t>(col)] = t.translation();
        ++col;
      }
      t = t * dh_transform(link, link.actuated ? q[link.encoder] : 0.0);
    }
    const Eigen::Vector3d c = t.translation();
    const Eigen::Vector3d z = t.linear().col(2);
    e.head<3>() = c - target;
    e.tail<3>() = kDirWeight * (z - zhat);
    for (int j = 0; j < 6; ++j) {
      const auto& k = axis[static_cast<std::size_t>(j)];
      J.col(j).head<3>() = k.cross(c - origin[static_cast<std::size_t>(j)]);
      J.col(j).tail<3>() = kDirWeight * k.cross(z);
    }
  };

  Eigen::Matrix<double, 6, 1> e;
  Eigen::Matrix<double, 6, 6> J;
  assemble(joints, e, J);
  double err = e.norm();
  double lambda = 1e-10;
  for (int it = 0; it < 200 && err > tol; ++it) {
    Eigen::Matrix<double, 6, 6> a = J.transpose() * J;
    a.diagonal().array() += lambda;
    Eigen::Matrix<double, 6, 1> step = a.ldlt().solve(J.transpose() * e);
    if (!step.allFinite()) {
      lambda = std::max(lambda * 10.0, 1e-8);
      continue;
    }
    const double n = step.norm();
    if (n > 0.8) step *= 0.8 / n;
    JointConfig trial = joints;
    for (int j = 0; j < 6; ++j)
      trial[enc[static_cast<std::size_t>(j)]] =
          wrap_angle(trial[enc[static_cast<std::size_t>(j)]] - step(j));
    Eigen::Matrix<double, 6, 1> e2;
    Eigen::Matrix<double, 6, 6> J2;
    assemble(trial, e2, J2);
    if (e2.norm() < err) {
      joints = trial;
      e = e2;
      J = J2;
      err = e2.norm();
      lambda = std::max(lambda / 10.0, 1e-12);
    } else {
      lambda *= 10.0;
      if (lambda > 1e6) break;
    }
  }
  return err <= tol;
}

SynthResult generate(const RobotModel& truth, const SynthConfig& cfg) {
  check_config(cfg);
  validate_model(truth);
  SynthResult out;
  out.tracker_pose = default_tracker_pose();
  const double r = truth.ee_radius;
  const SeedPool pool_r = make_seed_pool(truth, 1, cfg.seed);
  const SeedPool pool_l = make_seed_pool(truth, 2, cfg.seed);
  const bool cameras = cfg.include_cameras && !truth.intrinsics.empty();
  // Final wrist joint of each arm: spins the tool about its own axis, so the
  // contact point and approach direction are invariant under it. Randomizing
  // it after IK keeps the wrist parameters excited across the dataset.
  const int wrist_r = arm_joint_indices(truth, 1).back();
  const int wrist_l = arm_joint_indices(truth, 2).back();

  // Orientation tables. The straight pose comes first so a single-orientation
  // run stays axis-aligned.
  static constexpr double kTilt = 0.35;
  static constexpr std::array<std::array<double, 2>, 9> kContactTilts = {{
      {0, 0}, {-kTilt, 0}, {kTilt, 0}, {0, -kTilt}, {0, kTilt},
      {-kTilt, -kTilt}, {kTilt, kTilt}, {-kTilt, kTilt}, {kTilt, -kTilt},
  }};
  static constexpr std::array<std::array<double, 2>, 5> kPlaneTilts = {{
      {0, 0}, {-0.3, 0}, {0.3, 0}, {0, -0.3}, {0, 0.3},
  }};

  // Self-contact: both arms meet along a mostly lateral line through each
  // grid point; the left target absorbs the contact noise.
  {
    Dataset st;
    st.provenance = Provenance::SelfContact;
    JointConfig warm{};
    long pose_id = 0;
    std::uint64_t attempt = 0;
    for (double x : linspace(cfg.st_x0, cfg.st_x1, cfg.st_nx))
      for (double y : linspace(cfg.st_y0, cfg.st_y1, cfg.st_ny))
        for (double z : linspace(cfg.st_z0, cfg.st_z1, cfg.st_nz))
          for (int c = 0; c < cfg.st_orientations; ++c) {
            Rng rng(Rng::mix(cfg.seed, 1000000 + attempt++));
            const double tt = rng.uniform(-0.25, 0.25);
            const double s1 = rng.uniform(-1.0, 1.0);
            const double s2 = rng.uniform(-1.0, 1.0);
            const double eps = cfg.contact_sigma * rng.normal();
            const Eigen::Vector3d g(x, y, z);
            const Eigen::Vector3d dir =
                Eigen::Vector3d(1.0, 0.45 * s1, 0.3 * s2).normalized();
            const Eigen::Vector3d u = dir.cross(Eigen::Vector3d::UnitZ()).normalized();
            const Eigen::Vector3d v = dir.cross(u).normalized();
            const auto& tilt = kContactTilts[static_cast<std::size_t>(c)];
            const Eigen::Vector3d z_r = Eigen::AngleAxisd(tilt[0], u) * dir;
            const Eigen::Vector3d z_l = Eigen::AngleAxisd(tilt[1], v) * (-dir);
            JointConfig q = warm;
            q[0] = tt;
            if (!ik_multistart(truth, 1, g - r * dir, z_r, pool_r, q) ||
                !ik_multistart(truth, 2, g + (r + eps) * dir, z_l, pool_l, q)) {
              ++out.ik_failures;
              continue;
            }
            q[wrist_r] = wrap_angle(q[wrist_r] + rng.uniform(-3.0, 3.0));
            q[wrist_l] = wrap_angle(q[wrist_l] + rng.uniform(-3.0, 3.0));
            warm = q;
            ++pose_id;
            DatasetRecord carrier;
            carrier.pose_id = pose_id;
            carrier.arm = 0;
            carrier.joints = q;
            st.records.push_back(carrier);
            if (cameras) emit_markers(truth, {1, 2}, q, pose_id, cfg.pixel_sigma, rng, st);
            ++out.poses;
          }
    out.datasets.push_back(std::move(st));
  }

  // Plane contacts: the right arm presses the sphere onto each plane; sphere
  // centers then lie one radius above it (plus contact noise).
  if (cfg.include_planes) {
    struct PlaneSpec {
      Provenance tag;
      Eigen::Vector3d normal;
      Eigen::Vector3d tilt_axis_a, tilt_axis_b;
      std::uint64_t stream;
    };
    const std::array<PlaneSpec, 3> specs = {{
        {Provenance::PlaneH1, Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(),
         Eigen::Vector3d::UnitY(), 2000000},
        {Provenance::PlaneH2, Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(),
         Eigen::Vector3d::UnitY(), 3000000},
        {Provenance::PlaneV, -Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
         Eigen::Vector3d::UnitZ(), 4000000},
    }};
    for (const PlaneSpec& spec : specs) {
      Dataset ds;
      ds.provenance = spec.tag;
      std::vector<double> as, bs;
      if (spec.tag == Provenance::PlaneV) {
        as = linspace(cfg.vp_y0, cfg.vp_y1, cfg.plane_nx);
        bs = linspace(cfg.vp_z0, cfg.vp_z1, cfg.plane_ny);
      } else {
        as = linspace(cfg.hp_x0, cfg.hp_x1, cfg.plane_nx);
        bs = linspace(cfg.hp_y0, cfg.hp_y1, cfg.plane_ny);
      }
      JointConfig warm{};
      long pose_id = 0;
      std::uint64_t attempt = 0;
      for (double a : as)
        for (double b : bs)
          for (int c = 0; c < cfg.plane_orientations; ++c) {
            Rng rng(Rng::mix(cfg.seed, spec.stream + attempt++));
            const double tt = rng.uniform(-0.25, 0.25);
            const double eps = cfg.contact_sigma * rng.normal();
            Eigen::Vector3d p;
            if (spec.tag == Provenance::PlaneH1)
              p = Eigen::Vector3d(a, b, cfg.hp1_z);
            else if (spec.tag == Provenance::PlaneH2)
              p = Eigen::Vector3d(a, b, cfg.hp2_z);
            else
              p = Eigen::Vector3d(cfg.vp_x, a, b);
            const auto& tilt = kPlaneTilts[static_cast<std::size_t>(c)];
            const Eigen::Vector3d z_t = Eigen::AngleAxisd(tilt[0], spec.tilt_axis_a) *
                                        (Eigen::AngleAxisd(tilt[1], spec.tilt_axis_b) *
                                         (-spec.normal));
            JointConfig q = warm;
            q[0] = tt;
            if (!ik_multistart(truth, 1, p + (r + eps) * spec.normal, z_t, pool_r, q)) {
              ++out.ik_failures;
              continue;
            }
            q[wrist_r] = wrap_angle(q[wrist_r] + rng.uniform(-3.0, 3.0));
            warm = q;
            ++pose_id;
            DatasetRecord carrier;
            carrier.pose_id = pose_id;
            carrier.arm = 1;
            carrier.joints = q;
            ds.records.push_back(carrier);
            if (cameras) emit_markers(truth, {1}, q, pose_id, cfg.pixel_sigma, rng, ds);
            ++out.poses;
          }
      out.datasets.push_back(std::move(ds));
    }
  }

  // Tracker logging: free joint-space sampling of the right arm, point
  // measured in the tracker frame.
  if (cfg.tracker_poses > 0) {
    const std::string tracker_chain = arm_chain_name(truth, 1) + "_tracker";
    if (truth.chain_index(tracker_chain) < 0)
      throw ConfigError("model has no tracker chain for the right arm");
    static constexpr std::array<double, 6> kRange = {1.2, 0.6, 0.6, 1.2, 1.2, 1.5};
    Dataset lt;
    lt.provenance = Provenance::Tracker;
    for (int i = 0; i < cfg.tracker_poses; ++i) {
      Rng rng(Rng::mix(cfg.seed, 5000000 + static_cast<std::uint64_t>(i)));
      JointConfig q{};
      q[0] = rng.uniform(-0.6, 0.6);
      for (int j = 0; j < 6; ++j)
        q[1 + j] = rng.uniform(-kRange[static_cast<std::size_t>(j)],
                               kRange[static_cast<std::size_t>(j)]);
      const Eigen::Vector3d tip =
          forward_kinematics(truth, tracker_chain, q).translation();
      Eigen::Vector3d meas = out.tracker_pose.inverse() * tip;
      for (int k = 0; k < 3; ++k) meas[k] += cfg.tracker_sigma * rng.normal();
      DatasetRecord rec;
      rec.pose_id = i + 1;
      rec.arm = 1;
      rec.joints = q;
      rec.tracker_point = meas;
      rec.u95 = 1.5e-5 + 6e-6 * meas.norm();
      lt.records.push_back(rec);
      ++out.poses;
    }
    out.datasets.push_back(std::move(lt));
  }

  return out;
}

Eigen::VectorXd perturb(const Eigen::VectorXd& x, const ParamSelection& sel,
                        double level, std::uint64_t seed) {
  if (x.size() != sel.size())
    throw ConfigError("parameter vector does not match the selection");
  Rng rng(Rng::mix(seed, 0x70b5));
  Eigen::VectorXd out = x;
  for (int i = 0; i < sel.size(); ++i) {
    const double draw = rng.uniform(-1.0, 1.0);
    const ParamEntry& e = sel.entries[static_cast<std::size_t>(i)];
    if (e.is_tracker()) continue;
    const bool is_offset = e.targets.front().field == DHField::offset;
    out[i] += (is_offset ? 0.1 : 0.01) * level * draw;
  }
  return out;
}

}  // namespace chaincal
