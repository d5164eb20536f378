#include "chaincal/residuals.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace chaincal {

const char* block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::SelfContact: return "self-contact";
    case BlockKind::Plane: return "plane";
    case BlockKind::Reprojection: return "reprojection";
    case BlockKind::Tracker: return "tracker";
  }
  return "?";
}

Plane fit_plane_svd(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3)
    throw NumericalError("plane fit needs at least 3 points, got " +
                         std::to_string(points.size()));
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    m.row(i) = (points[static_cast<std::size_t>(i)] - centroid).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv[1] <= 1e-12 * std::max(sv[0], 1e-300))
    throw NumericalError("degenerate plane fit: points are collinear");

  Eigen::Vector3d n = svd.matrixV().col(2);
  // Canonical sign: largest-magnitude component positive.
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) > std::abs(n[imax])) imax = i;
  if (n[imax] < 0.0) n = -n;
  return {n, -n.dot(centroid)};
}

RigidTransform arun_fit(const std::vector<Eigen::Vector3d>& src,
                        const std::vector<Eigen::Vector3d>& dst) {
  if (src.size() != dst.size())
    throw NumericalError("arun_fit: corresponding lists differ in length");
  if (src.size() < 3)
    throw NumericalError("arun_fit needs at least 3 correspondences");

  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ca += src[i];
    cb += dst[i];
  }
  ca /= static_cast<double>(src.size());
  cb /= static_cast<double>(src.size());

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i)
    h += (src[i] - ca) * (dst[i] - cb).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv[1] <= 1e-14 * std::max(sv[0], 1e-300))
    throw NumericalError("arun_fit: degenerate point geometry (rank < 2)");

  Eigen::Matrix3d u = svd.matrixU(), v = svd.matrixV();
  Eigen::Matrix3d r = v * u.transpose();
  if (r.determinant() < 0.0) {
    v.col(2) *= -1.0;
    r = v * u.transpose();
  }
  RigidTransform t = RigidTransform::Identity();
  t.linear() = r;
  t.translation() = cb - r * ca;
  return t;
}

double self_contact_residual(const RobotModel& model, const JointConfig& q) {
  const Eigen::Vector3d c1 = ee_center(model, 1, q);
  const Eigen::Vector3d c2 = ee_center(model, 2, q);
  return (c1 - c2).norm() - 2.0 * model.ee_radius;
}

// Center-to-surface distance minus the sphere radius, with the surface
// obtained by displacing the plane fit through the centers by one radius:
// |delta + r| - r, the signed coplanarity deviation for |delta| < r.
static double surface_residual(double delta, double radius) {
  return std::abs(delta + radius) - radius;
}

std::vector<double> planar_residuals(const RobotModel& model,
                                     const std::vector<JointConfig>& poses,
                                     const std::vector<int>& arms) {
  if (poses.size() != arms.size())
    throw ConfigError("planar_residuals: poses/arms length mismatch");
  std::vector<Eigen::Vector3d> centers(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i)
    centers[i] = ee_center(model, arms[i], poses[i]);
  const Plane plane = fit_plane_svd(centers);
  std::vector<double> res(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i)
    res[i] = surface_residual(plane.n.dot(centers[i]) + plane.d,
                              model.ee_radius);
  return res;
}

static int camera_chain_for_id(const RobotModel& model, int camera_id) {
  int seen = 0;
  for (std::size_t i = 0; i < model.chains.size(); ++i) {
    if (model.chains[i].kind != ChainKind::Camera) continue;
    if (++seen == camera_id) return static_cast<int>(i);
  }
  throw ConfigError("no camera chain with index " + std::to_string(camera_id));
}

static int tracker_chain_for_arm(const RobotModel& model, int arm) {
  int seen = 0;
  for (std::size_t i = 0; i < model.chains.size(); ++i) {
    if (model.chains[i].kind != ChainKind::TrackerArm) continue;
    if (++seen == arm) return static_cast<int>(i);
  }
  throw ConfigError("no tracker chain for arm " + std::to_string(arm));
}

Eigen::Vector2d reprojection_residual(const RobotModel& model,
                                      const DatasetRecord& rec) {
  if (!rec.pixel || !rec.face || !rec.camera)
    throw DataError("record has no marker observation");
  const RigidTransform marker =
      marker_world_pose(model, rec.arm ? rec.arm : 1, *rec.face, rec.joints);
  const int cam = camera_chain_for_id(model, *rec.camera);
  const KinematicChain& chain = model.chains[static_cast<std::size_t>(cam)];
  const RigidTransform cam_pose = forward_kinematics(model, chain, rec.joints);
  const Eigen::Vector3d pc = cam_pose.inverse() * marker.translation();
  auto it = model.intrinsics.find(chain.name);
  if (it == model.intrinsics.end())
    throw ConfigError("camera chain " + chain.name + " has no intrinsics");
  const PixelObservation px = project(it->second, pc);
  return {px.u - rec.pixel->u, px.v - rec.pixel->v};
}

double tracker_residual(const RobotModel& model,
                        const RigidTransform& tracker_pose,
                        const DatasetRecord& rec) {
  if (!rec.tracker_point) throw DataError("record has no tracker point");
  const int chain = tracker_chain_for_arm(model, rec.arm ? rec.arm : 1);
  const Eigen::Vector3d fk =
      forward_kinematics(model, model.chains[static_cast<std::size_t>(chain)],
                         rec.joints)
          .translation();
  return (tracker_pose * *rec.tracker_point - fk).norm();
}

std::vector<ParamUnit> ResidualSystem::units() const {
  std::vector<ParamUnit> u;
  u.reserve(static_cast<std::size_t>(selection_.size()));
  for (const auto& e : selection_.entries) u.push_back(e.unit);
  return u;
}

Eigen::VectorXd ResidualSystem::initial_params() const {
  Eigen::VectorXd x = read_params(base_, selection_);
  const auto comps = pose_to_components(tracker_pose_);
  for (int i = 0; i < selection_.size(); ++i) {
    const auto& e = selection_.entries[static_cast<std::size_t>(i)];
    if (e.is_tracker()) x[i] = comps[e.tracker_component];
  }
  return x;
}

RobotModel ResidualSystem::model_at(const Eigen::VectorXd& x) const {
  return apply_params(base_, selection_, x);
}

Eigen::Matrix<double, 6, 1> ResidualSystem::pose_to_components(
    const RigidTransform& t) {
  Eigen::Matrix<double, 6, 1> c;
  const Eigen::AngleAxisd aa(t.linear());
  c.head<3>() = aa.angle() * aa.axis();
  c.tail<3>() = t.translation();
  return c;
}

RigidTransform ResidualSystem::components_to_pose(
    const Eigen::Matrix<double, 6, 1>& c) {
  RigidTransform t = RigidTransform::Identity();
  const Eigen::Vector3d w = c.head<3>();
  const double angle = w.norm();
  if (angle > 0.0)
    t.linear() = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
  t.translation() = c.tail<3>();
  return t;
}

void ResidualSystem::refit_tracker_pose(const Eigen::VectorXd& x) {
  if (tracker_.empty())
    throw ConfigError("no tracker rows to fit the tracker pose from");
  const RobotModel m = model_at(x);
  std::vector<Eigen::Vector3d> src, dst;
  src.reserve(tracker_.size());
  dst.reserve(tracker_.size());
  for (const auto& row : tracker_) {
    src.push_back(row.point);
    const int chain = tracker_chain_for_arm(m, row.arm);
    dst.push_back(
        forward_kinematics(m, m.chains[static_cast<std::size_t>(chain)],
                           row.joints)
            .translation());
  }
  tracker_pose_ = arun_fit(src, dst);
}

Eigen::VectorXd ResidualSystem::evaluate(const Eigen::VectorXd& x) const {
  return evaluate_impl(x, true);
}

Eigen::VectorXd ResidualSystem::evaluate_unscaled(
    const Eigen::VectorXd& x) const {
  return evaluate_impl(x, false);
}

Eigen::VectorXd ResidualSystem::evaluate_impl(const Eigen::VectorXd& x,
                                              bool scaled) const {
  const RobotModel m = model_at(x);

  RigidTransform tpose = tracker_pose_;
  if (selection_.has_tracker_pose()) {
    Eigen::Matrix<double, 6, 1> comps = pose_to_components(tracker_pose_);
    for (int i = 0; i < selection_.size(); ++i) {
      const auto& e = selection_.entries[static_cast<std::size_t>(i)];
      if (e.is_tracker()) comps[e.tracker_component] = x[i];
    }
    tpose = components_to_pose(comps);
  }

  Eigen::VectorXd r(rows_);
  Eigen::Index k = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (const auto& row : contact_) {
    const double g = self_contact_residual(m, row.joints);
    r[k++] = g * (scaled ? row.scale : 1.0);
  }

  for (const auto& group : plane_groups_) {
    std::vector<Eigen::Vector3d> centers(group.rows.size());
    for (std::size_t i = 0; i < group.rows.size(); ++i)
      centers[i] = ee_center(m, group.rows[i].arm, group.rows[i].joints);
    bool ok = true;
    Plane plane;
    try {
      plane = fit_plane_svd(centers);
    } catch (const NumericalError&) {
      ok = false;
    }
    for (std::size_t i = 0; i < group.rows.size(); ++i) {
      const double g =
          ok ? surface_residual(plane.n.dot(centers[i]) + plane.d,
                                m.ee_radius)
             : nan;
      r[k++] = g * (scaled ? group.rows[i].scale : 1.0);
    }
  }

  for (const auto& pose : reproj_) {
    // Chain transforms shared by the observations of this pose.
    std::array<RigidTransform, 8> fk_cache;
    std::array<bool, 8> have{};
    auto fk_of = [&](int chain_idx) -> const RigidTransform& {
      auto& slot = fk_cache[static_cast<std::size_t>(chain_idx)];
      if (!have[static_cast<std::size_t>(chain_idx)]) {
        slot = forward_kinematics(
            m, m.chains[static_cast<std::size_t>(chain_idx)], pose.joints);
        have[static_cast<std::size_t>(chain_idx)] = true;
      }
      return slot;
    };
    for (const auto& obs : pose.obs) {
      const int arm_chain = obs.arm == 1 ? right_arm_ : left_arm_;
      const Eigen::Vector3d point =
          (fk_of(arm_chain) * obs.face).translation();
      const Eigen::Vector3d pc = fk_of(obs.camera_chain).inverse() * point;
      if (pc.z() > 0.0) {
        const PixelObservation px = project(obs.intr, pc);
        const double s = scaled ? obs.scale : 1.0;
        r[k++] = (px.u - obs.u) * s;
        r[k++] = (px.v - obs.v) * s;
      } else {
        r[k++] = nan;
        r[k++] = nan;
      }
    }
  }

  for (const auto& row : tracker_) {
    const int chain = row.arm == 1 ? right_tracker_ : left_tracker_;
    const Eigen::Vector3d fk =
        forward_kinematics(m, m.chains[static_cast<std::size_t>(chain)],
                           row.joints)
            .translation();
    // Component-wise rows: same squared cost as the distance, but smooth at
    // zero, which the distance form is not.
    const Eigen::Vector3d g = tpose * row.point - fk;
    const double s = scaled ? row.scale : 1.0;
    r[k++] = g.x() * s;
    r[k++] = g.y() * s;
    r[k++] = g.z() * s;
  }

  return r;
}

namespace {

// Pixel-per-meter factor for a pose: fov_pixels across fov_angle at the
// anchor-to-camera distance, averaged over the model's cameras. Uses the
// nominal model so the scale is a constant of the objective.
double mu_factor(const RobotModel& nominal, const ScalePolicy& policy,
                 const Eigen::Vector3d& anchor, const JointConfig& joints) {
  if (!policy.pixel_per_meter) return 1.0;
  double sum = 0.0;
  int n = 0;
  for (const auto& chain : nominal.chains) {
    if (chain.kind != ChainKind::Camera) continue;
    const Eigen::Vector3d cam =
        forward_kinematics(nominal, chain, joints).translation();
    const double dist = (cam - anchor).norm();
    if (dist > 1e-9) {
      sum += policy.fov_pixels / (dist * policy.fov_angle);
      ++n;
    }
  }
  return n ? sum / n : 1.0;
}

}  // namespace

ResidualSystem assemble(const RobotModel& nominal, const ParamSelection& sel,
                        const std::vector<Dataset>& datasets,
                        const SystemOptions& opts, const ScalePolicy& policy) {
  if (opts.self_observation && opts.camera_mode == CameraMode::NoCams)
    throw ConfigError(
        "self-observation requested with cameras disabled; pick a camera "
        "mode that uses them");

  ResidualSystem sys;
  sys.base_ = nominal;
  sys.selection_ = sel;
  sys.right_arm_ = nominal.chain_index(arm_chain_name(nominal, 1));
  // The left arm is optional until a block needs it.
  try {
    sys.left_arm_ = nominal.chain_index(arm_chain_name(nominal, 2));
  } catch (const ConfigError&) {
    sys.left_arm_ = -1;
  }
  {
    int seen = 0;
    for (std::size_t i = 0; i < nominal.chains.size(); ++i) {
      if (nominal.chains[i].kind != ChainKind::TrackerArm) continue;
      ++seen;
      if (seen == 1) sys.right_tracker_ = static_cast<int>(i);
      if (seen == 2) sys.left_tracker_ = static_cast<int>(i);
    }
  }

  std::vector<double> scales;
  auto mu = [&](const Eigen::Vector3d& anchor, const JointConfig& joints) {
    return mu_factor(nominal, policy, anchor, joints);
  };

  // Self-contact: one row per pose.
  if (opts.self_contact) {
    if (sys.left_arm_ < 0)
      throw ConfigError("self-contact needs both arm chains");
    for (const auto& ds : datasets) {
      if (ds.provenance != Provenance::SelfContact) continue;
      for (const auto& [pose_id, idx] : ds.group_by_pose()) {
        const JointConfig& q = ds.records[static_cast<std::size_t>(idx[0])].joints;
        ResidualSystem::ContactRow row;
        row.joints = q;
        const Eigen::Vector3d anchor =
            0.5 * (ee_center(nominal, 1, q) + ee_center(nominal, 2, q));
        row.scale = policy.eta_contact * policy.p_contact * mu(anchor, q);
        scales.push_back(row.scale);
        sys.contact_.push_back(row);
      }
    }
    if (sys.contact_.empty())
      throw ConfigError("self-contact requested but no self-contact data given");
    sys.blocks_.push_back({BlockKind::SelfContact, Provenance::SelfContact, 0,
                           static_cast<int>(sys.contact_.size())});
  }

  // Planes: one group per plane provenance, one row per pose.
  if (opts.planes) {
    for (const auto& ds : datasets) {
      if (ds.provenance != Provenance::PlaneH1 &&
          ds.provenance != Provenance::PlaneH2 &&
          ds.provenance != Provenance::PlaneV)
        continue;
      ResidualSystem::PlaneGroup group;
      group.tag = ds.provenance;
      for (const auto& [pose_id, idx] : ds.group_by_pose()) {
        const DatasetRecord& rec = ds.records[static_cast<std::size_t>(idx[0])];
        ResidualSystem::PlaneRow row;
        row.joints = rec.joints;
        row.arm = rec.arm ? rec.arm : 1;
        if (row.arm == 2 && sys.left_arm_ < 0)
          throw ConfigError("plane data touches the left arm but the model has none");
        const Eigen::Vector3d anchor = ee_center(nominal, row.arm, rec.joints);
        row.scale =
            policy.eta_plane * policy.p_plane * mu(anchor, rec.joints);
        scales.push_back(row.scale);
        group.rows.push_back(row);
      }
      if (group.rows.size() < 3)
        throw NumericalError(std::string("plane group ") +
                             provenance_name(ds.provenance) +
                             " has fewer than 3 poses");
      sys.blocks_.push_back(
          {BlockKind::Plane, ds.provenance,
           static_cast<int>(scales.size() - group.rows.size()),
           static_cast<int>(group.rows.size())});
      sys.plane_groups_.push_back(std::move(group));
    }
    if (sys.plane_groups_.empty())
      throw ConfigError("planes requested but no plane data given");
  }

  // Reprojection: two rows per visible marker observation.
  if (opts.self_observation) {
    const int block_offset = static_cast<int>(scales.size());
    int obs_count = 0;
    for (const auto& ds : datasets) {
      if (ds.provenance == Provenance::Tracker) continue;
      for (const auto& [pose_id, idx] : ds.group_by_pose()) {
        ResidualSystem::ReprojPose pose;
        pose.joints = ds.records[static_cast<std::size_t>(idx[0])].joints;
        for (int i : idx) {
          const DatasetRecord& rec = ds.records[static_cast<std::size_t>(i)];
          if (!rec.pixel) continue;
          ResidualSystem::ReprojObs obs;
          obs.arm = rec.arm ? rec.arm : 1;
          if (obs.arm == 2 && sys.left_arm_ < 0) {
            ++sys.skipped_;
            continue;
          }
          obs.camera_chain = camera_chain_for_id(nominal, *rec.camera);
          auto face_it = nominal.markers.find(*rec.face);
          if (face_it == nominal.markers.end())
            throw DataError("record references unknown marker face " +
                            std::to_string(*rec.face));
          obs.face = face_it->second;
          obs.u = rec.pixel->u;
          obs.v = rec.pixel->v;
          const KinematicChain& cam_chain =
              nominal.chains[static_cast<std::size_t>(obs.camera_chain)];
          obs.intr = nominal.intrinsics.at(cam_chain.name);
          // Drop records invisible under the nominal model.
          const Eigen::Vector3d point =
              marker_world_pose(nominal, obs.arm, *rec.face, rec.joints)
                  .translation();
          const Eigen::Vector3d pc =
              forward_kinematics(nominal, cam_chain, rec.joints).inverse() *
              point;
          if (!(pc.z() > 0.0)) {
            ++sys.skipped_;
            continue;
          }
          obs.scale = policy.eta_pixel * policy.p_pixel;
          scales.push_back(obs.scale);
          scales.push_back(obs.scale);
          pose.obs.push_back(std::move(obs));
          ++obs_count;
        }
        if (!pose.obs.empty()) sys.reproj_.push_back(std::move(pose));
      }
    }
    if (obs_count == 0)
      throw ConfigError(
          "self-observation requested but no usable marker observations");
    sys.blocks_.push_back({BlockKind::Reprojection, Provenance::Synthetic,
                           block_offset, 2 * obs_count});
  }

  // Tracker: three component rows per record with a tracker point (the
  // summed squares equal the squared point distance).
  if (opts.tracker) {
    const int block_offset = static_cast<int>(scales.size());
    for (const auto& ds : datasets) {
      if (ds.provenance != Provenance::Tracker) continue;
      for (const auto& rec : ds.records) {
        if (!rec.tracker_point) {
          ++sys.skipped_;
          continue;
        }
        ResidualSystem::TrackerRow row;
        row.joints = rec.joints;
        row.arm = rec.arm ? rec.arm : 1;
        const int chain =
            row.arm == 1 ? sys.right_tracker_ : sys.left_tracker_;
        if (chain < 0)
          throw ConfigError("tracker data for arm " + std::to_string(row.arm) +
                            " but the model has no tracker chain for it");
        row.point = *rec.tracker_point;
        row.scale = policy.eta_tracker;
        for (int c = 0; c < 3; ++c) scales.push_back(row.scale);
        sys.tracker_.push_back(row);
      }
    }
    if (sys.tracker_.empty())
      throw ConfigError("tracker approach requested but no tracker points");
    sys.blocks_.push_back({BlockKind::Tracker, Provenance::Tracker,
                           block_offset,
                           static_cast<int>(3 * sys.tracker_.size())});
  }

  if (scales.empty()) throw ConfigError("no residual blocks requested");
  sys.rows_ = static_cast<int>(scales.size());
  sys.scales_ = Eigen::Map<Eigen::VectorXd>(scales.data(),
                                            static_cast<Eigen::Index>(scales.size()));
  return sys;
}

}  // namespace chaincal
