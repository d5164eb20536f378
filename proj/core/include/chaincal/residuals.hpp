#pragma once

#include <cmath>
#include <vector>

#include "chaincal/dataset.hpp"
#include "chaincal/params.hpp"

namespace chaincal {

// n·p + d = 0 with ||n|| = 1.
struct Plane {
  Eigen::Vector3d n{0, 0, 1};
  double d = 0.0;
};

// Total least squares plane: centroid subtraction, normal = singular vector
// of the smallest singular value, d = -n·centroid. The normal sign is
// canonicalized (largest-magnitude component positive) so fits are
// deterministic. Throws NumericalError (degenerate fit) for < 3 points or
// collinear clouds.
Plane fit_plane_svd(const std::vector<Eigen::Vector3d>& points);

// Least-squares rigid transform mapping src onto dst (Arun's method):
// centroid subtraction, SVD of the 3x3 cross-covariance, reflection
// corrected by flipping the last singular vector. Throws NumericalError on
// degenerate geometry (rank < 2) or mismatched lists.
RigidTransform arun_fit(const std::vector<Eigen::Vector3d>& src,
                        const std::vector<Eigen::Vector3d>& dst);

// Signed self-contact residual: distance between the two end-effector
// centers minus one sphere diameter.
double self_contact_residual(const RobotModel& model, const JointConfig& q);

// Planar-contact residuals for one plane group: the plane is re-fit to the
// current centers (fit_plane_svd), displaced by one sphere radius to the
// contact surface, and each residual is the center-to-surface distance minus
// the radius — algebraically the signed coplanarity deviation of the center.
// (poses, arms) run in parallel; arms[i] in {1,2}.
std::vector<double> planar_residuals(const RobotModel& model,
                                     const std::vector<JointConfig>& poses,
                                     const std::vector<int>& arms);

// (u_pred - u_meas, v_pred - v_meas) for one marker record. Throws
// BehindCameraError when the marker is behind the camera; callers inside the
// optimization loop use the NaN-producing system evaluation instead.
Eigen::Vector2d reprojection_residual(const RobotModel& model,
                                      const DatasetRecord& rec);

// || R·x_tracker + T - fk(joints) || for one tracker record; tracker_pose
// maps tracker coordinates into the base frame; the chain is the arm's
// tracker variant.
double tracker_residual(const RobotModel& model,
                        const RigidTransform& tracker_pose,
                        const DatasetRecord& rec);

// Per-approach weights of the combined objective. Contact and plane rows are
// scaled by eta·p·mu_i; reprojection rows by eta_pixel·p_pixel; tracker rows
// by eta_tracker. mu_i converts meters to pixel-equivalents from camera
// geometry (fov_pixels px across fov_angle rad at the pose's
// end-effector-to-camera distance, isotropic); it is computed once at
// assembly from the nominal model, or 1 when disabled / no cameras exist.
struct ScalePolicy {
  double eta_contact = 1.0;
  double eta_plane = 1.0;
  double eta_pixel = 1.0;
  double eta_tracker = 1.0;
  double p_contact = 20.0;
  double p_plane = 10.0;
  double p_pixel = 1.0;
  bool pixel_per_meter = true;
  double fov_pixels = 4000.0;
  double fov_angle = M_PI / 3.0;
};

enum class BlockKind { SelfContact, Plane, Reprojection, Tracker };

const char* block_kind_name(BlockKind k);

// Which residual blocks the system assembles.
struct SystemOptions {
  bool self_contact = false;
  bool planes = false;
  bool self_observation = false;
  bool tracker = false;
  CameraMode camera_mode = CameraMode::NoCams;
};

// The stacked residual function g(x): applies the parameter vector to the
// base model, then evaluates contact rows, plane groups, reprojection rows
// (2 per observation) and tracker rows (3 per record — component-wise, the
// same squared cost as the point distance but differentiable at zero), in
// that fixed order, each multiplied by its scale. Rows that lose camera
// visibility mid-iteration evaluate to NaN (the solver rejects such trial
// steps).
class ResidualSystem {
 public:
  struct BlockSpan {
    BlockKind kind;
    Provenance tag;
    int offset = 0;
    int rows = 0;
  };

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  Eigen::VectorXd evaluate_unscaled(const Eigen::VectorXd& x) const;

  int residual_count() const { return rows_; }
  int param_count() const { return selection_.size(); }
  const ParamSelection& selection() const { return selection_; }
  const RobotModel& base_model() const { return base_; }
  const std::vector<BlockSpan>& blocks() const { return blocks_; }
  const Eigen::VectorXd& scales() const { return scales_; }
  std::vector<ParamUnit> units() const;

  // Initial parameter vector: model values, tracker pose components included
  // when the selection estimates the pose.
  Eigen::VectorXd initial_params() const;

  RobotModel model_at(const Eigen::VectorXd& x) const;

  // Base-frame pose of the tracker; used by tracker rows whenever the pose
  // is not part of the selection.
  void set_tracker_pose(const RigidTransform& t) { tracker_pose_ = t; }
  const RigidTransform& tracker_pose() const { return tracker_pose_; }
  // Re-fits the tracker pose by arun_fit from the tracker records under the
  // model parameters x (the outer step of the alternating tracker solve).
  void refit_tracker_pose(const Eigen::VectorXd& x);

  // Records dropped at assembly (marker not visible under nominal model,
  // missing optional fields for the requested block).
  int skipped_records() const { return skipped_; }

  // Tracker pose encoded as (rotation vector, translation) and back.
  static Eigen::Matrix<double, 6, 1> pose_to_components(const RigidTransform& t);
  static RigidTransform components_to_pose(const Eigen::Matrix<double, 6, 1>& c);

 private:
  friend ResidualSystem assemble(const RobotModel&, const ParamSelection&,
                                 const std::vector<Dataset>&,
                                 const SystemOptions&, const ScalePolicy&);

  Eigen::VectorXd evaluate_impl(const Eigen::VectorXd& x, bool scaled) const;

  struct ContactRow {
    JointConfig joints;
    double scale = 1.0;
  };
  struct PlaneRow {
    JointConfig joints;
    int arm = 1;
    double scale = 1.0;
  };
  struct PlaneGroup {
    Provenance tag = Provenance::PlaneH1;
    std::vector<PlaneRow> rows;
  };
  struct ReprojObs {
    int arm = 1;
    int camera_chain = -1;
    RigidTransform face{RigidTransform::Identity()};
    double u = 0.0, v = 0.0;
    double scale = 1.0;
    CameraIntrinsics intr;
  };
  struct ReprojPose {
    JointConfig joints;
    std::vector<ReprojObs> obs;
  };
  struct TrackerRow {
    JointConfig joints;
    int arm = 1;
    Eigen::Vector3d point{0, 0, 0};
    double scale = 1.0;
  };

  RobotModel base_;
  ParamSelection selection_;
  RigidTransform tracker_pose_{RigidTransform::Identity()};
  std::vector<ContactRow> contact_;
  std::vector<PlaneGroup> plane_groups_;
  std::vector<ReprojPose> reproj_;
  std::vector<TrackerRow> tracker_;
  std::vector<BlockSpan> blocks_;
  Eigen::VectorXd scales_;
  int rows_ = 0;
  int skipped_ = 0;
  int right_arm_ = -1, left_arm_ = -1;           // chain indices
  int right_tracker_ = -1, left_tracker_ = -1;   // chain indices
};

// Builds the system from tagged datasets. Self-contact blocks consume
// self-contact datasets (one row per pose), plane blocks consume the plane
// datasets (one group per provenance, one row per pose), reprojection rows
// consume every record with pixel fields, tracker rows every record with a
// tracker point. Requested blocks with no usable data raise ConfigError.
ResidualSystem assemble(const RobotModel& nominal, const ParamSelection& sel,
                        const std::vector<Dataset>& datasets,
                        const SystemOptions& opts, const ScalePolicy& scale);

}  // namespace chaincal
