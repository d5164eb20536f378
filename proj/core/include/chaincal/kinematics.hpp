#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaincal/camera_model.hpp"
#include "chaincal/types.hpp"

namespace chaincal {

// One joint vector: turntable angle shared by every chain, then the six
// actuated joints of the right arm, then the six of the left arm. Radians.
constexpr int kJointCount = 13;

struct JointConfig {
  std::array<double, kJointCount> angles{};

  double operator[](int i) const { return angles[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return angles[static_cast<std::size_t>(i)]; }

  bool operator==(const JointConfig& o) const { return angles == o.angles; }
};

// One link in the classic DH parameterization
//   T = Rot_z(theta + offset) * Trans_z(d) * Trans_x(a) * Rot_x(alpha)
// where theta is the encoder angle for actuated links and 0 otherwise.
struct DHLink {
  std::string name;
  double a = 0.0;      // m
  double d = 0.0;      // m
  double alpha = 0.0;  // rad
  double offset = 0.0; // rad
  bool actuated = false;
  int encoder = -1;    // index into JointConfig, -1 when not actuated

  // Which fields a full calibration may touch (fixed-by-construction fields
  // such as the base mounting stay false).
  bool calibrate_a = false, calibrate_d = false;
  bool calibrate_alpha = false, calibrate_offset = false;
};

enum class ChainKind { Arm, Camera, TrackerArm };

// A chain references links in the model's link store by index, so links that
// are physically shared between chains (an arm and its tracker variant) are
// stored once and updated once.
struct KinematicChain {
  std::string name;
  ChainKind kind = ChainKind::Arm;
  std::vector<int> links;
};

// Marker face pose in the end-effector frame, keyed by face id.
using MarkerLayout = std::map<int, RigidTransform>;

struct RobotModel {
  std::string name;
  std::vector<DHLink> links;
  std::vector<KinematicChain> chains;
  // End-effector sphere radius (contact happens at center distance 2*radius).
  double ee_radius = 0.0;
  // Marker face poses in the end-effector frame, shared by both arms.
  MarkerLayout markers;
  // Intrinsics keyed by camera chain name.
  std::map<std::string, CameraIntrinsics> intrinsics;

  int link_index(const std::string& link_name) const;       // -1 if absent
  int chain_index(const std::string& chain_name) const;     // -1 if absent
  const KinematicChain& chain(const std::string& chain_name) const; // throws ConfigError
  const DHLink& link(const std::string& link_name) const;           // throws ConfigError
};

// Transform of a single link given its encoder angle (ignored when the link
// is not actuated).
RigidTransform dh_transform(const DHLink& link, double encoder_angle);

// Base-to-tip transform of a chain. All chains share the identity base frame.
// Throws ConfigError if a link references an encoder index out of range.
RigidTransform forward_kinematics(const RobotModel& model,
                                  const KinematicChain& chain,
                                  const JointConfig& joints);
RigidTransform forward_kinematics(const RobotModel& model,
                                  const std::string& chain_name,
                                  const JointConfig& joints);

// World pose of a marker face on arm 1 (right) or 2 (left).
RigidTransform marker_world_pose(const RobotModel& model, int arm, int face,
                                 const JointConfig& joints);

// Center of the end-effector sphere of arm 1 or 2, in the base frame.
Eigen::Vector3d ee_center(const RobotModel& model, int arm,
                          const JointConfig& joints);

// Arm chain name for index 1 (right) / 2 (left); throws ConfigError otherwise.
const std::string& arm_chain_name(const RobotModel& model, int arm);

// Structural validation: arm/tracker chains have 8 links, camera chains 2,
// every chain's first link reads encoder 0, encoder indices are in range and
// unique within a chain, camera chains carry intrinsics. Throws ConfigError.
void validate_model(const RobotModel& model);

// Marker layout on the faces of a regular icosahedron of the given
// circumradius: face id -> pose with origin at the face centroid and z along
// the outward normal. 20 faces, ids 0..19.
MarkerLayout icosahedron_layout(double circumradius);

}  // namespace chaincal
