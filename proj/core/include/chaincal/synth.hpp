#pragma once

#include <cstdint>
#include <vector>

#include "chaincal/dataset.hpp"
#include "chaincal/params.hpp"

namespace chaincal {

// Workspace recipe for generated data. Contact positions come from a grid in
// the base frame crossed with tool-direction combinations; plane contacts
// from grids on three planes (two horizontal heights, one vertical); tracker
// poses from seeded joint sampling. Measurement noise is additive on top of
// exactly satisfied constraints.
struct SynthConfig {
  // Self-contact: nx*ny*nz grid positions x orientation combos (max 9).
  int st_nx = 4, st_ny = 4, st_nz = 2;
  int st_orientations = 9;
  double st_x0 = -0.30, st_x1 = 0.20;
  double st_y0 = -1.10, st_y1 = -0.60;
  double st_z0 = 0.80, st_z1 = 1.00;

  // Planes: nx*ny grid positions x orientation combos (max 5) per plane.
  bool include_planes = true;
  int plane_nx = 5, plane_ny = 5;
  int plane_orientations = 5;
  double hp_x0 = -0.40, hp_x1 = 0.30;
  double hp_y0 = -1.35, hp_y1 = -0.65;
  double hp1_z = 0.67, hp2_z = 0.85;
  double vp_y0 = -1.20, vp_y1 = -0.70;
  double vp_z0 = 0.70, vp_z1 = 1.10;
  double vp_x = 0.05;

  // Marker observations by the model's cameras.
  bool include_cameras = true;

  // Tracker poses (0 disables the tracker dataset).
  int tracker_poses = 0;

  // Additive noise. Contact noise displaces the achieved contact distance,
  // pixel noise the detected marker centers, tracker noise the logged points.
  double contact_sigma = 0.0; // m
  double pixel_sigma = 0.0;   // px
  double tracker_sigma = 0.0; // m

  std::uint64_t seed = 1;
};

struct SynthResult {
  std::vector<Dataset> datasets;  // tagged st, hp1, hp2, vp, and optionally lt
  RigidTransform tracker_pose;    // ground-truth tracker-to-base transform
  int poses = 0;
  int ik_failures = 0;            // unreachable grid cells, skipped

  const Dataset& dataset(Provenance tag) const; // throws ConfigError
};

// Generates measurement data from a ground-truth model. With zero noise
// every residual kind evaluates to zero at the generating parameters (within
// the inverse-kinematics tolerance, < 1e-10).
SynthResult generate(const RobotModel& truth, const SynthConfig& cfg);

// Damped-least-squares inverse kinematics over one arm's six joints (the
// shared turntable entry of `joints` is held fixed): drives the end-effector
// center to `target` and the tool z axis to `z_dir`. `joints` seeds the
// iteration and receives the solution. Returns false if the pose is not
// reached to `tol`.
bool solve_arm_ik(const RobotModel& model, int arm,
                  const Eigen::Vector3d& target, const Eigen::Vector3d& z_dir,
                  JointConfig& joints, double tol = 1e-12);

// Perturbed copy of a parameter vector: per entry, a uniform draw on
// (-1, 1) scaled by 0.1*level for joint offsets and 0.01*level for link
// lengths and twists (level is the study's perturbation factor p). Tracker
// pose entries are left untouched.
Eigen::VectorXd perturb(const Eigen::VectorXd& x, const ParamSelection& sel,
                        double level, std::uint64_t seed);

}  // namespace chaincal
