#pragma once

#include <array>

#include "chaincal/types.hpp"

namespace chaincal {

struct PixelObservation {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole camera with three radial and two tangential distortion terms.
struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;  // px
  double cx = 0.0, cy = 0.0;  // px
  // dist[0..2] radial (r^2, r^4, r^6), dist[3..4] tangential.
  std::array<double, 5> dist{};
  int width = 0, height = 0;  // px, 0 when unknown
};

// Thrown by project() when the point does not lie in front of the camera.
struct BehindCameraError : NumericalError {
  using NumericalError::NumericalError;
};

// Projects a point given in the camera frame (z forward) to pixels:
// normalize by depth, apply the radial/tangential distortion polynomial,
// then the pinhole matrix. Never undistorts. Throws BehindCameraError when
// z <= 0.
PixelObservation project(const CameraIntrinsics& intr,
                         const Eigen::Vector3d& point_cam);

// d(pixel)/d(point_cam), 2x3, by central differences (step 1e-6).
Eigen::Matrix<double, 2, 3> projection_jacobian(
    const CameraIntrinsics& intr, const Eigen::Vector3d& point_cam);

// Semi-axes (ascending) of the position uncertainty ellipsoid of a world
// point observed by two cameras: stack both cameras' pixel sensitivities
// into a 4x3 matrix J, take the eigenvalues of J^T J; each eigenvalue is an
// inverse squared semi-axis. cam_poses map camera-frame coordinates to world
// coordinates.
Eigen::Vector3d uncertainty_ellipsoid(
    const CameraIntrinsics& intr_a, const RigidTransform& pose_a,
    const CameraIntrinsics& intr_b, const RigidTransform& pose_b,
    const Eigen::Vector3d& point_world);

}  // namespace chaincal
