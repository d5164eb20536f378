#include "chaincal/camera_model.hpp"

#include <cmath>

namespace chaincal {

PixelObservation project(const CameraIntrinsics& intr,
                         const Eigen::Vector3d& p) {
  if (!(p.z() > 0.0))
    throw BehindCameraError("point behind camera, z = " +
                            std::to_string(p.z()));
  const double x = p.x() / p.z();
  const double y = p.y() / p.z();
  const double r2 = x * x + y * y;
  const double radial =
      1.0 + r2 * (intr.dist[0] + r2 * (intr.dist[1] + r2 * intr.dist[2]));
  const double xd = x * radial + 2.0 * intr.dist[3] * x * y +
                    intr.dist[4] * (r2 + 2.0 * x * x);
  const double yd = y * radial + intr.dist[3] * (r2 + 2.0 * y * y) +
                    2.0 * intr.dist[4] * x * y;
  return {intr.fx * xd + intr.cx, intr.fy * yd + intr.cy};
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& intr,
                                                const Eigen::Vector3d& p) {
  const double h = 1e-6;
  Eigen::Matrix<double, 2, 3> j;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d lo = p, hi = p;
    lo[k] -= h;
    hi[k] += h;
    const PixelObservation a = project(intr, lo);
    const PixelObservation b = project(intr, hi);
    j(0, k) = (b.u - a.u) / (2.0 * h);
    j(1, k) = (b.v - a.v) / (2.0 * h);
  }
  return j;
}

Eigen::Vector3d uncertainty_ellipsoid(const CameraIntrinsics& intr_a,
                                      const RigidTransform& pose_a,
                                      const CameraIntrinsics& intr_b,
                                      const RigidTransform& pose_b,
                                      const Eigen::Vector3d& point_world) {
  const RigidTransform world_to_a = pose_a.inverse();
  const RigidTransform world_to_b = pose_b.inverse();
  Eigen::Matrix<double, 4, 3> j;
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d lo = point_world, hi = point_world;
    lo[k] -= h;
    hi[k] += h;
    const PixelObservation a0 = project(intr_a, world_to_a * lo);
    const PixelObservation a1 = project(intr_a, world_to_a * hi);
    const PixelObservation b0 = project(intr_b, world_to_b * lo);
    const PixelObservation b1 = project(intr_b, world_to_b * hi);
    j(0, k) = (a1.u - a0.u) / (2.0 * h);
    j(1, k) = (a1.v - a0.v) / (2.0 * h);
    j(2, k) = (b1.u - b0.u) / (2.0 * h);
    j(3, k) = (b1.v - b0.v) / (2.0 * h);
  }
  const Eigen::Matrix3d q = j.transpose() * j;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(q);
  if (es.info() != Eigen::Success)
    throw NumericalError("uncertainty ellipsoid eigendecomposition failed");
  Eigen::Vector3d ev = es.eigenvalues(); // ascending
  for (int i = 0; i < 3; ++i) {
    if (!(ev[i] > 0.0))
      throw NumericalError("degenerate camera pair: non-positive curvature");
  }
  // Largest eigenvalue = tightest direction; return semi-axes ascending.
  return {1.0 / std::sqrt(ev[2]), 1.0 / std::sqrt(ev[1]),
          1.0 / std::sqrt(ev[0])};
}

}  // namespace chaincal
