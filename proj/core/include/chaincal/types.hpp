#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chaincal {

// Rigid body transform. Stored unconstrained; is_rigid() checks orthonormality.
using RigidTransform = Eigen::Isometry3d;

// Error taxonomy. The CLI maps these to distinct exit codes:
// ConfigError -> 2, DataError -> 3, NumericalError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Signed difference a-b wrapped to (-pi, pi] (shortest way around the circle).
double shortest_angle_diff(double a, double b);

// True if the rotation block is orthonormal with determinant +1 within tol.
bool is_rigid(const RigidTransform& t, double tol = 1e-9);

// Deterministic random stream. Draws are portable across platforms: the
// uniform and normal transforms are implemented here rather than delegated to
// std::*_distribution (whose output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (no rejection, fully deterministic).
  double normal();
  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  // Derives an independent child seed, e.g. one per pose or per trial.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chaincal
