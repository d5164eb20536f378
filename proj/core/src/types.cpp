#include "chaincal/types.hpp"

#include <cmath>

namespace chaincal {

double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double w = std::fmod(a, two_pi);
  if (w <= -M_PI) w += two_pi;
  if (w > M_PI) w -= two_pi;
  return w;
}

double shortest_angle_diff(double a, double b) { return wrap_angle(a - b); }

bool is_rigid(const RigidTransform& t, double tol) {
  const Eigen::Matrix3d r = t.linear();
  const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).norm();
  return ortho < tol && std::abs(r.determinant() - 1.0) < tol;
}

// splitmix64; also used to derive child seeds.
static std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
  const double u2 = uniform01();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  have_spare_ = true;
  return mag * std::cos(ang);
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x517cc1b727220a95ull * (stream + 1));
  splitmix64(x);
  return splitmix64(x);
}

}  // namespace chaincal
