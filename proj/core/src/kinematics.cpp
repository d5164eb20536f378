#include "chaincal/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "chaincal/camera_model.hpp"

namespace chaincal {

int RobotModel::link_index(const std::string& link_name) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].name == link_name) return static_cast<int>(i);
  return -1;
}

int RobotModel::chain_index(const std::string& chain_name) const {
  for (std::size_t i = 0; i < chains.size(); ++i)
    if (chains[i].name == chain_name) return static_cast<int>(i);
  return -1;
}

const KinematicChain& RobotModel::chain(const std::string& chain_name) const {
  const int i = chain_index(chain_name);
  if (i < 0) throw ConfigError("unknown chain: " + chain_name);
  return chains[static_cast<std::size_t>(i)];
}

const DHLink& RobotModel::link(const std::string& link_name) const {
  const int i = link_index(link_name);
  if (i < 0) throw ConfigError("unknown link: " + link_name);
  return links[static_cast<std::size_t>(i)];
}

RigidTransform dh_transform(const DHLink& link, double encoder_angle) {
  const double theta = (link.actuated ? encoder_angle : 0.0) + link.offset;
  const double c = std::cos(theta), s = std::sin(theta);
  const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);
  RigidTransform t = RigidTransform::Identity();
  Eigen::Matrix3d r;
  r << c, -s * ca, s * sa,
       s, c * ca, -c * sa,
       0.0, sa, ca;
  t.linear() = r;
  t.translation() = Eigen::Vector3d(link.a * c, link.a * s, link.d);
  return t;
}

RigidTransform forward_kinematics(const RobotModel& model,
                                  const KinematicChain& chain,
                                  const JointConfig& joints) {
  RigidTransform t = RigidTransform::Identity();
  for (int id : chain.links) {
    const DHLink& link = model.links[static_cast<std::size_t>(id)];
    double enc = 0.0;
    if (link.actuated) {
      if (link.encoder < 0 || link.encoder >= kJointCount)
        throw ConfigError("link " + link.name + " reads encoder " +
                          std::to_string(link.encoder) +
                          " outside the joint vector");
      enc = joints[link.encoder];
    }
    t = t * dh_transform(link, enc);
  }
  return t;
}

RigidTransform forward_kinematics(const RobotModel& model,
                                  const std::string& chain_name,
                                  const JointConfig& joints) {
  return forward_kinematics(model, model.chain(chain_name), joints);
}

const std::string& arm_chain_name(const RobotModel& model, int arm) {
  for (const auto& c : model.chains) {
    if (c.kind != ChainKind::Arm) continue;
    if (arm == 1 && c.name.find("right") != std::string::npos) return c.name;
    if (arm == 2 && c.name.find("left") != std::string::npos) return c.name;
  }
  throw ConfigError("no arm chain for arm index " + std::to_string(arm));
}

RigidTransform marker_world_pose(const RobotModel& model, int arm, int face,
                                 const JointConfig& joints) {
  auto it = model.markers.find(face);
  if (it == model.markers.end())
    throw ConfigError("unknown marker face id " + std::to_string(face));
  return forward_kinematics(model, arm_chain_name(model, arm), joints) *
         it->second;
}

Eigen::Vector3d ee_center(const RobotModel& model, int arm,
                          const JointConfig& joints) {
  return forward_kinematics(model, arm_chain_name(model, arm), joints)
      .translation();
}

void validate_model(const RobotModel& model) {
  if (model.ee_radius <= 0.0)
    throw ConfigError("ee_radius must be positive");
  for (const auto& chain : model.chains) {
    if (chain.links.empty())
      throw ConfigError("chain " + chain.name + " has no links");
    const std::size_t expected =
        chain.kind == ChainKind::Camera ? 2u : 8u;
    if (chain.links.size() != expected)
      throw ConfigError("chain " + chain.name + " has " +
                        std::to_string(chain.links.size()) +
                        " links, expected " + std::to_string(expected));
    std::set<int> encoders;
    for (int id : chain.links) {
      if (id < 0 || id >= static_cast<int>(model.links.size()))
        throw ConfigError("chain " + chain.name + " references missing link");
      const DHLink& link = model.links[static_cast<std::size_t>(id)];
      if (link.actuated != (link.encoder >= 0))
        throw ConfigError("link " + link.name +
                          ": actuated flag and encoder index disagree");
      if (link.actuated) {
        if (link.encoder >= kJointCount)
          throw ConfigError("link " + link.name + " encoder out of range");
        if (!encoders.insert(link.encoder).second)
          throw ConfigError("chain " + chain.name +
                            " reads one encoder twice");
      }
      if (!std::isfinite(link.a) || !std::isfinite(link.d) ||
          !std::isfinite(link.alpha) || !std::isfinite(link.offset))
        throw ConfigError("link " + link.name + " has non-finite parameters");
    }
    const DHLink& first =
        model.links[static_cast<std::size_t>(chain.links.front())];
    if (!first.actuated || first.encoder != 0)
      throw ConfigError("chain " + chain.name +
                        " must start at the shared turntable encoder");
    if (chain.kind == ChainKind::Camera &&
        !model.intrinsics.count(chain.name))
      throw ConfigError("camera chain " + chain.name + " has no intrinsics");
  }
}

MarkerLayout icosahedron_layout(double circumradius) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
      {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
      {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x *= circumradius / std::sqrt(1.0 + p * p);
  static const int faces[20][3] = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  MarkerLayout layout;
  for (int f = 0; f < 20; ++f) {
    const Eigen::Vector3d a = v[faces[f][0]], b = v[faces[f][1]],
                          c = v[faces[f][2]];
    const Eigen::Vector3d centroid = (a + b + c) / 3.0;
    const Eigen::Vector3d z = centroid.normalized();
    const Eigen::Vector3d x = (b - a - (b - a).dot(z) * z).normalized();
    const Eigen::Vector3d y = z.cross(x);
    RigidTransform t = RigidTransform::Identity();
    Eigen::Matrix3d r;
    r.col(0) = x; r.col(1) = y; r.col(2) = z;
    t.linear() = r;
    t.translation() = centroid;
    layout[f] = t;
  }
  return layout;
}

}  // namespace chaincal
