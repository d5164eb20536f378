#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "chaincal/kinematics.hpp"

namespace chaincal {

// The dual-arm platform: two 7-link manipulators plus end-effector links on a
// shared turntable, two turntable-mounted cameras, and retroreflector
// variants of both arm chains. Chain declaration order fixes the arm/camera
// indices used in datasets (right = 1, left = 2).
RobotModel nominal_robot_model();

nlohmann::json model_to_json(const RobotModel& model);
RobotModel model_from_json(const nlohmann::json& j); // throws ConfigError

RobotModel load_model(const std::string& path); // throws ConfigError
void save_model(const std::string& path, const RobotModel& model);

// FNV-1a hash of the canonical serialization; stable across runs, changes
// whenever any model quantity changes.
std::uint64_t model_fingerprint(const RobotModel& model);

}  // namespace chaincal
