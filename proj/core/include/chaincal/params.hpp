#pragma once

#include <string>
#include <vector>

#include "chaincal/kinematics.hpp"

namespace chaincal {

enum class DHField { a, d, alpha, offset };

const char* dh_field_name(DHField f);
DHField dh_field_from_name(const std::string& s); // throws ConfigError

// Unit family of an estimated parameter; drives finite-difference step
// choice, perturbation amplitude, and report formatting.
enum class ParamUnit { Meter, Radian };

ParamUnit dh_field_unit(DHField f);

struct ParamTarget {
  int link = -1; // index into RobotModel::links
  DHField field = DHField::a;
};

// One estimated scalar. Multiple targets make a tied parameter: the same
// value is written to every target (e.g. both end-effector lengths).
struct ParamEntry {
  std::string label;
  std::vector<ParamTarget> targets;
  ParamUnit unit = ParamUnit::Meter;
  // Tracker pose component 0..5 (rotation vector, then translation) when
  // the tracker pose is estimated as part of the parameter vector; -1 for
  // ordinary DH entries.
  int tracker_component = -1;

  bool is_tracker() const { return tracker_component >= 0; }
};

// Ordered list of estimated parameters; the parameter vector is indexed in
// entry order.
struct ParamSelection {
  std::vector<ParamEntry> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool has_tracker_pose() const;
  int index_of(const std::string& label) const; // -1 if absent

  // Adds one DH entry; label defaults to "<field>_<link name>".
  void add(const RobotModel& model, const std::string& link_name, DHField f);
  // Adds one tied DH entry spanning several links.
  void add_tied(const RobotModel& model,
                const std::vector<std::string>& link_names, DHField f,
                const std::string& label);
  // Adds the 6 tracker pose components.
  void add_tracker_pose();
};

// Reads current values (first target of each entry) from the model.
Eigen::VectorXd read_params(const RobotModel& model,
                            const ParamSelection& sel);

// Returns a copy of the model with the DH entries of x written through all
// their targets. Tracker entries are ignored here (the residual system
// consumes them).
RobotModel apply_params(const RobotModel& model, const ParamSelection& sel,
                        const Eigen::VectorXd& x);

// Named presets. Cameras add the tool-roll offset (identifiable only through
// marker observations); camera_dh additionally exposes the camera chains'
// mounting parameters.
enum class CameraMode { NoCams, FixedCams, CamCalib };

CameraMode camera_mode_from_name(const std::string& s); // throws ConfigError
const char* camera_mode_name(CameraMode m);

// preset names: "end-effector", "offsets", "offsets-external", "all-dh",
// "camera-dh". tie_ee_lengths replaces the single right-arm length entry by
// one entry tied across both arms (contact-only studies).
ParamSelection preset_selection(const RobotModel& model,
                                const std::string& preset, CameraMode mode,
                                bool tie_ee_lengths = false);

// The camera-mounting subset alone (what the precalibration stage solves).
ParamSelection camera_dh_selection(const RobotModel& model);

}  // namespace chaincal
