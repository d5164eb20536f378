#include "chaincal/params.hpp"

#include <algorithm>

namespace chaincal {

const char* dh_field_name(DHField f) {
  switch (f) {
    case DHField::a: return "a";
    case DHField::d: return "d";
    case DHField::alpha: return "alpha";
    case DHField::offset: return "offset";
  }
  return "?";
}

DHField dh_field_from_name(const std::string& s) {
  if (s == "a") return DHField::a;
  if (s == "d") return DHField::d;
  if (s == "alpha") return DHField::alpha;
  if (s == "offset" || s == "o") return DHField::offset;
  throw ConfigError("unknown DH field: " + s);
}

ParamUnit dh_field_unit(DHField f) {
  return (f == DHField::a || f == DHField::d) ? ParamUnit::Meter
                                              : ParamUnit::Radian;
}

bool ParamSelection::has_tracker_pose() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const ParamEntry& e) { return e.is_tracker(); });
}

int ParamSelection::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (entries[static_cast<std::size_t>(i)].label == label) return i;
  return -1;
}

static ParamTarget make_target(const RobotModel& model,
                               const std::string& link_name, DHField f) {
  const int id = model.link_index(link_name);
  if (id < 0)
    throw ConfigError("selection references unknown link: " + link_name);
  return {id, f};
}

void ParamSelection::add(const RobotModel& model, const std::string& link_name,
                         DHField f) {
  ParamEntry e;
  e.label = std::string(dh_field_name(f)) + "_" + link_name;
  e.targets.push_back(make_target(model, link_name, f));
  e.unit = dh_field_unit(f);
  entries.push_back(std::move(e));
}

void ParamSelection::add_tied(const RobotModel& model,
                              const std::vector<std::string>& link_names,
                              DHField f, const std::string& label) {
  ParamEntry e;
  e.label = label;
  for (const auto& n : link_names) e.targets.push_back(make_target(model, n, f));
  e.unit = dh_field_unit(f);
  entries.push_back(std::move(e));
}

void ParamSelection::add_tracker_pose() {
  static const char* names[6] = {"tracker_rx", "tracker_ry", "tracker_rz",
                                 "tracker_tx", "tracker_ty", "tracker_tz"};
  for (int c = 0; c < 6; ++c) {
    ParamEntry e;
    e.label = names[c];
    e.unit = c < 3 ? ParamUnit::Radian : ParamUnit::Meter;
    e.tracker_component = c;
    entries.push_back(std::move(e));
  }
}

Eigen::VectorXd read_params(const RobotModel& model,
                            const ParamSelection& sel) {
  Eigen::VectorXd x(sel.size());
  for (int i = 0; i < sel.size(); ++i) {
    const ParamEntry& e = sel.entries[static_cast<std::size_t>(i)];
    if (e.is_tracker()) {
      x[i] = 0.0; // tracker pose lives in the residual system, not the model
      continue;
    }
    const DHLink& link = model.links[static_cast<std::size_t>(e.targets.at(0).link)];
    switch (e.targets[0].field) {
      case DHField::a: x[i] = link.a; break;
      case DHField::d: x[i] = link.d; break;
      case DHField::alpha: x[i] = link.alpha; break;
      case DHField::offset: x[i] = link.offset; break;
    }
  }
  return x;
}

RobotModel apply_params(const RobotModel& model, const ParamSelection& sel,
                        const Eigen::VectorXd& x) {
  if (x.size() != sel.size())
    throw ConfigError("parameter vector length " + std::to_string(x.size()) +
                      " does not match selection size " +
                      std::to_string(sel.size()));
  RobotModel out = model;
  for (int i = 0; i < sel.size(); ++i) {
    const ParamEntry& e = sel.entries[static_cast<std::size_t>(i)];
    if (e.is_tracker()) continue;
    for (const ParamTarget& t : e.targets) {
      DHLink& link = out.links[static_cast<std::size_t>(t.link)];
      switch (t.field) {
        case DHField::a: link.a = x[i]; break;
        case DHField::d: link.d = x[i]; break;
        case DHField::alpha: link.alpha = x[i]; break;
        case DHField::offset: link.offset = x[i]; break;
      }
    }
  }
  return out;
}

CameraMode camera_mode_from_name(const std::string& s) {
  if (s == "none" || s == "no-cams") return CameraMode::NoCams;
  if (s == "fixed" || s == "fixed-cams") return CameraMode::FixedCams;
  if (s == "calibrated" || s == "cam-calib") return CameraMode::CamCalib;
  throw ConfigError("unknown camera mode: " + s);
}

const char* camera_mode_name(CameraMode m) {
  switch (m) {
    case CameraMode::NoCams: return "none";
    case CameraMode::FixedCams: return "fixed";
    case CameraMode::CamCalib: return "calibrated";
  }
  return "?";
}

ParamSelection camera_dh_selection(const RobotModel& model) {
  ParamSelection sel;
  for (const char* mount : {"TT3", "TT4"}) {
    sel.add(model, mount, DHField::a);
    sel.add(model, mount, DHField::d);
    sel.add(model, mount, DHField::alpha);
    sel.add(model, mount, DHField::offset);
    const char* cam = (std::string(mount) == "TT3") ? "C1" : "C2";
    sel.add(model, cam, DHField::d);
    sel.add(model, cam, DHField::offset);
  }
  return sel;
}

ParamSelection preset_selection(const RobotModel& model,
                                const std::string& preset, CameraMode mode,
                                bool tie_ee_lengths) {
  ParamSelection sel;
  const bool with_cams = mode != CameraMode::NoCams;
  auto add_ee_length = [&] {
    if (tie_ee_lengths)
      sel.add_tied(model, {"EE1", "EE2"}, DHField::d, "d_EE");
    else
      sel.add(model, "EE1", DHField::d);
  };

  if (preset == "end-effector") {
    add_ee_length();
    if (with_cams) sel.add(model, "EE1", DHField::offset);
  } else if (preset == "offsets") {
    for (const char* l : {"L1", "U1", "R1", "B1"})
      sel.add(model, l, DHField::offset);
    add_ee_length();
    if (with_cams) sel.add(model, "EE1", DHField::offset);
  } else if (preset == "offsets-external") {
    for (const char* l : {"L1", "U1", "R1", "B1"})
      sel.add(model, l, DHField::offset);
    sel.add(model, "EEL1", DHField::a);
    sel.add(model, "EEL1", DHField::d);
    sel.add(model, "EEL1", DHField::offset);
  } else if (preset == "all-dh") {
    for (const char* l : {"L1", "U1", "R1", "B1"}) {
      sel.add(model, l, DHField::a);
      sel.add(model, l, DHField::d);
      if (std::string(l) != "L1") sel.add(model, l, DHField::alpha);
      sel.add(model, l, DHField::offset);
    }
    sel.add(model, "T1", DHField::a);
    sel.add(model, "T1", DHField::alpha);
    add_ee_length();
    if (with_cams) sel.add(model, "EE1", DHField::offset);
  } else if (preset == "camera-dh") {
    sel = camera_dh_selection(model);
    return sel;
  } else {
    throw ConfigError("unknown parameter preset: " + preset);
  }

  if (mode == CameraMode::CamCalib) {
    ParamSelection cams = camera_dh_selection(model);
    for (auto& e : cams.entries) sel.entries.push_back(std::move(e));
  }
  return sel;
}

}  // namespace chaincal
