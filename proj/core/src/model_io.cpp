#include "chaincal/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chaincal/camera_model.hpp"
#include "chaincal/types.hpp"

namespace chaincal {

namespace {

using nlohmann::json;

DHLink make_link(const std::string& name, double a, double d, double alpha,
                 double offset, int encoder, const std::string& calibrate) {
  DHLink l;
  l.name = name;
  l.a = a;
  l.d = d;
  l.alpha = alpha;
  l.offset = offset;
  l.encoder = encoder;
  l.actuated = encoder >= 0;
  l.calibrate_a = calibrate.find('a') != std::string::npos;
  l.calibrate_d = calibrate.find('d') != std::string::npos;
  l.calibrate_alpha = calibrate.find('l') != std::string::npos; // 'l' = alpha
  l.calibrate_offset = calibrate.find('o') != std::string::npos;
  return l;
}

CameraIntrinsics make_intrinsics(double fx, double fy, double cx, double cy,
                                 std::array<double, 5> dist) {
  CameraIntrinsics i;
  i.fx = fx;
  i.fy = fy;
  i.cx = cx;
  i.cy = cy;
  i.dist = dist;
  i.width = 4000;
  i.height = 6000;
  return i;
}

const char* chain_kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::Arm: return "arm";
    case ChainKind::Camera: return "camera";
    case ChainKind::TrackerArm: return "tracker-arm";
  }
  return "?";
}

ChainKind chain_kind_from_name(const std::string& s) {
  if (s == "arm") return ChainKind::Arm;
  if (s == "camera") return ChainKind::Camera;
  if (s == "tracker-arm") return ChainKind::TrackerArm;
  throw ConfigError("unknown chain kind: " + s);
}

json transform_to_json(const RigidTransform& t) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(t.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RigidTransform transform_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("transform must be a 4x4 array");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || row.size() != 4)
      throw ConfigError("transform must be a 4x4 array");
    for (int c = 0; c < 4; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  RigidTransform t;
  t.matrix() = m;
  if (!is_rigid(t)) throw ConfigError("marker pose is not a rigid transform");
  return t;
}

}  // namespace

RobotModel nominal_robot_model() {
  RobotModel m;
  m.name = "dual-arm-platform";
  m.ee_radius = 0.058;

  // Right arm, left arm, retroreflector tips, camera mounts. Encoder 0 is the
  // shared turntable, 1..6 the right arm joints, 7..12 the left arm joints.
  // The calibrate string marks fields a full calibration may touch
  // ('l' stands for alpha).
  m.links = {
      make_link("TT1", 0.0, -0.263, 0.262, -1.571, 0, ""),
      make_link("S1", 0.150, 1.416, -1.571, 0.0, 1, ""),
      make_link("L1", 0.614, 0.0, 3.142, -1.571, 2, "ado"),
      make_link("U1", 0.200, 0.0, -1.571, 0.0, 3, "adlo"),
      make_link("R1", 0.0, -0.640, 1.571, 0.0, 4, "adlo"),
      make_link("B1", 0.030, 0.0, 1.571, -1.571, 5, "adlo"),
      make_link("T1", 0.0, 0.200, 0.0, 0.0, 6, "al"),
      make_link("EE1", 0.0, 0.350, 0.0, 0.0, -1, "do"),
      make_link("TT2", 0.0, -0.263, -0.262, -1.571, 0, ""),
      make_link("S2", 0.150, 1.416, -1.571, 0.0, 7, ""),
      make_link("L2", 0.614, 0.0, 3.142, -1.571, 8, "ado"),
      make_link("U2", 0.200, 0.0, -1.571, 0.0, 9, "adlo"),
      make_link("R2", 0.0, -0.640, 1.571, 0.0, 10, "adlo"),
      make_link("B2", 0.030, 0.0, 1.571, -1.571, 11, "adlo"),
      make_link("T2", 0.0, 0.200, 0.0, 0.0, 12, "al"),
      make_link("EE2", 0.0, 0.350, 0.0, 0.0, -1, "do"),
      make_link("EEL1", 0.02, 0.250, 0.0, 1.571, -1, "ado"),
      make_link("EEL2", 0.020, 0.250, 0.0, 1.571, -1, "ado"),
      make_link("TT3", 0.2315, 1.8034, -2.5086, -2.7753, 0, "adlo"),
      make_link("C1", 0.0, -0.5670, 0.0, 0.2863, -1, "do"),
      make_link("TT4", 0.2315, 1.8602, 2.5486, -0.0860, 0, "adlo"),
      make_link("C2", 0.0, -0.4982, 0.0, 3.0618, -1, "do"),
  };

  auto links = [&](std::initializer_list<const char*> names) {
    std::vector<int> idx;
    for (const char* n : names) idx.push_back(m.link_index(n));
    return idx;
  };
  m.chains = {
      {"right_arm", ChainKind::Arm,
       links({"TT1", "S1", "L1", "U1", "R1", "B1", "T1", "EE1"})},
      {"left_arm", ChainKind::Arm,
       links({"TT2", "S2", "L2", "U2", "R2", "B2", "T2", "EE2"})},
      {"right_camera", ChainKind::Camera, links({"TT3", "C1"})},
      {"left_camera", ChainKind::Camera, links({"TT4", "C2"})},
      {"right_arm_tracker", ChainKind::TrackerArm,
       links({"TT1", "S1", "L1", "U1", "R1", "B1", "T1", "EEL1"})},
      {"left_arm_tracker", ChainKind::TrackerArm,
       links({"TT2", "S2", "L2", "U2", "R2", "B2", "T2", "EEL2"})},
  };

  m.markers = icosahedron_layout(m.ee_radius);

  m.intrinsics["right_camera"] = make_intrinsics(
      8185.397, 8170.401, 2009.318, 2963.960,
      {-0.020602, -0.205606, -0.001819, -0.000820, 0.718890});
  m.intrinsics["left_camera"] = make_intrinsics(
      8110.478, 8098.218, 1949.921, 2991.727,
      {-0.022546, -0.213094, -0.000684, -0.000512, 0.662333});

  validate_model(m);
  return m;
}

json model_to_json(const RobotModel& model) {
  json j;
  j["name"] = model.name;
  j["ee_radius"] = model.ee_radius;

  json links = json::array();
  for (const auto& l : model.links) {
    json jl;
    jl["name"] = l.name;
    jl["a"] = l.a;
    jl["d"] = l.d;
    jl["alpha"] = l.alpha;
    jl["offset"] = l.offset;
    jl["encoder"] = l.encoder;
    std::string cal;
    if (l.calibrate_a) cal += 'a';
    if (l.calibrate_d) cal += 'd';
    if (l.calibrate_alpha) cal += 'l';
    if (l.calibrate_offset) cal += 'o';
    jl["calibrate"] = cal;
    links.push_back(std::move(jl));
  }
  j["links"] = std::move(links);

  json chains = json::array();
  for (const auto& c : model.chains) {
    json jc;
    jc["name"] = c.name;
    jc["kind"] = chain_kind_name(c.kind);
    json names = json::array();
    for (int li : c.links)
      names.push_back(model.links.at(static_cast<std::size_t>(li)).name);
    jc["links"] = std::move(names);
    chains.push_back(std::move(jc));
  }
  j["chains"] = std::move(chains);

  json markers = json::object();
  for (const auto& [face, pose] : model.markers)
    markers[std::to_string(face)] = transform_to_json(pose);
  j["markers"] = std::move(markers);

  json intr = json::object();
  for (const auto& [name, i] : model.intrinsics) {
    json ji;
    ji["fx"] = i.fx;
    ji["fy"] = i.fy;
    ji["cx"] = i.cx;
    ji["cy"] = i.cy;
    ji["dist"] = i.dist;
    ji["width"] = i.width;
    ji["height"] = i.height;
    intr[name] = std::move(ji);
  }
  j["intrinsics"] = std::move(intr);
  return j;
}

RobotModel model_from_json(const json& j) {
  RobotModel m;
  try {
    m.name = j.value("name", std::string("model"));
    m.ee_radius = j.at("ee_radius").get<double>();
    for (const auto& jl : j.at("links")) {
      std::string cal = jl.value("calibrate", std::string());
      m.links.push_back(make_link(
          jl.at("name").get<std::string>(), jl.at("a").get<double>(),
          jl.at("d").get<double>(), jl.at("alpha").get<double>(),
          jl.at("offset").get<double>(), jl.value("encoder", -1), cal));
    }
    for (const auto& jc : j.at("chains")) {
      KinematicChain c;
      c.name = jc.at("name").get<std::string>();
      c.kind = chain_kind_from_name(jc.at("kind").get<std::string>());
      for (const auto& n : jc.at("links")) {
        const int li = m.link_index(n.get<std::string>());
        if (li < 0)
          throw ConfigError("chain " + c.name + " references unknown link " +
                            n.get<std::string>());
        c.links.push_back(li);
      }
      m.chains.push_back(std::move(c));
    }
    if (j.contains("markers"))
      for (const auto& [key, pose] : j.at("markers").items())
        m.markers[std::stoi(key)] = transform_from_json(pose);
    if (j.contains("intrinsics"))
      for (const auto& [name, ji] : j.at("intrinsics").items()) {
        CameraIntrinsics i;
        i.fx = ji.at("fx").get<double>();
        i.fy = ji.at("fy").get<double>();
        i.cx = ji.at("cx").get<double>();
        i.cy = ji.at("cy").get<double>();
        i.dist = ji.at("dist").get<std::array<double, 5>>();
        i.width = ji.value("width", 0);
        i.height = ji.value("height", 0);
        m.intrinsics[name] = i;
      }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model description: ") + e.what());
  }
  validate_model(m);
  return m;
}

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const std::string& path, const RobotModel& model) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << '\n';
}

std::uint64_t model_fingerprint(const RobotModel& model) {
  const std::string dump = model_to_json(model).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace chaincal
