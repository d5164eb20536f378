#include "chaincal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace chaincal {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::SelfContact: return "self-contact";
    case Provenance::PlaneH1: return "plane-h1";
    case Provenance::PlaneH2: return "plane-h2";
    case Provenance::PlaneV: return "plane-v";
    case Provenance::Tracker: return "tracker";
    case Provenance::Synthetic: return "synthetic";
  }
  return "?";
}

Provenance provenance_from_name(const std::string& s) {
  if (s == "self-contact" || s == "st") return Provenance::SelfContact;
  if (s == "plane-h1" || s == "hp1") return Provenance::PlaneH1;
  if (s == "plane-h2" || s == "hp2") return Provenance::PlaneH2;
  if (s == "plane-v" || s == "vp") return Provenance::PlaneV;
  if (s == "tracker" || s == "lt") return Provenance::Tracker;
  if (s == "synthetic") return Provenance::Synthetic;
  throw ConfigError("unknown dataset provenance: " + s);
}

int Dataset::pose_count() const { return static_cast<int>(pose_ids().size()); }

int Dataset::pixel_count() const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(),
                    [](const DatasetRecord& r) { return r.pixel.has_value(); }));
}

int Dataset::tracker_count() const {
  return static_cast<int>(std::count_if(
      records.begin(), records.end(),
      [](const DatasetRecord& r) { return r.tracker_point.has_value(); }));
}

std::vector<long> Dataset::pose_ids() const {
  std::vector<long> ids;
  std::map<long, bool> seen;
  for (const auto& r : records) {
    if (!seen.count(r.pose_id)) {
      seen[r.pose_id] = true;
      ids.push_back(r.pose_id);
    }
  }
  return ids;
}

std::map<long, std::vector<int>> Dataset::group_by_pose() const {
  std::map<long, std::vector<int>> groups;
  for (std::size_t i = 0; i < records.size(); ++i)
    groups[records[i].pose_id].push_back(static_cast<int>(i));
  return groups;
}

const char* const kCsvHeader =
    "pose_id,face,arm,camera,u,v,"
    "q_tt,q_s1,q_l1,q_u1,q_r1,q_b1,q_t1,q_s2,q_l2,q_u2,q_r2,q_b2,q_t2,"
    "tracker_x,tracker_y,tracker_z,u95";

static constexpr int kCsvColumns = 23;

static std::vector<double> parse_line(const std::string& line, int line_no) {
  std::vector<double> vals;
  vals.reserve(kCsvColumns);
  const char* p = line.c_str();
  while (true) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p)
      throw DataError("line " + std::to_string(line_no) +
                      ": expected a number at field " +
                      std::to_string(vals.size() + 1));
    vals.push_back(v);
    p = end;
    while (*p == ' ') ++p;
    if (*p == ',') {
      ++p;
      continue;
    }
    if (*p == '\0' || *p == '\r') break;
    throw DataError("line " + std::to_string(line_no) +
                    ": unexpected character '" + std::string(1, *p) + "'");
  }
  if (static_cast<int>(vals.size()) != kCsvColumns)
    throw DataError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(kCsvColumns) + " fields, got " +
                    std::to_string(vals.size()));
  return vals;
}

Dataset load_csv(const std::string& path, Provenance provenance) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  Dataset ds;
  ds.provenance = provenance;

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  // Tolerate a trailing \r from files written on other platforms.
  std::string header = line;
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kCsvHeader)
    throw DataError(path + ": unexpected header line; expected \"" +
                    std::string(kCsvHeader) + "\"");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<double> v = parse_line(line, line_no);

    DatasetRecord r;
    if (!std::isfinite(v[0]))
      throw DataError("line " + std::to_string(line_no) + ": pose_id is nan");
    r.pose_id = static_cast<long>(std::llround(v[0]));
    r.arm = std::isfinite(v[2]) ? static_cast<int>(std::llround(v[2])) : 0;

    const bool has_face = std::isfinite(v[1]);
    const bool has_cam = std::isfinite(v[3]);
    const bool has_u = std::isfinite(v[4]);
    const bool has_v = std::isfinite(v[5]);
    if (has_face != has_cam || has_face != has_u || has_face != has_v)
      throw DataError("line " + std::to_string(line_no) +
                      ": face, camera, u, v must be present together");
    if (has_face) {
      r.face = static_cast<int>(std::llround(v[1]));
      r.camera = static_cast<int>(std::llround(v[3]));
      r.pixel = PixelObservation{v[4], v[5]};
    }

    for (int k = 0; k < kJointCount; ++k) {
      if (!std::isfinite(v[static_cast<std::size_t>(6 + k)]))
        throw DataError("line " + std::to_string(line_no) +
                        ": joint angle " + std::to_string(k + 1) + " is nan");
      r.joints[k] = v[static_cast<std::size_t>(6 + k)];
    }

    const bool has_tx = std::isfinite(v[19]);
    const bool has_ty = std::isfinite(v[20]);
    const bool has_tz = std::isfinite(v[21]);
    if (has_tx != has_ty || has_tx != has_tz)
      throw DataError("line " + std::to_string(line_no) +
                      ": tracker x, y, z must be present together");
    if (has_tx) r.tracker_point = Eigen::Vector3d(v[19], v[20], v[21]);
    if (std::isfinite(v[22])) r.u95 = v[22];

    ds.records.push_back(r);
  }

  // Every record of a pose must carry the same joint vector.
  std::map<long, JointConfig> joints_of;
  for (const auto& r : ds.records) {
    auto [it, inserted] = joints_of.emplace(r.pose_id, r.joints);
    if (!inserted && !(it->second == r.joints))
      throw DataError(path + ": pose " + std::to_string(r.pose_id) +
                      " has records with differing joint vectors");
  }
  return ds;
}

static void append_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void save_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path);
  out << kCsvHeader << "\n";
  const double nan = std::nan("");
  std::string line;
  for (const auto& r : dataset.records) {
    line.clear();
    append_value(line, static_cast<double>(r.pose_id));
    line += ',';
    append_value(line, r.face ? *r.face : nan);
    line += ',';
    append_value(line, r.arm ? r.arm : nan);
    line += ',';
    append_value(line, r.camera ? *r.camera : nan);
    line += ',';
    append_value(line, r.pixel ? r.pixel->u : nan);
    line += ',';
    append_value(line, r.pixel ? r.pixel->v : nan);
    for (int k = 0; k < kJointCount; ++k) {
      line += ',';
      append_value(line, r.joints[k]);
    }
    for (int k = 0; k < 3; ++k) {
      line += ',';
      append_value(line, r.tracker_point ? (*r.tracker_point)[k] : nan);
    }
    line += ',';
    append_value(line, r.u95 ? *r.u95 : nan);
    out << line << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double ratio,
                                  std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw ConfigError("split ratio must be in [0, 1]");
  std::vector<long> ids = dataset.pose_ids();
  // Fisher-Yates with our own draws so the shuffle is platform-independent.
  Rng rng(Rng::mix(seed, 0xda7a5e7));
  for (std::size_t i = ids.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(i));
    std::swap(ids[i - 1], ids[j]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(ids.size())));
  std::map<long, bool> in_train;
  for (std::size_t i = 0; i < ids.size(); ++i) in_train[ids[i]] = i < n_train;

  Dataset train, test;
  train.provenance = test.provenance = dataset.provenance;
  for (const auto& r : dataset.records)
    (in_train[r.pose_id] ? train : test).records.push_back(r);
  return {train, test};
}

}  // namespace chaincal
