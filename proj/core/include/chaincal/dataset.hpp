#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chaincal/camera_model.hpp"
#include "chaincal/kinematics.hpp"

namespace chaincal {

// Where a dataset came from: self-contact poses, the two horizontal plane
// heights, the vertical plane, tracker logging, or the generator.
enum class Provenance { SelfContact, PlaneH1, PlaneH2, PlaneV, Tracker, Synthetic };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& s); // throws ConfigError

// One measurement line. A pose contributes several lines (one per detected
// marker); they all carry the same joint vector. Marker fields (face, camera,
// pixel) are present or absent together, as are the tracker fields.
struct DatasetRecord {
  long pose_id = 0;
  int arm = 0; // 1 right, 2 left, 0 unspecified
  JointConfig joints;
  std::optional<int> face;
  std::optional<int> camera; // 1 right camera, 2 left camera
  std::optional<PixelObservation> pixel;
  std::optional<Eigen::Vector3d> tracker_point; // tracker frame, m
  std::optional<double> u95;                    // reported uncertainty, m
};

struct Dataset {
  Provenance provenance = Provenance::Synthetic;
  std::vector<DatasetRecord> records;

  int record_count() const { return static_cast<int>(records.size()); }
  int pose_count() const;
  int pixel_count() const;   // records with a marker observation
  int tracker_count() const; // records with a tracker point

  // Unique pose ids in first-appearance order.
  std::vector<long> pose_ids() const;
  // Record indices per pose id.
  std::map<long, std::vector<int>> group_by_pose() const;
};

// The CSV schema. One header line with exactly these column names, then one
// record per line; absent values are written and read as "nan".
extern const char* const kCsvHeader;

// Throws DataError on malformed lines (message carries the line number) and
// when records of one pose disagree on the joint vector.
Dataset load_csv(const std::string& path, Provenance provenance);

void save_csv(const std::string& path, const Dataset& dataset);

// Splits by pose id: seeded shuffle of the unique ids, first
// round(ratio * n_poses) ids go to the first (training) part. Every record
// lands in exactly one part.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double ratio,
                                  std::uint64_t seed);

// Keeps records satisfying pred; pose grouping survives.
template <class Pred>
Dataset filter(const Dataset& dataset, Pred pred) {
  Dataset out;
  out.provenance = dataset.provenance;
  for (const auto& r : dataset.records)
    if (pred(r)) out.records.push_back(r);
  return out;
}

}  // namespace chaincal
