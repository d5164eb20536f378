#include "chaincal/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace chaincal {

const BlockRmse* EvalReport::find(BlockKind kind) const {
  for (const auto& b : blocks)
    if (b.kind == kind) return &b;
  return nullptr;
}

EvalReport rmse(const ResidualSystem& system, const Eigen::VectorXd& x) {
  const Eigen::VectorXd scaled = system.evaluate(x);
  const Eigen::VectorXd raw = system.evaluate_unscaled(x);

  struct Acc {
    double scaled_sq = 0.0, raw_sq = 0.0;
    int rows = 0, skipped = 0, raw_terms = 0;
  };
  std::map<BlockKind, Acc> acc;

  for (const auto& span : system.blocks()) {
    Acc& a = acc[span.kind];
    const int group = span.kind == BlockKind::Reprojection  ? 2
                      : span.kind == BlockKind::Tracker     ? 3
                                                            : 1;
    if (group > 1) {
      // Rows come in per-observation groups; raw RMSE is over the
      // observation error norms (px for markers, m for tracker points).
      for (int i = 0; i < span.rows; i += group) {
        double raw_sq = 0.0, scaled_sq = 0.0;
        bool finite = true;
        for (int c = 0; c < group; ++c) {
          const double v = raw[span.offset + i + c];
          const double s = scaled[span.offset + i + c];
          finite = finite && std::isfinite(v);
          raw_sq += v * v;
          scaled_sq += s * s;
        }
        if (!finite) {
          a.skipped += group;
          continue;
        }
        a.scaled_sq += scaled_sq;
        a.raw_sq += raw_sq;
        a.rows += group;
        a.raw_terms += 1; // one observation
      }
    } else {
      for (int i = 0; i < span.rows; ++i) {
        const double v = raw[span.offset + i];
        if (!std::isfinite(v)) {
          ++a.skipped;
          continue;
        }
        const double s = scaled[span.offset + i];
        a.scaled_sq += s * s;
        a.raw_sq += v * v;
        ++a.rows;
        ++a.raw_terms;
      }
    }
  }

  EvalReport report;
  double total_sq = 0.0;
  int total_rows = 0;
  for (const auto& [kind, a] : acc) {
    BlockRmse b;
    b.kind = kind;
    b.rows = a.rows;
    b.skipped = a.skipped;
    b.scaled = a.rows > 0 ? std::sqrt(a.scaled_sq / a.rows) : 0.0;
    b.raw = a.raw_terms > 0 ? std::sqrt(a.raw_sq / a.raw_terms) : 0.0;
    report.blocks.push_back(b);
    total_sq += a.scaled_sq;
    total_rows += a.rows;
  }
  report.total_scaled = total_rows > 0 ? std::sqrt(total_sq / total_rows) : 0.0;
  return report;
}

std::vector<Correction> corrections(const ParamSelection& sel,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& baseline) {
  if (x.size() != sel.size() || baseline.size() != sel.size())
    throw ConfigError("corrections: vector length does not match the selection");
  std::vector<Correction> out;
  out.reserve(static_cast<std::size_t>(sel.size()));
  for (int i = 0; i < sel.size(); ++i) {
    const ParamEntry& e = sel.entries[static_cast<std::size_t>(i)];
    Correction c;
    c.label = e.label;
    c.unit = e.unit;
    c.value = e.unit == ParamUnit::Radian
                  ? shortest_angle_diff(x[i], baseline[i])
                  : x[i] - baseline[i];
    out.push_back(std::move(c));
  }
  return out;
}

TrackerEval tracker_rmse(const RobotModel& model, const Dataset& data,
                         const std::optional<RigidTransform>& pose) {
  std::vector<Eigen::Vector3d> meas, tips;
  for (const auto& rec : data.records) {
    if (!rec.tracker_point) continue;
    const int arm = rec.arm == 2 ? 2 : 1;
    const std::string chain = arm_chain_name(model, arm) + "_tracker";
    if (model.chain_index(chain) < 0)
      throw ConfigError("model has no tracker chain " + chain);
    meas.push_back(*rec.tracker_point);
    tips.push_back(forward_kinematics(model, chain, rec.joints).translation());
  }
  if (meas.empty()) throw ConfigError("dataset carries no tracker points");

  TrackerEval eval;
  eval.pose = pose ? *pose : arun_fit(meas, tips);
  double sq = 0.0;
  for (std::size_t i = 0; i < meas.size(); ++i)
    sq += (eval.pose * meas[i] - tips[i]).squaredNorm();
  eval.rows = static_cast<int>(meas.size());
  eval.rmse = std::sqrt(sq / static_cast<double>(meas.size()));
  return eval;
}

Stats mean_sd(const std::vector<double>& values) {
  Stats s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / (s.n - 1));
  }
  return s;
}

nlohmann::json eval_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["total_scaled_rmse"] = report.total_scaled;
  nlohmann::json blocks = nlohmann::json::object();
  for (const auto& b : report.blocks) {
    nlohmann::json jb;
    jb["rows"] = b.rows;
    jb["skipped"] = b.skipped;
    jb["scaled_rmse"] = b.scaled;
    jb["raw_rmse"] = b.raw;
    jb["raw_unit"] = b.kind == BlockKind::Reprojection ? "px" : "m";
    blocks[block_kind_name(b.kind)] = std::move(jb);
  }
  j["blocks"] = std::move(blocks);
  return j;
}

void write_rmse_csv(const std::string& path,
                    const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report file: " + path);
  out << "label,block,rows,skipped,scaled_rmse,raw_rmse,raw_unit\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& [label, report] : rows)
    for (const auto& b : report.blocks)
      out << label << ',' << block_kind_name(b.kind) << ',' << b.rows << ','
          << b.skipped << ',' << num(b.scaled) << ',' << num(b.raw) << ','
          << (b.kind == BlockKind::Reprojection ? "px" : "m") << '\n';
}

}  // namespace chaincal
