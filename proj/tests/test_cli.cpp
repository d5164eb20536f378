#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string tool() {
  const char* t = std::getenv("CHAINCAL_TOOL");
  REQUIRE_MESSAGE(t != nullptr, "CHAINCAL_TOOL must point at the cli binary");
  return t;
}

// Runs a command line, captures stdout to a file, returns the exit code.
int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd =
      tool() + " " + args + " > " + stdout_path + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

// One shared workspace with a small noiseless dataset, generated once.
const fs::path& workspace() {
  static const fs::path dir = [] {
    const fs::path d = "/tmp/chaincal_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    const int rc = run("synth --output " + (d / "data").string() +
                       " --seed 2 --st-grid 2 2 1 --st-orientations 4"
                       " --plane-grid 4 3 --plane-orientations 2");
    REQUIRE(rc == 0);
    return d;
  }();
  return dir;
}

json base_config() {
  const fs::path data = workspace() / "data";
  json cfg;
  cfg["model"] = "nominal";
  cfg["data"]["st"] = (data / "st.csv").string();
  cfg["data"]["hp1"] = (data / "hp1.csv").string();
  cfg["data"]["hp2"] = (data / "hp2.csv").string();
  cfg["data"]["vp"] = (data / "vp.csv").string();
  cfg["preset"] = "offsets";
  cfg["camera_mode"] = "fixed";
  cfg["blocks"] =
      json{{"self_contact", true}, {"planes", true}, {"self_observation", true}};
  cfg["split"] = json{{"ratio", 0.8}, {"seed", 4}};
  return cfg;
}

}  // namespace

TEST_CASE("synth writes datasets, a manifest, and the truth model") {
  const fs::path data = workspace() / "data";
  for (const char* name : {"st.csv", "hp1.csv", "hp2.csv", "vp.csv",
                           "truth.json", "gen.json"})
    CHECK(fs::exists(data / name));
  CHECK_FALSE(fs::exists(data / "lt.csv"));  // tracker poses not requested

  const json gen = read_json(data / "gen.json");
  CHECK(gen.at("seed") == 2);
  CHECK(gen.at("poses").get<int>() > 0);
  CHECK(gen.at("datasets").contains("st"));
  CHECK(gen.at("datasets").at("st").at("records").get<int>() >
        gen.at("datasets").at("st").at("poses").get<int>());  // marker rows

  // The first dataset line is the documented header.
  std::istringstream st(read_file(data / "st.csv"));
  std::string header;
  std::getline(st, header);
  CHECK(header ==
        "pose_id,face,arm,camera,u,v,"
        "q_tt,q_s1,q_l1,q_u1,q_r1,q_b1,q_t1,q_s2,q_l2,q_u2,q_r2,q_b2,q_t2,"
        "tracker_x,tracker_y,tracker_z,u95");
}

TEST_CASE("calibrate recovers a perturbed start and writes the run files") {
  const fs::path dir = workspace();
  json cfg = base_config();
  cfg["perturbation"] = json{{"level", 2.0}, {"seed", 12}};
  cfg["output_dir"] = (dir / "run1").string();
  write_file(dir / "run1.json", cfg.dump(2));

  const int rc = run("calibrate --config " + (dir / "run1.json").string(),
                     (dir / "calibrate_stdout.json").string());
  REQUIRE(rc == 0);

  const json out = read_json(dir / "calibrate_stdout.json");
  CHECK(out.at("solve").at("final_cost").get<double>() < 1e-10);
  // Noiseless data: every correction returns to the truth.
  for (const auto& [label, value] : out.at("corrections").items()) {
    (void)label;
    CHECK(std::abs(value.get<double>()) < 1e-6);
  }
  CHECK(out.at("train").at("total_scaled_rmse").get<double>() < 1e-6);
  CHECK(out.at("test").at("total_scaled_rmse").get<double>() < 1e-6);

  for (const char* name :
       {"resolved_config.json", "result.json", "rmse.csv", "model.json"})
    CHECK(fs::exists(dir / "run1" / name));

  // result.json matches what the command printed.
  CHECK(read_json(dir / "run1" / "result.json") == out);
}

TEST_CASE("identical runs produce byte-identical output files") {
  const fs::path dir = workspace();
  REQUIRE(fs::exists(dir / "run1.json"));  // written by the calibrate case

  const fs::path first = dir / "first_pass";
  fs::create_directories(first);
  for (const char* name : {"result.json", "model.json", "rmse.csv",
                           "resolved_config.json"})
    fs::copy_file(dir / "run1" / name, first / name,
                  fs::copy_options::overwrite_existing);

  const int rc = run("calibrate --config " + (dir / "run1.json").string());
  REQUIRE(rc == 0);
  for (const char* name : {"result.json", "model.json", "rmse.csv",
                           "resolved_config.json"})
    CHECK(read_file(dir / "run1" / name) == read_file(first / name));
}

TEST_CASE("evaluate reports near-zero error for the truth model") {
  const fs::path dir = workspace();
  const fs::path data = dir / "data";
  const int rc = run("evaluate --model " + (data / "truth.json").string() +
                         " --data st=" + (data / "st.csv").string() +
                         " --data hp1=" + (data / "hp1.csv").string(),
                     (dir / "eval_stdout.json").string());
  REQUIRE(rc == 0);
  const json out = read_json(dir / "eval_stdout.json");
  const json& blocks = out.at("report").at("blocks");
  CHECK(blocks.at("self-contact").at("raw_rmse").get<double>() < 1e-10);
  CHECK(blocks.at("plane").at("raw_rmse").get<double>() < 1e-10);
  CHECK(blocks.at("reprojection").at("raw_rmse").get<double>() < 1e-8);
}

TEST_CASE("observability prints the index family for a config") {
  const fs::path dir = workspace();
  write_file(dir / "obs.json", base_config().dump(2));
  const int rc = run("observability --config " + (dir / "obs.json").string(),
                     (dir / "obs_stdout.json").string());
  REQUIRE(rc == 0);
  const json out = read_json(dir / "obs_stdout.json");
  CHECK(out.at("o1").get<double>() > 0.0);
  CHECK(out.at("o2").get<double>() > 0.0);
  CHECK(out.at("o2").get<double>() <= 1.0);
  CHECK(out.at("numerical_rank").get<int>() == out.at("m_params").get<int>());
  CHECK(out.at("unidentifiable").empty());
  CHECK(out.at("column_norms").size() ==
        static_cast<std::size_t>(out.at("m_params").get<int>()));
}

TEST_CASE("perturb-study reports per-parameter spread across trials") {
  const fs::path dir = workspace();
  json cfg = base_config();
  cfg["output_dir"] = (dir / "study").string();
  write_file(dir / "study.json", cfg.dump(2));
  const int rc = run("perturb-study --config " + (dir / "study.json").string() +
                         " --level 1 --trials 2 --seed 5",
                     (dir / "study_stdout.json").string());
  REQUIRE(rc == 0);
  const json out = read_json(dir / "study_stdout.json");
  CHECK(out.at("trials") == 2);
  CHECK(out.at("level") == 1.0);
  for (const auto& [label, st] : out.at("corrections").items()) {
    (void)label;
    CHECK(st.contains("mean"));
    CHECK(st.contains("sd"));
    // Noiseless data: trials agree on the truth, so the spread is tiny.
    CHECK(std::abs(st.at("mean").get<double>()) < 1e-6);
    CHECK(st.at("sd").get<double>() < 1e-6);
  }
  CHECK(fs::exists(dir / "study" / "perturb_study.csv"));
  std::istringstream csv(read_file(dir / "study" / "perturb_study.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "label,unit,mean,sd,n");
}

TEST_CASE("exit codes distinguish config, data, and numerical failures") {
  const fs::path dir = workspace();

  // 2: unusable configuration.
  CHECK(run("calibrate --config /nonexistent/nope.json") == 2);
  write_file(dir / "broken.json", "{ not json");
  CHECK(run("calibrate --config " + (dir / "broken.json").string()) == 2);
  json cfg = base_config();
  cfg["preset"] = "bogus";
  write_file(dir / "bad_preset.json", cfg.dump(2));
  CHECK(run("calibrate --config " + (dir / "bad_preset.json").string()) == 2);
  CHECK(run("no-such-command") == 2);

  // 3: malformed measurement data.
  write_file(dir / "bad.csv", "pose_id,oops\n1,2\n");
  json bad_data = base_config();
  bad_data["data"] = json{{"st", (dir / "bad.csv").string()}};
  write_file(dir / "bad_data.json", bad_data.dump(2));
  CHECK(run("calibrate --config " + (dir / "bad_data.json").string()) == 3);

  // 4: a numerically impossible problem (a plane group needs three poses).
  const std::string joints = ",0,0,0,0,0,0,0,0,0,0,0,0,0";
  std::string csv =
      "pose_id,face,arm,camera,u,v,"
      "q_tt,q_s1,q_l1,q_u1,q_r1,q_b1,q_t1,q_s2,q_l2,q_u2,q_r2,q_b2,q_t2,"
      "tracker_x,tracker_y,tracker_z,u95\n";
  csv += "1,nan,1,nan,nan,nan,0.1" + joints.substr(2) + ",nan,nan,nan,nan\n";
  csv += "2,nan,1,nan,nan,nan,0.2" + joints.substr(2) + ",nan,nan,nan,nan\n";
  write_file(dir / "two_poses.csv", csv);
  json thin = base_config();
  thin["data"] = json{{"hp1", (dir / "two_poses.csv").string()}};
  thin["blocks"] = json{{"planes", true}};
  thin["split"] = json{{"ratio", 1.0}, {"seed", 1}};
  write_file(dir / "thin.json", thin.dump(2));
  CHECK(run("calibrate --config " + (dir / "thin.json").string()) == 4);
}
