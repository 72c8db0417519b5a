#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "resetkit/error.hpp"

namespace resetkit::cli {
namespace {

namespace fs = std::filesystem;

struct ToolRun {
  int code;
  std::string out;
};

ToolRun run_tool(const std::string& args) {
  const std::string cmd = std::string(RESETKIT_TOOL_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ProjectConfig config_of(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("resetkit_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Df, CleggPhaseColumn) {
  SweepOptions sweep;
  sweep.f_min = 0.01;
  sweep.f_max = 100.0;
  sweep.points = 25;
  std::ostringstream out;
  ASSERT_EQ(cmd_df(config_of("controller.element = clegg\n"), sweep, out), kOk);
  const auto rows = csv_rows(out.str());
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "f_hz,omega,mag_db,phase_deg");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][3]), -38.15, 0.01);
}

TEST(Df, LinearGforeIsBaseBode) {
  SweepOptions sweep;
  sweep.points = 10;
  std::ostringstream out;
  cmd_df(config_of("controller.element = gfore\ncontroller.wra = 50\ncontroller.gamma = 1\n"), sweep,
         out);
  const auto rows = csv_rows(out.str());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double w = std::stod(rows[i][1]);
    const Complex base = 1.0 / (Complex(0.0, w / 50.0) + 1.0);
    EXPECT_NEAR(std::stod(rows[i][2]), to_db(std::abs(base)), 1e-9);
    EXPECT_NEAR(std::stod(rows[i][3]), phase_deg(base), 1e-9);
  }
}

TEST(Hosidf, EvenZeroAndThirdPeak) {
  SweepOptions sweep;
  sweep.f_min = 0.01;
  sweep.f_max = 10.0;
  sweep.points = 400;
  std::ostringstream out;
  cmd_hosidf(config_of("controller.element = gfore\ncontroller.wra = 1\n"), sweep, {2, 3}, out);
  const auto rows = csv_rows(out.str());
  double peak = -1e9;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][2] == "2") {
      EXPECT_EQ(std::stod(rows[i][5]), 0.0);
    } else {
      peak = std::max(peak, std::stod(rows[i][6]));
    }
  }
  EXPECT_NEAR(peak, -19.32, 0.1);
}

TEST(Hosidf, LinearHasNoThird) {
  SweepOptions sweep;
  sweep.points = 20;
  std::ostringstream out;
  cmd_hosidf(config_of("controller.element = gfore\ncontroller.gamma = 1\n"), sweep, {3}, out);
  const auto rows = csv_rows(out.str());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][5]), 0.0);
}

TEST(Design, Json) {
  std::ostringstream out;
  cmd_design(config_of("controller.gamma = -0.4\ncontroller.theta = 30\ncontroller.wc = 628.3185307179586\n"),
             out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_NEAR(j["phase_at_wc_deg"].get<double>(), 30.0, 0.05);
  EXPECT_NEAR(j["M_p_db"].get<double>(), -16.02, 0.01);
  EXPECT_NEAR(j["b"].get<double>(), 1.8033, 1e-3);
}

TEST(Tune, TrackingAndNoise) {
  ProjectConfig cfg = config_of("controller.theta = 30\ncontroller.wc = 628.3\n");
  const fs::path json_path = temp_dir() / "tune.json";
  cfg.output.json = json_path.string();
  std::ostringstream out;
  ASSERT_EQ(cmd_tune(cfg, {}, out), kOk);
  EXPECT_NE(out.str().find("recommended (tracking): gamma = -0.4"), std::string::npos);
  EXPECT_NE(out.str().find("recommended (noise): gamma = 0.1"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(json_path));
  EXPECT_EQ(j["candidates"].size(), 19u);
}

TEST(Tune, InfeasibleThrows) {
  std::ostringstream out;
  EXPECT_THROW(cmd_tune(config_of("controller.theta = 85\ncontroller.wc = 628.3\n"), {}, out),
               InfeasibleDesign);
}

TEST(Sim, TrackLinearMatchesAnalytic) {
  const ProjectConfig cfg = config_of(
      "plant = tf\nplant.num = 1\nplant.den = 1, 100, 0\ncontroller.gamma = 1\n"
      "controller.wr = 300\ncontroller.wc = 100\nsim.f = 5\n");
  std::ostringstream out;
  ASSERT_EQ(cmd_sim(cfg, SimMode::track, out), kOk);
  const auto j = nlohmann::json::parse(out.str());
  const LoopSpec loop = build_loop(cfg);
  const double w = 2.0 * std::acos(-1.0) * 5.0;
  const double s = std::abs(linear_sensitivity(freq_response(loop.plant, w),
                                               loop.k_p * chain_response(loop.chain, w)));
  EXPECT_NEAR(j["max_e_over_r0"].get<double>() / s, 1.0, 0.02);
}

TEST(Sim, NoiseZeroAmplitude) {
  std::ostringstream out;
  cmd_sim(config_of("controller.theta = 30\ncontroller.wc = 628.3\nsim.duration = 0.2\n"),
          SimMode::noise, out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["max_e"].get<double>(), 0.0);
  EXPECT_EQ(j["rms_e"].get<double>(), 0.0);
}

TEST(Sim, TrajectoryEmitsMetrics) {
  std::ostringstream out;
  cmd_sim(config_of("controller.gamma = -0.4\ncontroller.theta = 30\ncontroller.wc = 628.3\n"
                    "controller.wi = 62.83\nsim.duration = 2\n"),
          SimMode::trajectory, out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_GT(j["max_e"].get<double>(), 0.0);
  EXPECT_GT(j["rms_e"].get<double>(), 0.0);
  EXPECT_LE(j["rms_e"].get<double>(), j["max_e"].get<double>());
}

TEST(Sensitivity, EmptyListIsHeaderOnly) {
  SweepOptions sweep;
  sweep.list_hz = std::vector<double>{};
  std::ostringstream out;
  EXPECT_EQ(cmd_sensitivity(config_of("controller.theta = 30\ncontroller.wc = 628.3\n"), sweep, out),
            kOk);
  EXPECT_EQ(out.str(), "f_hz,omega,s_inf,s_inf_db,status\n");
}

TEST(Sensitivity, UnstablePointExitsFour) {
  SweepOptions sweep;
  sweep.list_hz = std::vector<double>{5.0};
  std::ostringstream out;
  // gamma = 1 CgLp on a mass: unstable closed loop.
  EXPECT_EQ(cmd_sensitivity(config_of("controller.gamma = 1\ncontroller.wr = 300\ncontroller.wc = 600\n"),
                            sweep, out),
            kInstability);
  EXPECT_NE(out.str().find("unstable"), std::string::npos);
}

TEST(Guard, MapsErrorsToCodes) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([]() -> int { throw ConfigError("x"); }, err), kConfigError);
  EXPECT_EQ(run_guarded([]() -> int { throw ModelError("x"); }, err), kConfigError);
  EXPECT_EQ(run_guarded([]() -> int { throw InfeasibleDesign("x"); }, err), kInfeasible);
  EXPECT_EQ(run_guarded([]() -> int { throw InstabilityError("x", 1.0); }, err), kInstability);
  EXPECT_EQ(run_guarded([]() -> int { throw ConvergenceError("x"); }, err), kFailure);
  EXPECT_EQ(run_guarded([] { return kOk; }, err), kOk);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_tool("df --element clegg --points 3").code, 0);
  EXPECT_EQ(run_tool("df --element nonsense").code, 2);
  EXPECT_EQ(run_tool("df --no-such-flag").code, 2);
  EXPECT_EQ(run_tool("tune --theta 85 --wc 628.3").code, 3);
  EXPECT_EQ(run_tool("sensitivity --gamma 1 --wr 300 --wc 600 --freqs 5").code, 4);
  const fs::path cfg = temp_dir() / "bad.cfg";
  std::ofstream(cfg) << "plant = mass\ncontroller.nope = 2\n";
  EXPECT_EQ(run_tool("design --config " + cfg.string()).code, 2);
}

TEST(Binary, TuneNoiseObjective) {
  const ToolRun r = run_tool("tune --order 1 --theta 30 --wc 628.3 --objective noise");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("recommended (noise): gamma = 0.1"), std::string::npos);
  EXPECT_EQ(r.out.find("recommended (tracking)"), std::string::npos);
}

TEST(Binary, SimIsByteIdentical) {
  const fs::path dir = temp_dir();
  const std::string args = "sim --mode noise --theta 30 --wc 628.3 --wi 62.83 --plant stage "
                           "--noise 5e-6 --seed 11 --duration 0.3 ";
  const ToolRun a = run_tool(args + "--out " + (dir / "a.csv").string());
  const ToolRun b = run_tool(args + "--out " + (dir / "b.csv").string());
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const std::string ca = slurp(dir / "a.csv");
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, slurp(dir / "b.csv"));
  EXPECT_EQ(ca.substr(0, ca.find('\n')), "t,r,e,u,y,n");
}

TEST(Binary, EmptySensitivityList) {
  const ToolRun r = run_tool("sensitivity --theta 30 --wc 628.3 --freqs ''");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "f_hz,omega,s_inf,s_inf_db,status\n");
}

}  // namespace
}  // namespace resetkit::cli
