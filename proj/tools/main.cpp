#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "resetkit/error.hpp"

namespace {

using namespace resetkit;
using namespace resetkit::cli;

// Flag -> config key. Values go through ProjectConfig::set so flags and
// config files share one validator.
const std::pair<const char*, const char*> kConfigFlags[] = {
    {"--plant", "plant"},
    {"--mass", "plant.mass"},
    {"--element", "controller.element"},
    {"--order", "controller.order"},
    {"--gamma", "controller.gamma"},
    {"--theta", "controller.theta"},
    {"--wr", "controller.wr"},
    {"--wc", "controller.wc"},
    {"--wt", "controller.wt"},
    {"--taming-poles", "controller.taming_poles"},
    {"--phase-reference", "controller.phase_reference"},
    {"--wi", "controller.wi"},
    {"--kp", "controller.kp"},
    {"--wra", "controller.wra"},
    {"--beta", "controller.beta"},
    {"--ts", "sim.ts"},
    {"--duration", "sim.duration"},
    {"--r0", "sim.r0"},
    {"--f", "sim.f"},
    {"--noise", "sim.noise"},
    {"--seed", "sim.seed"},
    {"--reset-timing", "sim.reset_timing"},
};

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string out;
  std::string json;
  unsigned threads = 0;
};

struct SweepArgs {
  double fmin;
  double fmax;
  std::size_t points;
  std::string freqs;
  CLI::Option* freqs_option = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "key = value configuration file");
  for (const auto& [flag, key] : kConfigFlags) {
    args.options[key] = sub->add_option(flag, args.values[key], std::string("sets ") + key);
  }
  sub->add_option("--out", args.out, "primary output file (default: stdout)");
  sub->add_option("--json", args.json, "JSON output file");
  sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

void add_sweep(CLI::App* sub, SweepArgs& args) {
  sub->add_option("--fmin", args.fmin, "lowest frequency, Hz")->capture_default_str();
  sub->add_option("--fmax", args.fmax, "highest frequency, Hz")->capture_default_str();
  sub->add_option("--points", args.points, "log-spaced points")->capture_default_str();
  args.freqs_option =
      sub->add_option("--freqs", args.freqs, "explicit comma-separated frequencies, Hz");
}

ProjectConfig load(const CommonArgs& args) {
  ProjectConfig cfg = args.config_path.empty() ? ProjectConfig{} : load_config(args.config_path);
  for (const auto& [key, option] : args.options) {
    if (option->count() > 0) cfg.set(key, args.values.at(key));
  }
  cfg.validate();
  return cfg;
}

SweepOptions sweep_options(const SweepArgs& args) {
  SweepOptions s;
  s.f_min = args.fmin;
  s.f_max = args.fmax;
  s.points = args.points;
  if (args.freqs_option->count() > 0) {
    std::vector<double> list;
    std::string text = args.freqs;
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream in(text);
    for (std::string tok; in >> tok;) {
      try {
        std::size_t used = 0;
        list.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("--freqs: not a number: '" + tok + "'");
      }
    }
    s.list_hz = std::move(list);
  }
  return s;
}

// Writes to --out when given, stdout otherwise.
int with_primary_output(const std::string& path, const std::function<int(std::ostream&)>& body) {
  if (path.empty()) return body(std::cout);
  std::ostringstream buffer;
  const int code = body(buffer);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write output file '" + path + "'");
  file << buffer.str();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resetkit: describing-function analysis, CgLp tuning and closed-loop simulation of reset controllers"};
  app.require_subcommand(1);

  CommonArgs df_args, hosidf_args, design_args, tune_args, sim_args, sens_args;
  SweepArgs df_sweep{0.1, 1000.0, 200, {}}, hosidf_sweep{0.1, 1000.0, 200, {}},
      sens_sweep{1.0, 40.0, 20, {}};
  std::string harmonic_list = "1,3,5";
  std::string objective = "both";
  bool verify = false;
  std::string mode = "track";

  auto* df = app.add_subcommand("df", "first-harmonic describing function sweep (CSV)");
  add_common(df, df_args);
  add_sweep(df, df_sweep);

  auto* hosidf = app.add_subcommand("hosidf", "higher-order harmonic sweep (CSV)");
  add_common(hosidf, hosidf_args);
  add_sweep(hosidf, hosidf_sweep);
  hosidf->add_option("--n", harmonic_list, "comma-separated harmonic orders")->capture_default_str();

  auto* design = app.add_subcommand("design", "design one CgLp for a phase target (JSON)");
  add_common(design, design_args);

  auto* tune_cmd = app.add_subcommand("tune", "enumerate and rank CgLp candidates over gamma");
  add_common(tune_cmd, tune_args);
  tune_cmd->add_option("--objective", objective, "tracking | noise | both")->capture_default_str();
  tune_cmd->add_flag("--verify", verify, "rank feasible candidates by simulated S_inf");

  auto* sim = app.add_subcommand("sim", "closed-loop simulation (metrics JSON, series CSV)");
  add_common(sim, sim_args);
  sim->add_option("--mode", mode, "track | noise | trajectory")->capture_default_str();

  auto* sens = app.add_subcommand("sensitivity", "pseudo-sensitivity sweep (CSV)");
  add_common(sens, sens_args);
  add_sweep(sens, sens_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  return run_guarded(
      [&]() -> int {
        if (df->parsed()) {
          const ProjectConfig cfg = load(df_args);
          return with_primary_output(df_args.out, [&](std::ostream& out) {
            return cmd_df(cfg, sweep_options(df_sweep), out);
          });
        }
        if (hosidf->parsed()) {
          const ProjectConfig cfg = load(hosidf_args);
          std::vector<int> orders;
          std::string text = harmonic_list;
          std::replace(text.begin(), text.end(), ',', ' ');
          std::istringstream in(text);
          for (std::string tok; in >> tok;) {
            try {
              orders.push_back(std::stoi(tok));
            } catch (const std::exception&) {
              throw ConfigError("--n: not an integer: '" + tok + "'");
            }
          }
          return with_primary_output(hosidf_args.out, [&](std::ostream& out) {
            return cmd_hosidf(cfg, sweep_options(hosidf_sweep), orders, out);
          });
        }
        if (design->parsed()) {
          const ProjectConfig cfg = load(design_args);
          return with_primary_output(design_args.out,
                                     [&](std::ostream& out) { return cmd_design(cfg, out); });
        }
        if (tune_cmd->parsed()) {
          ProjectConfig cfg = load(tune_args);
          if (!tune_args.out.empty()) cfg.output.json = tune_args.out;
          if (!tune_args.json.empty()) cfg.output.json = tune_args.json;
          TuneOptions options;
          options.objective = objective;
          options.verify = verify;
          options.threads = tune_args.threads;
          return cmd_tune(cfg, options, std::cout);
        }
        if (sim->parsed()) {
          ProjectConfig cfg = load(sim_args);
          if (!sim_args.out.empty()) cfg.output.csv = sim_args.out;
          if (!sim_args.json.empty()) cfg.output.json = sim_args.json;
          SimMode m = SimMode::track;
          if (mode == "noise") {
            m = SimMode::noise;
          } else if (mode == "trajectory") {
            m = SimMode::trajectory;
          } else if (mode != "track") {
            throw ConfigError("--mode must be track, noise or trajectory");
          }
          return cmd_sim(cfg, m, std::cout);
        }
        const ProjectConfig cfg = load(sens_args);
        return with_primary_output(sens_args.out, [&](std::ostream& out) {
          return cmd_sensitivity(cfg, sweep_options(sens_sweep), out, sens_args.threads);
        });
      },
      std::cerr);
}
