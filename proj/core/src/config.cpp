#include "resetkit/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "resetkit/error.hpp"

namespace resetkit {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text, int line) {
  const std::string v = trim(text);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a finite number, got '" + v + "'", line);
  }
  return x;
}

long long parse_integer(const std::string& key, const std::string& text, int line) {
  const std::string v = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'", line);
  }
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& text, int line) {
  std::string v = text;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  for (std::string tok; in >> tok;) out.push_back(parse_double(key, tok, line));
  if (out.empty()) throw ConfigError(key + ": expected at least one coefficient", line);
  return out;
}

std::string parse_choice(const std::string& key, const std::string& text,
                         std::initializer_list<const char*> choices, int line) {
  const std::string v = trim(text);
  for (const char* c : choices) {
    if (v == c) return v;
  }
  std::string allowed;
  for (const char* c : choices) allowed += (allowed.empty() ? "" : " | ") + std::string(c);
  throw ConfigError(key + ": expected one of " + allowed + ", got '" + v + "'", line);
}

}  // namespace

const std::vector<std::string>& ProjectConfig::known_keys() {
  static const std::vector<std::string> keys{
      "plant",           "plant.mass",          "plant.num",        "plant.den",
      "controller.element", "controller.order", "controller.gamma", "controller.theta",
      "controller.wr",   "controller.wc",       "controller.wt",    "controller.taming_poles",
      "controller.phase_reference", "controller.wi",   "controller.kp",       "controller.wra",   "controller.beta",
      "sim.ts",          "sim.duration",        "sim.r0",           "sim.f",
      "sim.noise",       "sim.seed",            "sim.reset_timing", "output.csv",
      "output.json"};
  return keys;
}

void ProjectConfig::set(const std::string& raw_key, const std::string& value, int line) {
  const std::string key = trim(raw_key);
  const std::string v = trim(value);
  if (key == "plant") {
    plant.preset = parse_choice(key, v, {"mass", "stage", "tf"}, line);
  } else if (key == "plant.mass") {
    plant.mass = parse_double(key, v, line);
  } else if (key == "plant.num") {
    plant.num = parse_list(key, v, line);
  } else if (key == "plant.den") {
    plant.den = parse_list(key, v, line);
  } else if (key == "controller.element") {
    controller.element = parse_choice(key, v, {"cglp", "gfore", "gsore", "clegg"}, line);
  } else if (key == "controller.order") {
    controller.order = static_cast<int>(parse_integer(key, v, line));
  } else if (key == "controller.gamma") {
    controller.gamma = parse_double(key, v, line);
  } else if (key == "controller.theta") {
    controller.theta = parse_double(key, v, line);
  } else if (key == "controller.wr") {
    controller.wr = parse_double(key, v, line);
  } else if (key == "controller.wc") {
    controller.wc = parse_double(key, v, line);
  } else if (key == "controller.wt") {
    controller.wt = parse_double(key, v, line);
  } else if (key == "controller.taming_poles") {
    controller.taming_poles = static_cast<int>(parse_integer(key, v, line));
  } else if (key == "controller.phase_reference") {
    controller.phase_reference = parse_choice(key, v, {"tamed", "untamed"}, line) == "tamed"
                                     ? PhaseReference::tamed
                                     : PhaseReference::untamed;
  } else if (key == "controller.wi") {
    controller.wi = parse_double(key, v, line);
  } else if (key == "controller.kp") {
    controller.kp = parse_double(key, v, line);
  } else if (key == "controller.wra") {
    controller.wra = parse_double(key, v, line);
  } else if (key == "controller.beta") {
    controller.beta = parse_double(key, v, line);
  } else if (key == "sim.ts") {
    sim.ts = parse_double(key, v, line);
  } else if (key == "sim.duration") {
    sim.duration = parse_double(key, v, line);
  } else if (key == "sim.r0") {
    sim.r0 = parse_double(key, v, line);
  } else if (key == "sim.f") {
    sim.f_hz = parse_double(key, v, line);
  } else if (key == "sim.noise") {
    sim.noise = parse_double(key, v, line);
  } else if (key == "sim.seed") {
    const long long seed = parse_integer(key, v, line);
    if (seed < 0) throw ConfigError(key + ": seed must be >= 0", line);
    sim.seed = static_cast<std::uint64_t>(seed);
  } else if (key == "sim.reset_timing") {
    sim.reset_timing = parse_choice(key, v, {"sample", "interpolated"}, line) == "sample"
                           ? ResetTiming::sample
                           : ResetTiming::interpolated;
  } else if (key == "output.csv") {
    output.csv = v;
  } else if (key == "output.json") {
    output.json = v;
  } else {
    throw ConfigError("unknown key '" + key + "'", line);
  }
  lines_[key] = line;
}

int ProjectConfig::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void ProjectConfig::validate() const {
  auto fail = [&](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what, line_of(key));
  };
  auto positive = [&](const std::string& key, std::optional<double> v) {
    if (v && !(*v > 0.0)) fail(key, "must be positive");
  };
  if (!(plant.mass > 0.0)) fail("plant.mass", "must be positive");
  if (plant.preset == "tf" && (plant.num.empty() || plant.den.empty())) {
    fail("plant", "plant = tf needs plant.num and plant.den");
  }
  if (controller.order != 1 && controller.order != 2) fail("controller.order", "must be 1 or 2");
  if (controller.gamma < kGammaMin || controller.gamma > kGammaMax) {
    if (controller.element == "cglp") fail("controller.gamma", "must lie in [-0.9, 1]");
  }
  if (controller.theta && !(*controller.theta > 0.0 && *controller.theta < 180.0)) {
    fail("controller.theta", "must lie in (0, 180) degrees");
  }
  positive("controller.wr", controller.wr);
  positive("controller.wc", controller.wc);
  positive("controller.wt", controller.wt);
  positive("controller.wi", controller.wi);
  positive("controller.wra", controller.wra);
  positive("controller.beta", controller.beta);
  if (controller.kp && !(*controller.kp != 0.0)) fail("controller.kp", "must be nonzero");
  if (controller.taming_poles < 0 || controller.taming_poles > 2) {
    fail("controller.taming_poles", "must be 0, 1 or 2");
  }
  positive("sim.ts", sim.ts);
  positive("sim.duration", sim.duration);
  positive("sim.r0", sim.r0);
  positive("sim.f", sim.f_hz);
  if (sim.noise < 0.0) fail("sim.noise", "must be >= 0");
}

ProjectConfig parse_config(std::istream& in) {
  ProjectConfig cfg;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    if (trim(text).empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    if (cfg.line_of(key) > 0) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(cfg.line_of(key)) + ")",
                        line);
    }
    cfg.set(key, text.substr(eq + 1), line);
  }
  cfg.validate();
  return cfg;
}

ProjectConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

TransferFunction build_plant(const ProjectConfig& cfg) {
  if (cfg.plant.preset == "mass") return mass_plant(cfg.plant.mass);
  if (cfg.plant.preset == "stage") return stage_plant();
  try {
    return TransferFunction(cfg.plant.num, cfg.plant.den);
  } catch (const ModelError& ex) {
    throw ConfigError(std::string("plant.num/plant.den: ") + ex.what(), cfg.line_of("plant.den"));
  }
}

CgLpConfig build_cglp_config(const ProjectConfig& cfg) {
  const ControllerSpec& c = cfg.controller;
  const std::optional<double> wt = c.wt ? c.wt : (c.wc ? std::optional<double>(5.0 * *c.wc) : std::nullopt);
  if (c.wr) {
    if (!wt) throw ConfigError("controller.wt or controller.wc is required", cfg.line_of("controller.wr"));
    CgLpConfig out;
    out.order = c.order;
    out.gamma = c.gamma;
    out.omega_r = *c.wr;
    out.omega_t = *wt;
    out.beta_r_alpha = c.beta;
    out.taming_poles = c.taming_poles;
    out.validate();
    return out;
  }
  if (!c.theta) throw ConfigError("set controller.theta (with controller.wc) or controller.wr");
  if (!c.wc) throw ConfigError("controller.theta needs controller.wc", cfg.line_of("controller.theta"));
  return design_cglp(c.order, c.gamma, *c.theta, *c.wc, *wt, c.taming_poles, c.phase_reference);
}

Complex ConfiguredElement::harmonic(double omega, int n) const {
  Complex g = n == 1 ? describing_function(reset, omega) : hosidf(reset, omega, n);
  if (lead) g *= freq_response(*lead, omega * n);
  return g;
}

ConfiguredElement build_element(const ProjectConfig& cfg) {
  const ControllerSpec& c = cfg.controller;
  if (c.element == "gfore") return {make_gfore(c.wra, c.gamma), std::nullopt};
  if (c.element == "gsore") return {make_gsore(c.wra, c.beta, c.gamma), std::nullopt};
  if (c.element == "clegg") return {make_clegg_integrator(), std::nullopt};
  CgLpRealization r = build_cglp(build_cglp_config(cfg));
  return {std::move(r.reset_part), std::move(r.lead_part)};
}

LoopSpec build_loop(const ProjectConfig& cfg) {
  LoopSpec loop;
  loop.plant = tf_to_ss(build_plant(cfg));
  loop.chain = cglp_chain(build_cglp_config(cfg), cfg.controller.wi);
  loop.ts = cfg.sim.ts;
  loop.reset_timing = cfg.sim.reset_timing;
  loop.noise = {cfg.sim.noise, cfg.sim.seed};
  if (cfg.controller.kp) {
    loop.k_p = *cfg.controller.kp;
  } else if (cfg.controller.wc) {
    loop.k_p = tune_kp(loop, *cfg.controller.wc);
  } else {
    throw ConfigError("set controller.kp or controller.wc to tune it");
  }
  return loop;
}

}  // namespace resetkit
