#pragma once

// Project configuration: flat `key = value` text, one entry per line, `#`
// starts a comment. Unknown keys and malformed values are rejected with the
// offending line number. Angular frequencies (w*) are rad/s, f is Hz.
//
//   plant                   mass | stage | tf
//   plant.mass              kg (mass preset), default 1
//   plant.num, plant.den    coefficients, descending powers (plant = tf)
//   controller.element      cglp | gfore | gsore | clegg (df/hosidf target)
//   controller.order        1 | 2
//   controller.gamma        reset value
//   controller.theta        phase lead target at wc, deg
//   controller.wr           explicit lead start frequency (instead of theta)
//   controller.wc           crossover frequency
//   controller.wt           taming frequency, default 5 wc
//   controller.taming_poles 0 (= order) | 1 | 2
//   controller.phase_reference tamed | untamed (what theta is measured on)
//   controller.wi           PI corner; omitted = no PI
//   controller.kp           loop gain; omitted = tuned for crossover at wc
//   controller.wra          GFORE/GSORE corner (element = gfore | gsore)
//   controller.beta         GSORE damping
//   sim.ts                  sampling time, s
//   sim.duration            s; omitted = mode default
//   sim.r0                  reference amplitude
//   sim.f                   reference frequency for track mode, Hz
//   sim.noise               noise amplitude (uniform, feedback path)
//   sim.seed                noise seed
//   sim.reset_timing        sample | interpolated
//   output.csv, output.json output paths

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resetkit/cglp.hpp"
#include "resetkit/lti.hpp"
#include "resetkit/reset_freq.hpp"
#include "resetkit/sim.hpp"

namespace resetkit {

struct PlantSpec {
  std::string preset = "mass";
  double mass = 1.0;
  std::vector<double> num;
  std::vector<double> den;
};

struct ControllerSpec {
  std::string element = "cglp";
  int order = 1;
  double gamma = 0.0;
  std::optional<double> theta;
  std::optional<double> wr;
  std::optional<double> wc;
  std::optional<double> wt;
  int taming_poles = 0;
  PhaseReference phase_reference = PhaseReference::tamed;
  std::optional<double> wi;
  std::optional<double> kp;
  double wra = 1.0;
  double beta = 1.0;
};

struct SimSpec {
  double ts = 1e-4;
  std::optional<double> duration;
  double r0 = 1.0;
  double f_hz = 5.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  ResetTiming reset_timing = ResetTiming::sample;
};

struct OutputSpec {
  std::string csv;
  std::string json;
};

class ProjectConfig {
 public:
  PlantSpec plant;
  ControllerSpec controller;
  SimSpec sim;
  OutputSpec output;

  /// Sets one key. Throws ConfigError (carrying `line` when > 0) for an
  /// unknown key or a value that does not parse.
  void set(const std::string& key, const std::string& value, int line = 0);

  /// Cross-field checks. Throws ConfigError naming the line of the
  /// offending key when it came from a file.
  void validate() const;

  /// Line a key was read from, 0 when it was not read from a file.
  int line_of(const std::string& key) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, int> lines_;
};

/// Parses the whole stream; every error names its line.
ProjectConfig parse_config(std::istream& in);

/// Reads and parses a file. Throws ConfigError when it cannot be opened.
ProjectConfig load_config(const std::string& path);

TransferFunction build_plant(const ProjectConfig& cfg);

/// CgLp configuration; omega_r from controller.wr, or solved from
/// controller.theta at controller.wc (InfeasibleDesign when impossible).
CgLpConfig build_cglp_config(const ProjectConfig& cfg);

/// Element selected by controller.element: a bare reset element, or a CgLp
/// (its reset part plus the lead filter).
struct ConfiguredElement {
  ResetSystem reset;
  std::optional<TransferFunction> lead;

  /// n = 1: describing function; n >= 2: n-th harmonic gain. The lead
  /// filter multiplies harmonic n at n omega.
  Complex harmonic(double omega, int n) const;
};

ConfiguredElement build_element(const ProjectConfig& cfg);

/// Closed loop of the configured CgLp (plus optional PI) around the plant,
/// k_p from controller.kp or tuned at controller.wc.
LoopSpec build_loop(const ProjectConfig& cfg);

}  // namespace resetkit
