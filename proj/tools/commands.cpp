#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "resetkit/error.hpp"
#include "resetkit/tuner.hpp"

namespace resetkit::cli {
namespace {

using std::numbers::pi;
using json = nlohmann::ordered_json;

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write output file '" + path + "'");
  return file;
}

double hz_to_rad(double f) { return 2.0 * pi * f; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<double> SweepOptions::frequencies_hz() const {
  if (list_hz) return *list_hz;
  if (points == 0) return {};
  if (!(f_min > 0.0) || !(f_max >= f_min)) {
    throw ConfigError("frequency band needs 0 < fmin <= fmax");
  }
  if (points == 1) return {f_min};
  return logspace(f_min, f_max, points);
}

int cmd_df(const ProjectConfig& cfg, const SweepOptions& sweep, std::ostream& out) {
  const ConfiguredElement element = build_element(cfg);
  const std::vector<double> freqs = sweep.frequencies_hz();
  out << "f_hz,omega,mag_db,phase_deg\n";
  for (double f : freqs) {
    const double w = hz_to_rad(f);
    const Complex g = element.harmonic(w, 1);
    out << format_number(f) << ',' << format_number(w) << ',' << format_number(to_db(std::abs(g)))
        << ',' << format_number(phase_deg(g)) << '\n';
  }
  return kOk;
}

int cmd_hosidf(const ProjectConfig& cfg, const SweepOptions& sweep, const std::vector<int>& orders,
               std::ostream& out) {
  for (int n : orders) {
    if (n < 1) throw ConfigError("harmonic orders must be >= 1");
  }
  const ConfiguredElement element = build_element(cfg);
  const std::vector<double> freqs = sweep.frequencies_hz();
  out << "f_hz,omega,n,re,im,abs,mag_db,phase_deg\n";
  for (double f : freqs) {
    const double w = hz_to_rad(f);
    for (int n : orders) {
      const Complex g = element.harmonic(w, n);
      out << format_number(f) << ',' << format_number(w) << ',' << n << ','
          << format_number(g.real()) << ',' << format_number(g.imag()) << ','
          << format_number(std::abs(g)) << ',' << format_number(to_db(std::abs(g))) << ','
          << format_number(std::abs(g) > 0.0 ? phase_deg(g) : 0.0) << '\n';
    }
  }
  return kOk;
}

int cmd_design(const ProjectConfig& cfg, std::ostream& out) {
  const CgLpConfig c = build_cglp_config(cfg);
  const CorrectionFactors f = resolved_correction(c);
  const CgLpRealization r = build_cglp(c);
  const HarmonicPeak peak = harmonic_peak(r.reset_part);
  json j;
  j["order"] = c.order;
  j["gamma"] = c.gamma;
  j["theta_deg"] = cfg.controller.theta ? json(*cfg.controller.theta) : json(nullptr);
  j["omega_c"] = cfg.controller.wc ? json(*cfg.controller.wc) : json(nullptr);
  j["omega_r"] = c.omega_r;
  j["omega_t"] = c.omega_t;
  j["b"] = cfg.controller.wc ? json(*cfg.controller.wc / c.omega_r) : json(nullptr);
  j["omega_ra"] = omega_r_alpha(c);
  j["alpha1"] = f.alpha1;
  j["alpha2"] = f.alpha2;
  j["beta_r"] = c.order == 2 ? json(beta_r(c)) : json(nullptr);
  j["taming_poles"] = c.taming_poles == 0 ? c.order : c.taming_poles;
  j["phase_reference"] =
      cfg.controller.phase_reference == PhaseReference::tamed ? "tamed" : "untamed";
  if (cfg.controller.wc) {
    const Complex g = cglp_df(c, *cfg.controller.wc);
    j["phase_at_wc_deg"] = phase_deg(g);
    j["gain_at_wc_db"] = to_db(std::abs(g));
  }
  j["omega_p"] = peak.omega_p;
  j["M_p_db"] = peak.magnitude_db;
  if (cfg.controller.wc) j["ratio"] = *cfg.controller.wc / peak.omega_p;
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_tune(const ProjectConfig& cfg, const TuneOptions& options, std::ostream& out) {
  if (options.objective != "tracking" && options.objective != "noise" &&
      options.objective != "both") {
    throw ConfigError("--objective must be tracking, noise or both");
  }
  const ControllerSpec& c = cfg.controller;
  if (!c.theta) throw ConfigError("tune needs controller.theta (--theta)");
  if (!c.wc) throw ConfigError("tune needs controller.wc (--wc)");
  const TuningReport report =
      tune(c.order, *c.theta, *c.wc, c.wt, c.taming_poles, options.threads, c.phase_reference);
  out << report_table(report);
  if (!cfg.output.json.empty()) {
    auto file = open_output(cfg.output.json);
    file << report_json(report);
  }
  if (!report.tracking) {
    throw InfeasibleDesign("no feasible candidate for theta = " + format_number(*c.theta) +
                           " deg with order " + std::to_string(c.order) + " CgLp");
  }
  for (const char* objective : {"tracking", "noise"}) {
    if (options.objective != "both" && options.objective != objective) continue;
    const auto& cand =
        report.candidates[std::string(objective) == "tracking" ? *report.tracking : *report.noise];
    out << "recommended (" << objective << "): gamma = " << fixed(cand.gamma(), 1)
        << ", b = " << fixed(cand.b, 3) << ", wc/wp = " << fixed(cand.ratio, 3)
        << ", M_p = " << fixed(cand.m_p_db, 2) << " dB\n";
  }
  if (options.verify) {
    SimulationSettings settings;
    settings.omega_i = c.wi;
    settings.ts = cfg.sim.ts;
    settings.reset_timing = cfg.sim.reset_timing;
    settings.threads = options.threads;
    const VerificationReport v = verify_by_simulation(report, build_plant(cfg), settings);
    out << "simulated mean S_inf over 1-40 Hz (dB):\n";
    for (const auto& row : v.rows) {
      out << "  gamma = " << fixed(row.gamma, 1) << ": ";
      if (row.mean_s_db) {
        out << fixed(*row.mean_s_db, 3) << " (rank "
            << row.sim_rank << ")\n";
      } else {
        out << "excluded, " << row.excluded_reason << '\n';
      }
    }
    out << "simulation " << (v.agree ? "agrees" : "disagrees") << " with the omega_p rule\n";
  }
  return kOk;
}

int cmd_sim(const ProjectConfig& cfg, SimMode mode, std::ostream& out) {
  LoopSpec loop = build_loop(cfg);
  double duration = 1.0;
  const char* mode_name = "noise";
  switch (mode) {
    case SimMode::track:
      mode_name = "track";
      loop.reference = multisine_reference({{cfg.sim.r0, cfg.sim.f_hz, 0.0}});
      duration = std::max(20.0 / cfg.sim.f_hz, 0.5);
      break;
    case SimMode::noise:
      loop.reference = Multisine();
      break;
    case SimMode::trajectory: {
      mode_name = "trajectory";
      std::vector<SineComponent> parts = default_multisine().components();
      for (auto& p : parts) p.amplitude *= cfg.sim.r0;
      loop.reference = multisine_reference(std::move(parts));
      duration = std::max(20.0 * loop.reference.period().value_or(1.0), 0.5);
      break;
    }
  }
  duration = cfg.sim.duration.value_or(duration);
  const SimResult result = simulate(loop, duration, cfg.sim.seed);
  const NoiseMetrics m = error_metrics(result);

  if (!cfg.output.csv.empty()) {
    auto file = open_output(cfg.output.csv);
    write_csv(file, result);
  }
  json j;
  j["mode"] = mode_name;
  j["duration"] = duration;
  j["ts"] = loop.ts;
  j["k_p"] = loop.k_p;
  j["seed"] = cfg.sim.seed;
  j["max_e"] = m.max_error;
  j["rms_e"] = m.rms_error;
  j["t_ss"] = m.t_ss;
  j["steady"] = result.steady;
  if (mode == SimMode::track) j["max_e_over_r0"] = m.max_error / cfg.sim.r0;
  j["resets"] = result.resets.size();
  j["warnings"] = result.warnings;
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!cfg.output.json.empty()) {
    auto file = open_output(cfg.output.json);
    file << text;
  }
  return kOk;
}

int cmd_sensitivity(const ProjectConfig& cfg, const SweepOptions& sweep, std::ostream& out,
                    unsigned threads) {
  const std::vector<double> freqs = sweep.frequencies_hz();
  out << "f_hz,omega,s_inf,s_inf_db,status\n";
  if (freqs.empty()) return kOk;
  const LoopSpec loop = build_loop(cfg);
  std::vector<double> omegas;
  for (double f : freqs) omegas.push_back(hz_to_rad(f));
  const std::vector<SweepOutcome> points = sensitivity_sweep(loop, omegas, cfg.sim.r0, threads);
  bool unstable = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out << format_number(freqs[i]) << ',' << format_number(p.omega) << ',';
    if (p.point) {
      out << format_number(p.point->magnitude) << ',' << format_number(to_db(p.point->magnitude))
          << ",ok\n";
    } else {
      unstable = unstable || p.unstable;
      out << "nan,nan," << (p.unstable ? "unstable" : "no_steady_state") << '\n';
    }
  }
  return unstable ? kInstability : kOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const ModelError& ex) {
    err << "invalid model: " << ex.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleDesign& ex) {
    err << "infeasible design: " << ex.what() << '\n';
    return kInfeasible;
  } catch (const InstabilityError& ex) {
    err << "simulation unstable: " << ex.what() << '\n';
    return kInstability;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
}

}  // namespace resetkit::cli
