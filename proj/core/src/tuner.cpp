#include "resetkit/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "resetkit/error.hpp"
#include "resetkit/numeric.hpp"

namespace resetkit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPhaseTolerance = 0.05;

TuningCandidate evaluate_candidate(int order, double gamma, double theta_deg, double omega_c,
                                   double omega_t, int taming_poles, PhaseReference reference) {
  TuningCandidate cand;
  cand.config.order = order;
  cand.config.gamma = gamma;
  cand.config.omega_t = omega_t;
  cand.config.taming_poles = taming_poles;
  cand.b = cand.omega_p = cand.m_p_db = cand.ratio = cand.g3_low_db = cand.phase_deg = kNaN;
  cand.max_phase_deg = max_phase_lead(order, gamma, omega_c, omega_t, taming_poles, reference);
  try {
    cand.config = design_cglp(order, gamma, theta_deg, omega_c, omega_t, taming_poles, reference);
  } catch (const InfeasibleDesign&) {
    return cand;
  }
  cand.b = omega_c / cand.config.omega_r;
  cand.phase_deg = design_phase(order, gamma, cand.b, omega_c, omega_t, taming_poles, reference);
  cand.feasible = std::abs(cand.phase_deg - theta_deg) <= kPhaseTolerance;

  const ResetSystem reset = build_cglp(cand.config).reset_part;
  const HarmonicPeak peak = harmonic_peak(reset);
  cand.omega_p = peak.omega_p;
  cand.m_p_db = peak.magnitude_db;
  cand.ratio = omega_c / peak.omega_p;
  cand.g3_low_db = to_db(std::abs(hosidf(reset, omega_c / 10.0, 3)));
  return cand;
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json candidate_json(const TuningCandidate& c) {
  nlohmann::ordered_json j;
  j["gamma"] = c.gamma();
  j["b"] = number_or_null(c.b);
  j["omega_p"] = number_or_null(c.omega_p);
  j["M_p_db"] = number_or_null(c.m_p_db);
  j["ratio"] = number_or_null(c.ratio);
  j["feasible"] = c.feasible;
  j["omega_r"] = c.feasible ? nlohmann::ordered_json(c.config.omega_r) : nullptr;
  j["phase_deg"] = number_or_null(c.phase_deg);
  j["max_phase_deg"] = number_or_null(c.max_phase_deg);
  j["g3_low_db"] = number_or_null(c.g3_low_db);
  if (c.feasible) {
    const CorrectionFactors f = resolved_correction(c.config);
    j["alpha1"] = f.alpha1;
    j["alpha2"] = f.alpha2;
  }
  return j;
}

}  // namespace

std::vector<double> gamma_grid() {
  std::vector<double> out;
  for (int i = -9; i <= 9; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<TuningCandidate> enumerate_candidates(int order, double theta_deg, double omega_c,
                                                  std::optional<double> omega_t,
                                                  int taming_poles, unsigned threads,
                                                  PhaseReference reference) {
  if (order != 1 && order != 2) throw ModelError("CgLp order must be 1 or 2");
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) {
    throw ModelError("phase target theta must lie in (0, 180) degrees");
  }
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
    throw ModelError("crossover frequency must be positive");
  }
  const double wt = omega_t.value_or(5.0 * omega_c);
  if (!(wt > omega_c)) throw ModelError("omega_t must exceed omega_c");
  // Fill the shared correction-factor table before fanning out.
  (void)correction_factors(order, 0.0);
  const std::vector<double> gammas = gamma_grid();
  return numeric::parallel_map<TuningCandidate>(
      gammas.size(),
      [&](std::size_t i) {
        return evaluate_candidate(order, gammas[i], theta_deg, omega_c, wt, taming_poles, reference);
      },
      threads);
}

std::size_t recommend(const std::vector<TuningCandidate>& candidates, Objective objective) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].feasible) feasible.push_back(i);
  }
  if (feasible.empty()) throw InfeasibleDesign("no feasible candidate for theta");

  auto larger_gamma = [&](std::size_t a, std::size_t b) {
    return candidates[a].gamma() > candidates[b].gamma() ? a : b;
  };
  std::optional<std::size_t> pick;
  if (objective == Objective::tracking) {
    double best = 0.0;
    for (auto i : feasible) best = std::max(best, candidates[i].omega_p);
    for (auto i : feasible) {
      if (candidates[i].omega_p >= best * (1.0 - kOmegaPTieTolerance)) {
        pick = pick ? larger_gamma(*pick, i) : i;
      }
    }
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (auto i : feasible) best = std::min(best, candidates[i].m_p_db);
    for (auto i : feasible) {
      if (candidates[i].m_p_db <= best + kMpTieToleranceDb) pick = pick ? larger_gamma(*pick, i) : i;
    }
  }
  return *pick;
}

TuningReport tune(int order, double theta_deg, double omega_c, std::optional<double> omega_t,
                  int taming_poles, unsigned threads, PhaseReference reference) {
  TuningReport report;
  report.reference = reference;
  report.order = order;
  report.theta_deg = theta_deg;
  report.omega_c = omega_c;
  report.omega_t = omega_t.value_or(5.0 * omega_c);
  report.candidates =
      enumerate_candidates(order, theta_deg, omega_c, omega_t, taming_poles, threads, reference);
  for (const auto& c : report.candidates) {
    if (!c.feasible) report.infeasible.push_back(c.gamma());
  }
  if (report.infeasible.size() < report.candidates.size()) {
    report.tracking = recommend(report.candidates, Objective::tracking);
    report.noise = recommend(report.candidates, Objective::noise);
  }
  return report;
}

VerificationReport verify_by_simulation(const TuningReport& report, const TransferFunction& plant,
                                        const SimulationSettings& settings) {
  const std::vector<double> omegas =
      sweep_grid_hz(settings.f_lo_hz, settings.f_hi_hz, settings.points);
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    if (report.candidates[i].feasible) feasible.push_back(i);
  }

  VerificationReport out;
  out.rows = numeric::parallel_map<VerificationRow>(
      feasible.size(),
      [&](std::size_t k) {
        const TuningCandidate& cand = report.candidates[feasible[k]];
        VerificationRow row;
        row.gamma = cand.gamma();
        row.omega_p = cand.omega_p;
        try {
          LoopSpec loop =
              make_cglp_loop(plant, cand.config, report.omega_c, settings.omega_i, settings.ts);
          loop.reset_timing = settings.reset_timing;
          row.sweep = sensitivity_sweep(loop, omegas, settings.r0, 1);
        } catch (const Error& ex) {
          row.excluded_reason = ex.what();
          return row;
        }
        double sum = 0.0;
        for (const auto& p : row.sweep) {
          if (p.unstable) {
            row.unstable = true;
            row.excluded_reason = "unstable: " + p.error;
            return row;
          }
          if (!p.point) {
            row.excluded_reason = p.error;
            return row;
          }
          sum += to_db(p.point->magnitude);
        }
        if (!row.sweep.empty()) row.mean_s_db = sum / static_cast<double>(row.sweep.size());
        return row;
      },
      settings.threads);

  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (out.rows[i].mean_s_db) ranked.push_back(i);
  }
  std::vector<std::size_t> by_sim = ranked;
  std::stable_sort(by_sim.begin(), by_sim.end(), [&](std::size_t a, std::size_t b) {
    return *out.rows[a].mean_s_db < *out.rows[b].mean_s_db;
  });
  for (std::size_t r = 0; r < by_sim.size(); ++r) out.rows[by_sim[r]].sim_rank = static_cast<int>(r + 1);
  std::vector<std::size_t> by_wp = ranked;
  std::stable_sort(by_wp.begin(), by_wp.end(), [&](std::size_t a, std::size_t b) {
    return out.rows[a].omega_p > out.rows[b].omega_p;
  });
  for (std::size_t r = 0; r < by_wp.size(); ++r) out.rows[by_wp[r]].omega_p_rank = static_cast<int>(r + 1);

  if (!by_sim.empty()) out.best_gamma_simulation = out.rows[by_sim.front()].gamma;
  if (report.tracking) out.best_gamma_omega_p = report.candidates[*report.tracking].gamma();
  out.agree = out.best_gamma_simulation && out.best_gamma_omega_p &&
              std::abs(*out.best_gamma_simulation - *out.best_gamma_omega_p) < 1e-9;
  return out;
}

std::vector<NoiseRow> noise_comparison(const TuningReport& report, const TransferFunction& plant,
                                       double amplitude, double duration, std::uint64_t seed,
                                       const SimulationSettings& settings) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    if (report.candidates[i].feasible) feasible.push_back(i);
  }
  return numeric::parallel_map<NoiseRow>(
      feasible.size(),
      [&](std::size_t k) {
        const TuningCandidate& cand = report.candidates[feasible[k]];
        NoiseRow row;
        row.gamma = cand.gamma();
        try {
          LoopSpec loop =
              make_cglp_loop(plant, cand.config, report.omega_c, settings.omega_i, settings.ts);
          loop.reset_timing = settings.reset_timing;
          row.metrics = noise_metrics(loop, amplitude, duration, seed);
        } catch (const Error& ex) {
          row.excluded_reason = ex.what();
        }
        return row;
      },
      settings.threads);
}

std::string report_json(const TuningReport& report) {
  nlohmann::ordered_json j;
  j["order"] = report.order;
  j["theta_deg"] = report.theta_deg;
  j["omega_c"] = report.omega_c;
  j["omega_t"] = report.omega_t;
  j["phase_reference"] = report.reference == PhaseReference::tamed ? "tamed" : "untamed";
  j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : report.candidates) j["candidates"].push_back(candidate_json(c));
  j["recommendation_tracking"] =
      report.tracking ? candidate_json(report.candidates[*report.tracking]) : nullptr;
  j["recommendation_noise"] =
      report.noise ? candidate_json(report.candidates[*report.noise]) : nullptr;
  j["infeasible"] = report.infeasible;
  return j.dump(2) + "\n";
}

std::string report_table(const TuningReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "order %d, theta %.4g deg, omega_c %.6g rad/s, omega_t %.6g rad/s\n",
                report.order, report.theta_deg, report.omega_c, report.omega_t);
  out << line;
  std::snprintf(line, sizeof line, "%6s %9s %9s %10s %12s %12s %s\n", "gamma", "b", "wc/wp",
                "M_p[dB]", "omega_p", "G3(wc/10)", "feasible");
  out << line;
  for (const auto& c : report.candidates) {
    if (c.feasible) {
      std::snprintf(line, sizeof line, "%6.1f %9.4f %9.4f %10.3f %12.5g %12.3f %s\n", c.gamma(),
                    c.b, c.ratio, c.m_p_db, c.omega_p, c.g3_low_db, "yes");
    } else {
      std::snprintf(line, sizeof line, "%6.1f %9s %9s %10s %12s %12s no (max %.2f deg)\n",
                    c.gamma(), "-", "-", "-", "-", "-", c.max_phase_deg);
    }
    out << line;
  }
  for (const auto& [name, idx] : {std::pair{"tracking", report.tracking}, std::pair{"noise", report.noise}}) {
    if (idx) {
      const auto& c = report.candidates[*idx];
      std::snprintf(line, sizeof line, "%-8s -> gamma = %.1f, b = %.4g, wc/wp = %.4g, M_p = %.3f dB\n",
                    name, c.gamma(), c.b, c.ratio, c.m_p_db);
    } else {
      std::snprintf(line, sizeof line, "%-8s -> no feasible candidate\n", name);
    }
    out << line;
  }
  return out.str();
}

}  // namespace resetkit
