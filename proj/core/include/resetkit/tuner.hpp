#pragma once

// Tuning guideline for CgLp compensators. For a requested (order, theta,
// omega_c) one candidate is designed per gamma on the grid -0.9:0.1:0.9 and
// annotated with the 3rd-harmonic peak (omega_p, M_p) of its reset element
// alone. Tracking favours the largest omega_p, noise rejection the lowest M_p.

#include <optional>
#include <string>
#include <vector>

#include "resetkit/cglp.hpp"
#include "resetkit/sim.hpp"

namespace resetkit {

struct TuningCandidate {
  CgLpConfig config;         ///< omega_r = omega_c / b when feasible
  double b = 0.0;            ///< NaN when infeasible
  double omega_p = 0.0;      ///< rad/s, NaN when infeasible
  double m_p_db = 0.0;       ///< dB, NaN when infeasible
  double ratio = 0.0;        ///< omega_c / omega_p
  double g3_low_db = 0.0;    ///< |G(j omega_c/10, 3)| of the reset element, dB
  double phase_deg = 0.0;    ///< achieved design_phase at omega_c
  double max_phase_deg = 0.0;
  bool feasible = false;

  double gamma() const noexcept { return config.gamma; }
};

enum class Objective { tracking, noise };

struct TuningReport {
  int order = 1;
  double theta_deg = 0.0;
  double omega_c = 0.0;
  double omega_t = 0.0;
  PhaseReference reference = PhaseReference::tamed;
  std::vector<TuningCandidate> candidates;
  std::optional<std::size_t> tracking;  ///< index into candidates
  std::optional<std::size_t> noise;
  std::vector<double> infeasible;  ///< gammas without a solution
};

/// The gamma grid -0.9, -0.8, ..., 0.9 (0 exactly representable).
std::vector<double> gamma_grid();

/// One candidate per grid gamma. Infeasible gammas are flagged, not dropped.
/// omega_t defaults to 5 omega_c. Throws ModelError for theta outside
/// (0, 180) or a bad omega_c.
std::vector<TuningCandidate> enumerate_candidates(int order, double theta_deg, double omega_c,
                                                  std::optional<double> omega_t = std::nullopt,
                                                  int taming_poles = 0, unsigned threads = 0,
                                                  PhaseReference reference = PhaseReference::tamed);

/// Relative omega_p tolerance within which two candidates count as tied.
inline constexpr double kOmegaPTieTolerance = 1e-3;
/// Absolute M_p tolerance (dB) for ties.
inline constexpr double kMpTieToleranceDb = 1e-3;

/// tracking: largest omega_p; noise: lowest M_p. Ties go to the larger gamma.
/// Returns an index into `candidates`. Throws InfeasibleDesign when no
/// candidate is feasible.
std::size_t recommend(const std::vector<TuningCandidate>& candidates, Objective objective);

/// enumerate_candidates plus both recommendations (left empty when nothing
/// is feasible).
TuningReport tune(int order, double theta_deg, double omega_c,
                  std::optional<double> omega_t = std::nullopt, int taming_poles = 0,
                  unsigned threads = 0, PhaseReference reference = PhaseReference::tamed);

struct SimulationSettings {
  double f_lo_hz = 1.0;
  double f_hi_hz = 40.0;
  std::size_t points = 20;
  double r0 = 1.0;
  std::optional<double> omega_i;  ///< PI corner; none for a bare CgLp loop
  double ts = 1e-4;
  ResetTiming reset_timing = ResetTiming::sample;
  unsigned threads = 0;
};

struct VerificationRow {
  double gamma = 0.0;
  double omega_p = 0.0;
  std::optional<double> mean_s_db;  ///< log-uniform mean of 20 log10 S_inf
  std::vector<SweepOutcome> sweep;
  bool unstable = false;
  std::string excluded_reason;  ///< nonempty when left out of the ranking
  int sim_rank = 0;             ///< 1 = lowest mean S_inf; 0 when excluded
  int omega_p_rank = 0;         ///< 1 = largest omega_p among ranked rows
};

struct VerificationReport {
  std::vector<VerificationRow> rows;  ///< feasible candidates, gamma order
  std::optional<double> best_gamma_simulation;
  std::optional<double> best_gamma_omega_p;
  bool agree = false;
};

/// Simulated pseudo-sensitivity per feasible candidate, averaged in dB over
/// a log grid of the band. Unstable or non-settling candidates are excluded.
VerificationReport verify_by_simulation(const TuningReport& report, const TransferFunction& plant,
                                        const SimulationSettings& settings = {});

struct NoiseRow {
  double gamma = 0.0;
  std::optional<NoiseMetrics> metrics;
  std::string excluded_reason;
};

/// noise_metrics for each feasible candidate in its closed loop.
std::vector<NoiseRow> noise_comparison(const TuningReport& report, const TransferFunction& plant,
                                       double amplitude, double duration, std::uint64_t seed,
                                       const SimulationSettings& settings = {});

/// JSON document: {order, theta_deg, omega_c, omega_t, candidates: [{gamma,
/// b, omega_p, M_p_db, ratio, feasible, ...}], recommendation_tracking,
/// recommendation_noise, infeasible}. NaN values are written as null.
std::string report_json(const TuningReport& report);

/// Fixed-width table for terminals.
std::string report_table(const TuningReport& report);

}  // namespace resetkit
