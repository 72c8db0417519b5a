#pragma once

// Subcommands of the resetkit tool. Each writes its primary output to `out`
// and returns a process exit code; run_guarded maps exceptions to codes.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resetkit/config.hpp"

namespace resetkit::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kInstability = 4,
};

/// Frequency grid in Hz: an explicit list, or `points` log-spaced values
/// over [f_min, f_max].
struct SweepOptions {
  double f_min = 0.1;
  double f_max = 1000.0;
  std::size_t points = 200;
  std::optional<std::vector<double>> list_hz;

  std::vector<double> frequencies_hz() const;
};

/// f_hz,omega,mag_db,phase_deg
int cmd_df(const ProjectConfig& cfg, const SweepOptions& sweep, std::ostream& out);

/// f_hz,omega,n,re,im,abs,mag_db,phase_deg (one row per frequency and order)
int cmd_hosidf(const ProjectConfig& cfg, const SweepOptions& sweep, const std::vector<int>& orders,
               std::ostream& out);

/// JSON description of the designed CgLp.
int cmd_design(const ProjectConfig& cfg, std::ostream& out);

struct TuneOptions {
  std::string objective = "both";  ///< tracking | noise | both
  bool verify = false;             ///< add a simulated S_inf ranking
  unsigned threads = 0;
};

/// Candidate table and recommendations to `out`; JSON report to
/// cfg.output.json when set.
int cmd_tune(const ProjectConfig& cfg, const TuneOptions& options, std::ostream& out);

enum class SimMode { track, noise, trajectory };

/// Metrics JSON {mode, max_e, rms_e, t_ss, ...} to `out`; series CSV
/// (t,r,e,u,y,n) to cfg.output.csv when set.
int cmd_sim(const ProjectConfig& cfg, SimMode mode, std::ostream& out);

/// f_hz,omega,s_inf,s_inf_db,status
int cmd_sensitivity(const ProjectConfig& cfg, const SweepOptions& sweep, std::ostream& out,
                    unsigned threads = 0);

/// Runs `body`, printing any error to `err` and returning its exit code.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace resetkit::cli
