#pragma once

// Fixed-step closed-loop simulation
//
//   e = r - (y + n),   u = k_p * chain(e),   y = plant(u)
//
// Linear controller blocks and the base dynamics of reset blocks advance by
// the trapezoidal (Tustin) recursion; a reset block replaces its state by
// A_rho x at every sample where its own input changed sign since the previous
// sample or is exactly zero, before that sample's output is formed. The plant
// is discretized with a zero-order hold and must be strictly proper.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "resetkit/cglp.hpp"
#include "resetkit/lti.hpp"
#include "resetkit/reset_freq.hpp"

namespace resetkit {

struct SineComponent {
  double amplitude = 0.0;
  double frequency_hz = 0.0;
  double phase = 0.0;  ///< rad
};

/// r(t) = sum a_i sin(2 pi f_i t + phi_i).
class Multisine {
 public:
  Multisine() = default;
  explicit Multisine(std::vector<SineComponent> components);

  double operator()(double t) const;
  const std::vector<SineComponent>& components() const noexcept { return components_; }
  bool empty() const noexcept { return components_.empty(); }

  /// Sum of |a_i|, an upper bound on |r|.
  double peak_bound() const;

  /// Common period (s) when every frequency is an integer multiple of a
  /// fundamental; empty for a zero reference or incommensurate components.
  std::optional<double> period() const;

 private:
  std::vector<SineComponent> components_;
};

/// Throws ModelError unless every frequency is positive and finite.
Multisine multisine_reference(std::vector<SineComponent> components);

/// {(0.6, 1 Hz), (0.3, 2 Hz), (0.1, 5 Hz)}, all zero phase.
Multisine default_multisine();

/// 1/(m s^2).
TransferFunction mass_plant(double mass = 1.0);

/// 8695 / (s^2 + 4.36 s + 7627.3), identified positioning stage.
TransferFunction stage_plant();

using Block = std::variant<StateSpaceModel, ResetSystem>;

struct NoiseSpec {
  double amplitude = 0.0;  ///< uniform on [-amplitude, amplitude] per sample
  std::uint64_t seed = 0;
};

/// When a reset block's state jumps within the sample where its input changed
/// sign. `sample`: x <- A_rho x at that sample. `interpolated`: the jump is
/// applied at the linearly interpolated crossing and propagated by the free
/// dynamics over the rest of the sample.
enum class ResetTiming { sample, interpolated };

struct LoopSpec {
  StateSpaceModel plant;     ///< continuous, strictly proper
  std::vector<Block> chain;  ///< applied in order to e
  double k_p = 1.0;
  double ts = 1e-4;
  Multisine reference;
  NoiseSpec noise;
  ResetTiming reset_timing = ResetTiming::sample;

  /// Throws ModelError for a discrete/improper plant, bad Ts or k_p.
  void validate() const;
};

struct ResetEvent {
  std::size_t sample = 0;
  std::size_t block = 0;  ///< index in LoopSpec::chain
  double previous_input = 0.0;
  double input = 0.0;
};

struct SimResult {
  std::vector<double> t, r, e, u, y, n;
  double t_ss = 0.0;
  bool steady = true;  ///< false when the onset search hit the 80% cap
  std::vector<ResetEvent> resets;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return t.size(); }
  /// First sample index with t >= t_ss.
  std::size_t steady_index() const;
};

/// Runs the loop for `duration` seconds; `seed` overrides loop.noise.seed.
/// Steady-state onset: for a periodic reference, the first period whose peak
/// |r - y| matches the next period's within 0.1%, and so does every later
/// pair (capped at 80% of the run with a warning); otherwise 20% of the run.
/// Throws InstabilityError when |y| exceeds 1e9 times the signal scale.
SimResult simulate(const LoopSpec& loop, double duration, std::uint64_t seed);

struct PseudoSensitivityPoint {
  double omega = 0.0;      ///< rad/s
  double magnitude = 0.0;  ///< max_{t >= t_ss} |r - y| / r0
};

/// Simulates r = r0 sin(omega t), n = 0 for max(20 periods, 0.5 s). If no
/// steady state is found the duration is doubled, at most twice, before a
/// ConvergenceError.
PseudoSensitivityPoint pseudo_sensitivity(const LoopSpec& loop, double omega, double r0 = 1.0);

struct SweepOutcome {
  double omega = 0.0;
  std::optional<PseudoSensitivityPoint> point;
  std::string error;  ///< set when point is empty
  bool unstable = false;
};

/// pseudo_sensitivity at each frequency; failures are recorded per point.
std::vector<SweepOutcome> sensitivity_sweep(const LoopSpec& loop, const std::vector<double>& omegas,
                                            double r0 = 1.0, unsigned threads = 0);

/// `count` log-spaced angular frequencies over [f_lo, f_hi] Hz.
std::vector<double> sweep_grid_hz(double f_lo = 1.0, double f_hi = 40.0, std::size_t count = 20);

struct NoiseMetrics {
  double max_error = 0.0;
  double rms_error = 0.0;
  double t_ss = 0.0;
};

/// Zero reference, uniform noise in the feedback path; metrics of r - y over
/// t >= t_ss.
NoiseMetrics noise_metrics(const LoopSpec& loop, double amplitude, double duration,
                           std::uint64_t seed);

/// Metrics of r - y over t >= t_ss of an existing run.
NoiseMetrics error_metrics(const SimResult& result);

/// k_p with |k_p * chain(j omega_c) * plant(j omega_c)| = 1, using the
/// describing function for reset blocks. The loop's current k_p is ignored.
double tune_kp(const LoopSpec& loop, double omega_c);

/// Frequency response of the chain (DF for reset blocks) without k_p.
Complex chain_response(const std::vector<Block>& chain, double omega);

/// 1 / (1 + G C). Throws SingularityError when 1 + G C vanishes.
Complex linear_sensitivity(Complex plant_gain, Complex controller_gain);

/// PI factor (1 + omega_i / s).
StateSpaceModel pi_block(double omega_i);

/// [reset part, lead filter, optional PI].
std::vector<Block> cglp_chain(const CgLpConfig& cfg, std::optional<double> omega_i);

/// Loop around `plant` with the CgLp chain and k_p tuned for crossover at omega_c.
LoopSpec make_cglp_loop(const TransferFunction& plant, const CgLpConfig& cfg, double omega_c,
                        std::optional<double> omega_i, double ts = 1e-4);

/// Columns t,r,e,u,y,n with a header row, 17 significant digits.
void write_csv(std::ostream& out, const SimResult& result);

/// "%.17g" formatting shared by every CSV writer.
std::string format_number(double value);

}  // namespace resetkit
