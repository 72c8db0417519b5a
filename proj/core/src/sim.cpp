#include "resetkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "resetkit/error.hpp"
#include "resetkit/numeric.hpp"

namespace resetkit {
namespace {

using std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on [-1, 1), a pure function of (seed, k).
double noise_sample(std::uint64_t seed, std::uint64_t k) {
  const std::uint64_t h = splitmix64(splitmix64(seed) ^ k);
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

// Trapezoidal recursion x_k = phi x_{k-1} + gamma (v_{k-1} + v_k).
struct DiscreteBlock {
  Matrix phi;
  Matrix a_ts;
  Vector gamma;
  RowVector c;
  double d = 0.0;
  std::optional<Matrix> reset;
  ResetTiming timing = ResetTiming::sample;
  Vector x;
  Vector x_prev;
  Vector scratch;
  double v_prev = 0.0;

  DiscreteBlock(const StateSpaceModel& model, std::optional<Matrix> reset_matrix, double ts,
                ResetTiming reset_timing)
      : c(model.c), d(model.d), reset(std::move(reset_matrix)), timing(reset_timing) {
    model.validate();
    if (model.is_discrete()) throw ModelError("controller blocks must be continuous");
    const Eigen::Index n = model.order();
    const Matrix identity = Matrix::Identity(n, n);
    Eigen::FullPivLU<Matrix> lu(identity - model.a * (ts / 2.0));
    if (n > 0 && !lu.isInvertible()) {
      throw SingularityError("Tustin recursion: I - A Ts/2 is singular");
    }
    phi = n > 0 ? Matrix(lu.solve(identity + model.a * (ts / 2.0))) : Matrix(0, 0);
    a_ts = model.a * ts;
    gamma = n > 0 ? Vector(lu.solve(model.b * (ts / 2.0))) : Vector(0);
    x = Vector::Zero(n);
    x_prev = x;
    scratch = Vector::Zero(n);
  }

  // Returns true when the state was reset at this sample.
  bool step(double v, double& out) {
    x_prev = x;
    scratch.noalias() = phi * x;
    x = scratch + gamma * (v_prev + v);
    bool did_reset = false;
    if (reset && (v == 0.0 || v_prev * v < 0.0)) {
      if (timing == ResetTiming::interpolated && v != 0.0) {
        // Jump at the interpolated crossing, then let it flow to the sample.
        const double lambda = v_prev / (v_prev - v);
        scratch = x_prev + lambda * (x - x_prev);
        x += matrix_exponential(a_ts * (1.0 - lambda)) * (*reset * scratch - scratch);
      } else {
        scratch.noalias() = *reset * x;
        x = scratch;
      }
      did_reset = true;
    }
    v_prev = v;
    out = c.dot(x) + d * v;
    return did_reset;
  }
};

// Start of steady state from per-period peaks of |r - y|: the first window
// after which every consecutive pair of peaks agrees within 0.1%.
void locate_steady_state(SimResult& res, double period, double duration, double scale) {
  const std::size_t windows = static_cast<std::size_t>(std::floor(duration / period + 1e-9));
  std::vector<double> peaks(windows, 0.0);
  for (std::size_t k = 0; k < res.size(); ++k) {
    const auto w = static_cast<std::size_t>(std::floor(res.t[k] / period + 1e-12));
    if (w >= windows) break;
    peaks[w] = std::max(peaks[w], std::abs(res.r[k] - res.y[k]));
  }
  auto agree = [&](std::size_t i) {
    const double a = peaks[i];
    const double b = peaks[i + 1];
    return std::abs(a - b) <= 1e-3 * std::max(a, b) || std::max(a, b) <= 1e-13 * scale;
  };
  std::optional<std::size_t> onset;
  if (windows >= 3) {
    std::size_t j = windows - 1;
    while (j > 0 && agree(j - 1)) --j;
    if (j + 1 < windows) onset = j;  // at least one agreeing pair after j
  }
  const double cap = 0.8 * duration;
  if (!onset || static_cast<double>(*onset) * period > cap) {
    res.t_ss = cap;
    res.steady = false;
    std::ostringstream msg;
    msg << "steady state not detected within " << duration << " s; t_ss capped at " << cap
        << " s";
    res.warnings.push_back(msg.str());
    return;
  }
  res.t_ss = static_cast<double>(*onset) * period;
}

// Peak |r - y| over the last 20% of the run within 5% of the peak over the
// 20% before it.
bool bounded_envelope(const SimResult& res) {
  const std::size_t n = res.size();
  const std::size_t a = n * 3 / 5;
  const std::size_t b = n * 4 / 5;
  double earlier = 0.0;
  double last = 0.0;
  for (std::size_t k = a; k < b; ++k) earlier = std::max(earlier, std::abs(res.r[k] - res.y[k]));
  for (std::size_t k = b; k < n; ++k) last = std::max(last, std::abs(res.r[k] - res.y[k]));
  return std::abs(last - earlier) <= 0.05 * std::max(last, earlier);
}

void check_omega_list(const std::vector<double>& omegas) {
  for (double w : omegas) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ModelError("sweep frequencies must be positive");
  }
}

}  // namespace

Multisine::Multisine(std::vector<SineComponent> components) : components_(std::move(components)) {}

double Multisine::operator()(double t) const {
  double r = 0.0;
  for (const auto& c : components_) r += c.amplitude * std::sin(2.0 * pi * c.frequency_hz * t + c.phase);
  return r;
}

double Multisine::peak_bound() const {
  double s = 0.0;
  for (const auto& c : components_) s += std::abs(c.amplitude);
  return s;
}

std::optional<double> Multisine::period() const {
  if (components_.empty()) return std::nullopt;
  double f_min = components_.front().frequency_hz;
  for (const auto& c : components_) f_min = std::min(f_min, c.frequency_hz);
  for (int divisor = 1; divisor <= 64; ++divisor) {
    const double f0 = f_min / divisor;
    bool commensurate = true;
    for (const auto& c : components_) {
      const double ratio = c.frequency_hz / f0;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        commensurate = false;
        break;
      }
    }
    if (commensurate) return 1.0 / f0;
  }
  return std::nullopt;
}

Multisine multisine_reference(std::vector<SineComponent> components) {
  for (const auto& c : components) {
    if (!(c.frequency_hz > 0.0) || !std::isfinite(c.frequency_hz)) {
      throw ModelError("multisine: frequencies must be positive and finite");
    }
    if (!std::isfinite(c.amplitude) || !std::isfinite(c.phase)) {
      throw ModelError("multisine: amplitude and phase must be finite");
    }
  }
  return Multisine(std::move(components));
}

Multisine default_multisine() {
  return multisine_reference({{0.6, 1.0, 0.0}, {0.3, 2.0, 0.0}, {0.1, 5.0, 0.0}});
}

TransferFunction mass_plant(double mass) {
  if (!(mass > 0.0)) throw ModelError("mass must be positive");
  return TransferFunction({1.0}, {mass, 0.0, 0.0});
}

TransferFunction stage_plant() { return TransferFunction({8695.0}, {1.0, 4.36, 7627.3}); }

void LoopSpec::validate() const {
  plant.validate();
  if (plant.is_discrete()) throw ModelError("plant must be continuous");
  if (plant.d != 0.0) throw ModelError("plant must be strictly proper (D = 0) for simulation");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ModelError("sampling time must be positive");
  if (!std::isfinite(k_p)) throw ModelError("k_p must be finite");
  if (!(noise.amplitude >= 0.0)) throw ModelError("noise amplitude must be >= 0");
  for (const auto& block : chain) {
    std::visit([](const auto& b) { b.validate(); }, block);
  }
}

std::size_t SimResult::steady_index() const {
  const auto it = std::lower_bound(t.begin(), t.end(), t_ss - 1e-12);
  return static_cast<std::size_t>(std::distance(t.begin(), it));
}

SimResult simulate(const LoopSpec& loop, double duration, std::uint64_t seed) {
  loop.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ModelError("duration must be positive");

  std::vector<DiscreteBlock> blocks;
  blocks.reserve(loop.chain.size());
  for (const auto& block : loop.chain) {
    if (const auto* lin = std::get_if<StateSpaceModel>(&block)) {
      blocks.emplace_back(*lin, std::nullopt, loop.ts, loop.reset_timing);
    } else {
      const auto& rs = std::get<ResetSystem>(block);
      blocks.emplace_back(rs.base, rs.reset_matrix, loop.ts, loop.reset_timing);
    }
  }
  const StateSpaceModel plant = zoh_discretize(loop.plant, loop.ts);
  Vector xp = Vector::Zero(plant.order());
  Vector xp_next = xp;

  const auto samples = static_cast<std::size_t>(std::floor(duration / loop.ts + 1e-9)) + 1;
  SimResult res;
  for (auto* series : {&res.t, &res.r, &res.e, &res.u, &res.y, &res.n}) series->resize(samples);

  const double signal = std::max(loop.reference.peak_bound(), loop.noise.amplitude);
  const double scale = signal > 0.0 ? signal : 1.0;
  const double limit = 1e9 * scale;

  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * loop.ts;
    const double y = plant.c.dot(xp);
    if (!std::isfinite(y) || std::abs(y) > limit) {
      std::ostringstream msg;
      msg << "closed loop diverged: |y| = " << std::abs(y) << " exceeds " << limit << " at t = "
          << t << " s";
      throw InstabilityError(msg.str(), t);
    }
    const double r = loop.reference(t);
    const double n =
        loop.noise.amplitude > 0.0 ? loop.noise.amplitude * noise_sample(seed, k) : 0.0;
    const double e = r - (y + n);

    double v = e;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const double v_prev = blocks[b].v_prev;
      double out = 0.0;
      if (blocks[b].step(v, out)) res.resets.push_back({k, b, v_prev, v});
      v = out;
    }
    const double u = loop.k_p * v;

    res.t[k] = t;
    res.r[k] = r;
    res.e[k] = e;
    res.u[k] = u;
    res.y[k] = y;
    res.n[k] = n;

    xp_next.noalias() = plant.a * xp;
    xp = xp_next + plant.b * u;
  }

  const double end = res.t.back();
  if (const auto period = loop.reference.period(); period && end >= 3.0 * *period) {
    locate_steady_state(res, *period, end, scale);
  } else {
    res.t_ss = 0.2 * end;
  }
  return res;
}

PseudoSensitivityPoint pseudo_sensitivity(const LoopSpec& loop, double omega, double r0) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ModelError("omega must be positive");
  if (!(r0 > 0.0)) throw ModelError("reference amplitude r0 must be positive");
  LoopSpec run = loop;
  run.reference = multisine_reference({{r0, omega / (2.0 * pi), 0.0}});
  run.noise = {};
  const double period = 2.0 * pi / omega;
  double duration = std::max(20.0 * period, 0.5);
  for (int attempt = 0; attempt < 3; ++attempt, duration *= 2.0) {
    const SimResult res = simulate(run, duration, 0);
    // A capped onset is still accepted when the error envelope has stopped
    // changing: reset loops often settle into a bounded but aperiodic state.
    if (!res.steady && !bounded_envelope(res)) continue;
    double peak = 0.0;
    for (std::size_t k = res.steady_index(); k < res.size(); ++k) {
      peak = std::max(peak, std::abs(res.r[k] - res.y[k]));
    }
    return {omega, peak / r0};
  }
  std::ostringstream msg;
  msg << "pseudo_sensitivity: no steady state at omega = " << omega << " rad/s within "
      << duration / 2.0 << " s";
  throw ConvergenceError(msg.str());
}

std::vector<SweepOutcome> sensitivity_sweep(const LoopSpec& loop, const std::vector<double>& omegas,
                                            double r0, unsigned threads) {
  check_omega_list(omegas);
  return numeric::parallel_map<SweepOutcome>(
      omegas.size(),
      [&](std::size_t i) {
        SweepOutcome out;
        out.omega = omegas[i];
        try {
          out.point = pseudo_sensitivity(loop, omegas[i], r0);
        } catch (const InstabilityError& ex) {
          out.unstable = true;
          out.error = ex.what();
        } catch (const Error& ex) {
          out.error = ex.what();
        }
        return out;
      },
      threads);
}

std::vector<double> sweep_grid_hz(double f_lo, double f_hi, std::size_t count) {
  std::vector<double> out = logspace(f_lo, f_hi, count);
  for (double& f : out) f *= 2.0 * pi;
  return out;
}

NoiseMetrics error_metrics(const SimResult& result) {
  NoiseMetrics m;
  m.t_ss = result.t_ss;
  const std::size_t first = result.steady_index();
  if (first >= result.size()) return m;
  double sum_sq = 0.0;
  for (std::size_t k = first; k < result.size(); ++k) {
    const double err = result.r[k] - result.y[k];
    m.max_error = std::max(m.max_error, std::abs(err));
    sum_sq += err * err;
  }
  m.rms_error = std::sqrt(sum_sq / static_cast<double>(result.size() - first));
  return m;
}

NoiseMetrics noise_metrics(const LoopSpec& loop, double amplitude, double duration,
                           std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw ModelError("noise amplitude must be >= 0");
  LoopSpec run = loop;
  run.reference = Multisine();
  run.noise = {amplitude, seed};
  return error_metrics(simulate(run, duration, seed));
}

Complex chain_response(const std::vector<Block>& chain, double omega) {
  Complex g(1.0, 0.0);
  for (const auto& block : chain) {
    if (const auto* lin = std::get_if<StateSpaceModel>(&block)) {
      g *= freq_response(*lin, omega);
    } else {
      g *= describing_function(std::get<ResetSystem>(block), omega);
    }
  }
  return g;
}

double tune_kp(const LoopSpec& loop, double omega_c) {
  if (!(omega_c > 0.0)) throw ModelError("crossover frequency must be positive");
  const double mag = std::abs(chain_response(loop.chain, omega_c) * freq_response(loop.plant, omega_c));
  if (!(mag > 0.0) || !std::isfinite(mag)) {
    std::ostringstream msg;
    msg << "tune_kp: open-loop gain at omega_c = " << omega_c << " rad/s is " << mag;
    throw ModelError(msg.str());
  }
  return 1.0 / mag;
}

Complex linear_sensitivity(Complex plant_gain, Complex controller_gain) {
  const Complex return_difference = 1.0 + plant_gain * controller_gain;
  if (std::abs(return_difference) < 1e-14) {
    throw SingularityError("linear_sensitivity: 1 + G C = 0");
  }
  return 1.0 / return_difference;
}

StateSpaceModel pi_block(double omega_i) {
  if (!(omega_i > 0.0)) throw ModelError("PI corner omega_i must be positive");
  return tf_to_ss(TransferFunction({1.0, omega_i}, {1.0, 0.0}));
}

std::vector<Block> cglp_chain(const CgLpConfig& cfg, std::optional<double> omega_i) {
  const CgLpRealization r = build_cglp(cfg);
  std::vector<Block> chain{r.reset_part, tf_to_ss(r.lead_part)};
  if (omega_i) chain.emplace_back(pi_block(*omega_i));
  return chain;
}

LoopSpec make_cglp_loop(const TransferFunction& plant, const CgLpConfig& cfg, double omega_c,
                        std::optional<double> omega_i, double ts) {
  LoopSpec loop;
  loop.plant = tf_to_ss(plant);
  loop.chain = cglp_chain(cfg, omega_i);
  loop.ts = ts;
  loop.k_p = tune_kp(loop, omega_c);
  return loop;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const SimResult& result) {
  out << "t,r,e,u,y,n\n";
  for (std::size_t k = 0; k < result.size(); ++k) {
    out << format_number(result.t[k]) << ',' << format_number(result.r[k]) << ','
        << format_number(result.e[k]) << ',' << format_number(result.u[k]) << ','
        << format_number(result.y[k]) << ',' << format_number(result.n[k]) << '\n';
  }
}

}  // namespace resetkit
