#include "resetkit/cglp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

#include "resetkit/error.hpp"
#include "resetkit/numeric.hpp"

namespace resetkit {
namespace {

constexpr int kGridSize = 20;  // -0.9, -0.8, ..., 0.9, 1.0
constexpr double kGridStep = 0.1;
constexpr double kFlatLo = 1e-4;  // omega / omega_ra
constexpr double kFlatHi = 1e5;
constexpr double kFlatDensity = 80.0;

double grid_gamma(int i) {
  return i == kGridSize - 1 ? 1.0 : kGammaMin + kGridStep * i;
}

void require_gamma(double gamma, const char* who) {
  if (!(gamma >= kGammaMin - 1e-12 && gamma <= kGammaMax + 1e-12)) {
    std::ostringstream msg;
    msg << who << ": gamma = " << gamma << " outside [" << kGammaMin << ", " << kGammaMax << "]";
    throw ModelError(msg.str());
  }
}

void require_order(int order) {
  if (order != 1 && order != 2) throw ModelError("CgLp order must be 1 or 2");
}

// Describing function of the unit-corner reset element on the flatness grid.
struct UnitResponse {
  std::vector<double> x;
  std::vector<Complex> df;
};

UnitResponse unit_response(int order, double gamma) {
  const ResetSystem rs = order == 1 ? make_gfore(1.0, gamma) : make_gsore(1.0, 1.0, gamma);
  UnitResponse out;
  out.x = log_grid(kFlatLo, kFlatHi, kFlatDensity);
  out.df.reserve(out.x.size());
  for (double x : out.x) out.df.push_back(describing_function(rs, x));
  return out;
}

double flatness(const UnitResponse& unit, int order, double alpha1, double alpha2) {
  double worst = 0.0;
  for (std::size_t i = 0; i < unit.x.size(); ++i) {
    const Complex s(0.0, unit.x[i] / alpha1);  // s / omega_r with omega_r = alpha1 omega_ra
    const Complex lead = order == 1 ? s + 1.0 : s * s + 2.0 * alpha2 * s + 1.0;
    worst = std::max(worst, std::abs(to_db(std::abs(unit.df[i] * lead))));
  }
  return worst;
}

double fit_first(double gamma) {
  if (gamma == 1.0) return 1.0;
  const UnitResponse unit = unit_response(1, gamma);
  auto objective = [&](double log_alpha) { return flatness(unit, 1, std::exp(log_alpha), 1.0); };
  const std::vector<double> grid = log_grid(0.5, 200.0, 100.0);
  std::size_t best = 0;
  double best_val = objective(std::log(grid[0]));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = objective(std::log(grid[i]));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == grid.size()) {
    std::ostringstream msg;
    msg << "correction_factor_first: flatness optimum for gamma = " << gamma
        << " lies outside alpha in [0.5, 200] (best deviation " << best_val << " dB)";
    throw ConvergenceError(msg.str());
  }
  const auto opt = numeric::golden_section_minimize(objective, std::log(grid[best - 1]),
                                                    std::log(grid[best + 1]), 1e-10);
  return std::exp(opt.x);
}

CorrectionFactors fit_second(double gamma, const CorrectionFactors& start) {
  if (gamma == 1.0) return {1.0, 1.0};
  const UnitResponse unit = unit_response(2, gamma);
  auto objective = [&](const std::vector<double>& p) {
    return flatness(unit, 2, std::exp(p[0]), std::exp(p[1]));
  };
  numeric::SimplexOptions opts;
  opts.initial_step = 0.1;
  opts.x_tol = 1e-8;
  opts.f_tol = 1e-11;
  opts.max_evaluations = 6000;
  auto result = numeric::nelder_mead(objective, {std::log(start.alpha1), std::log(start.alpha2)},
                                     opts);
  // Restart from the optimum to escape a collapsed simplex.
  result = numeric::nelder_mead(objective, result.x, opts);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "correction_factors_second: Nelder-Mead did not converge for gamma = " << gamma
        << " after " << result.evaluations << " evaluations (alpha1 = " << std::exp(result.x[0])
        << ", alpha2 = " << std::exp(result.x[1]) << ", deviation " << result.value << " dB)";
    throw ConvergenceError(msg.str());
  }
  return {std::exp(result.x[0]), std::exp(result.x[1])};
}

// Write-once table of correction factors on the gamma grid. The second-order
// fit is a continuation from the linear limit gamma = 1 downwards.
class CorrectionTable {
 public:
  const std::array<CorrectionFactors, kGridSize>& get(int order) {
    if (order == 1) {
      std::call_once(first_once_, [this] {
        for (int i = 0; i < kGridSize; ++i) first_[i] = {fit_first(grid_gamma(i)), 1.0};
      });
      return first_;
    }
    std::call_once(second_once_, [this] {
      CorrectionFactors previous{1.0, 1.0};
      for (int i = kGridSize - 1; i >= 0; --i) {
        second_[i] = fit_second(grid_gamma(i), previous);
        previous = second_[i];
      }
    });
    return second_;
  }

 private:
  std::once_flag first_once_;
  std::once_flag second_once_;
  std::array<CorrectionFactors, kGridSize> first_{};
  std::array<CorrectionFactors, kGridSize> second_{};
};

CorrectionTable& table() {
  static CorrectionTable instance;
  return instance;
}

CgLpConfig with_omega_r(int order, double gamma, double omega_r, double omega_t,
                        int taming_poles) {
  CgLpConfig cfg;
  cfg.order = order;
  cfg.gamma = gamma;
  cfg.omega_r = omega_r;
  cfg.omega_t = omega_t;
  cfg.taming_poles = taming_poles;
  cfg.correction = correction_factors(order, gamma);
  return cfg;
}

void require_design_inputs(int order, double gamma, double theta_deg, double omega_c,
                           double omega_t) {
  require_order(order);
  require_gamma(gamma, "solve_omega_r");
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) {
    throw ModelError("phase target theta must lie in (0, 180) degrees");
  }
  if (!(omega_c > 0.0) || !(omega_t > omega_c)) {
    throw ModelError("need 0 < omega_c < omega_t");
  }
}

}  // namespace

void CgLpConfig::validate() const {
  require_order(order);
  require_gamma(gamma, "CgLpConfig");
  if (!(omega_r > 0.0) || !(omega_t > 0.0)) {
    std::ostringstream msg;
    msg << "CgLpConfig: omega_r and omega_t must be positive (omega_r = " << omega_r
        << ", omega_t = " << omega_t << ")";
    throw ModelError(msg.str());
  }
  if (!(beta_r_alpha > 0.0)) throw ModelError("CgLpConfig: beta_r_alpha must be positive");
  if (taming_poles < 0 || taming_poles > 2) {
    throw ModelError("CgLpConfig: taming_poles must be 0 (order default), 1 or 2");
  }
  if (correction && !(correction->alpha1 > 0.0 && correction->alpha2 > 0.0)) {
    throw ModelError("CgLpConfig: correction factors must be positive");
  }
}

ResetSystem make_gfore(double omega_ra, double gamma) {
  if (!(omega_ra > 0.0)) throw ModelError("make_gfore: omega_ra must be positive");
  ResetSystem rs;
  rs.base.a = Matrix::Constant(1, 1, -omega_ra);
  rs.base.b = Vector::Constant(1, omega_ra);
  rs.base.c = RowVector::Constant(1, 1.0);
  rs.base.d = 0.0;
  rs.reset_matrix = Matrix::Constant(1, 1, gamma);
  return rs;
}

ResetSystem make_gsore(double omega_ra, double beta_ra, double gamma) {
  if (!(omega_ra > 0.0)) throw ModelError("make_gsore: omega_ra must be positive");
  if (!(beta_ra > 0.0)) throw ModelError("make_gsore: beta_ra must be positive");
  ResetSystem rs;
  rs.base.a.resize(2, 2);
  rs.base.a << 0.0, 1.0, -omega_ra * omega_ra, -2.0 * beta_ra * omega_ra;
  rs.base.b.resize(2);
  rs.base.b << 0.0, omega_ra * omega_ra;
  rs.base.c.resize(2);
  rs.base.c << 1.0, 0.0;
  rs.base.d = 0.0;
  rs.reset_matrix = gamma * Matrix::Identity(2, 2);
  return rs;
}

ResetSystem make_clegg_integrator() {
  ResetSystem rs;
  rs.base.a = Matrix::Zero(1, 1);
  rs.base.b = Vector::Constant(1, 1.0);
  rs.base.c = RowVector::Constant(1, 1.0);
  rs.reset_matrix = Matrix::Zero(1, 1);
  return rs;
}

double flatness_deviation_db(int order, double gamma, const CorrectionFactors& factors) {
  require_order(order);
  require_gamma(gamma, "flatness_deviation_db");
  return flatness(unit_response(order, gamma), order, factors.alpha1, factors.alpha2);
}

CorrectionFactors correction_factors(int order, double gamma) {
  require_order(order);
  require_gamma(gamma, "correction_factors");
  gamma = std::clamp(gamma, kGammaMin, kGammaMax);
  const auto& nodes = table().get(order);
  const double pos = (gamma - kGammaMin) / kGridStep;
  const int i = std::clamp(static_cast<int>(std::floor(pos + 1e-9)), 0, kGridSize - 1);
  if (i == kGridSize - 1 || std::abs(gamma - grid_gamma(i)) < 1e-9) return nodes[i];
  const double t = (gamma - grid_gamma(i)) / (grid_gamma(i + 1) - grid_gamma(i));
  return {nodes[i].alpha1 + t * (nodes[i + 1].alpha1 - nodes[i].alpha1),
          nodes[i].alpha2 + t * (nodes[i + 1].alpha2 - nodes[i].alpha2)};
}

double correction_factor_first(double gamma) { return correction_factors(1, gamma).alpha1; }

CorrectionFactors correction_factors_second(double gamma) { return correction_factors(2, gamma); }

CorrectionFactors resolved_correction(const CgLpConfig& cfg) {
  return cfg.correction ? *cfg.correction : correction_factors(cfg.order, cfg.gamma);
}

double omega_r_alpha(const CgLpConfig& cfg) {
  return cfg.omega_r / resolved_correction(cfg).alpha1;
}

double beta_r(const CgLpConfig& cfg) {
  return cfg.order == 2 ? cfg.beta_r_alpha * resolved_correction(cfg).alpha2 : 0.0;
}

CgLpRealization build_cglp(const CgLpConfig& cfg) {
  cfg.validate();
  const CorrectionFactors f = resolved_correction(cfg);
  const double w_ra = cfg.omega_r / f.alpha1;
  const int poles = cfg.taming_poles == 0 ? cfg.order : cfg.taming_poles;

  std::vector<double> den{1.0};
  for (int i = 0; i < poles; ++i) den = poly_multiply(den, std::vector<double>{1.0 / cfg.omega_t, 1.0});

  if (cfg.order == 1) {
    return {make_gfore(w_ra, cfg.gamma),
            TransferFunction({1.0 / cfg.omega_r, 1.0}, std::move(den))};
  }
  const double br = cfg.beta_r_alpha * f.alpha2;
  return {make_gsore(w_ra, cfg.beta_r_alpha, cfg.gamma),
          TransferFunction({1.0 / (cfg.omega_r * cfg.omega_r), 2.0 * br / cfg.omega_r, 1.0},
                           std::move(den))};
}

Complex cglp_df(const CgLpConfig& cfg, double omega) {
  const CgLpRealization r = build_cglp(cfg);
  return describing_function(r.reset_part, omega) * freq_response(r.lead_part, omega);
}

double design_phase(int order, double gamma, double b, double omega_c, double omega_t,
                    int taming_poles, PhaseReference reference) {
  const CgLpConfig cfg = with_omega_r(order, gamma, omega_c / b, omega_t, taming_poles);
  const Complex g = cglp_df(cfg, omega_c);
  if (reference == PhaseReference::tamed) return phase_deg(g);
  const int poles = taming_poles == 0 ? order : taming_poles;
  const Complex taming = std::pow(Complex(1.0, omega_c / omega_t), poles);
  return phase_deg(g * taming) - kTamingAllowanceDeg;
}

double max_phase_lead(int order, double gamma, double omega_c, double omega_t,
                      int taming_poles, PhaseReference reference) {
  require_order(order);
  require_gamma(gamma, "max_phase_lead");
  auto phase = [&](double log_b) {
    return design_phase(order, gamma, std::exp(log_b), omega_c, omega_t, taming_poles, reference);
  };
  const std::vector<double> grid = log_grid(kBMin, kBMax, 72.0);
  std::size_t best = 0;
  double best_val = phase(std::log(grid[0]));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = phase(std::log(grid[i]));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == grid.size()) return best_val;
  const auto opt = numeric::golden_section_minimize([&](double lb) { return -phase(lb); },
                                                    std::log(grid[best - 1]),
                                                    std::log(grid[best + 1]), 1e-9);
  return std::max(best_val, -opt.value);
}

double solve_omega_r(int order, double gamma, double theta_deg, double omega_c, double omega_t,
                     int taming_poles, PhaseReference reference) {
  require_design_inputs(order, gamma, theta_deg, omega_c, omega_t);
  auto residual = [&](double log_b) {
    return design_phase(order, gamma, std::exp(log_b), omega_c, omega_t, taming_poles, reference) -
           theta_deg;
  };
  const std::vector<double> grid = log_grid(kBMin, kBMax, 72.0);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = residual(std::log(grid[i]));

  if (values.front() >= 0.0) {
    std::ostringstream msg;
    msg << "infeasible combination: gamma = " << gamma << " already exceeds " << theta_deg
        << " deg at b = " << kBMin << " (solution below the b bracket)";
    throw InfeasibleDesign(msg.str());
  }
  // First upward crossing along the grid.
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (values[i] < 0.0 && values[i + 1] >= 0.0) {
      return std::exp(
          numeric::bisect(residual, std::log(grid[i]), std::log(grid[i + 1]), 1e-13));
    }
  }
  // The phase may peak above theta between two grid points.
  const double peak = max_phase_lead(order, gamma, omega_c, omega_t, taming_poles, reference);
  if (peak >= theta_deg) {
    const auto it = std::max_element(values.begin(), values.end());
    const auto i = static_cast<std::size_t>(std::distance(values.begin(), it));
    const double lo = std::log(grid[i == 0 ? 0 : i - 1]);
    const auto opt = numeric::golden_section_minimize(
        [&](double lb) { return -residual(lb); }, lo, std::log(grid[std::min(i + 1, grid.size() - 1)]),
        1e-12);
    return std::exp(numeric::bisect(residual, lo, opt.x, 1e-13));
  }
  std::ostringstream msg;
  msg.precision(4);
  msg << "infeasible combination: order " << order << " CgLp with gamma = " << gamma
      << " reaches at most " << peak << " deg of phase lead at omega_c (requested "
      << theta_deg << " deg) for b in [" << kBMin << ", " << kBMax << "]";
  throw InfeasibleDesign(msg.str());
}

CgLpConfig design_cglp(int order, double gamma, double theta_deg, double omega_c,
                       double omega_t, int taming_poles, PhaseReference reference) {
  const double b =
      solve_omega_r(order, gamma, theta_deg, omega_c, omega_t, taming_poles, reference);
  return with_omega_r(order, gamma, omega_c / b, omega_t, taming_poles);
}

}  // namespace resetkit
