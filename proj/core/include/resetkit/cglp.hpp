#pragma once

// Constant-in-gain Lead-in-phase (CgLp) compensators: a generalized first or
// second order reset element (GFORE / GSORE) in series with a linear lead
// filter whose zeros sit at the uncorrected corner of the reset element.
//
//   order 1:  GFORE(omega_ra, gamma) * (s/omega_r + 1) / (s/omega_t + 1)
//   order 2:  GSORE(omega_ra, beta_ra, gamma)
//             * ((s/omega_r)^2 + 2 beta_r s/omega_r + 1) / (s/omega_t + 1)^2
//
// with omega_ra = omega_r / alpha_1 and beta_r = beta_ra * alpha_2. The
// correction factors alpha_1, alpha_2 shift the reset element's corner and
// damping so that the first-harmonic gain of the whole element stays flat.

#include <optional>

#include "resetkit/lti.hpp"
#include "resetkit/reset_freq.hpp"

namespace resetkit {

/// Reset values admitted by the CgLp family. gamma = 1 is the linear limit.
inline constexpr double kGammaMin = -0.9;
inline constexpr double kGammaMax = 1.0;

struct CorrectionFactors {
  double alpha1 = 1.0;  ///< corner shift (alpha for first order)
  double alpha2 = 1.0;  ///< damping correction; 1 for first order
};

struct CgLpConfig {
  int order = 1;              ///< 1 (GFORE based) or 2 (GSORE based)
  double gamma = 0.0;         ///< A_rho = gamma I
  double omega_r = 1.0;       ///< rad/s, lead start frequency
  double omega_t = 5.0;       ///< rad/s, taming frequency
  double beta_r_alpha = 1.0;  ///< damping of the GSORE (order 2 only)
  int taming_poles = 0;       ///< 0 selects `order` taming poles
  /// Correction factors; looked up from the flatness table when empty.
  std::optional<CorrectionFactors> correction;

  /// Throws ModelError when a field is outside its domain.
  void validate() const;
};

struct CgLpRealization {
  ResetSystem reset_part;
  TransferFunction lead_part;
};

/// GFORE 1/(s/omega_ra + 1) with A_rho = [gamma]: A = -omega_ra, B = omega_ra, C = 1.
ResetSystem make_gfore(double omega_ra, double gamma);

/// GSORE 1/((s/omega_ra)^2 + 2 beta_ra s/omega_ra + 1), A_rho = gamma I, in
/// the (output, output-rate) coordinates.
ResetSystem make_gsore(double omega_ra, double beta_ra, double gamma);

/// Clegg integrator 1/s with full reset (A_rho = 0).
ResetSystem make_clegg_integrator();

/// Worst-case |20 log10 |DF|| of the untamed CgLp (reset element times lead
/// numerator) over omega/omega_ra in [1e-4, 1e5]. This is the quantity the
/// correction factors minimize.
double flatness_deviation_db(int order, double gamma, const CorrectionFactors& factors);

/// First-order correction factor alpha(gamma).
double correction_factor_first(double gamma);

/// Second-order correction factors (alpha_1, alpha_2)(gamma).
CorrectionFactors correction_factors_second(double gamma);

/// Correction factors for either order.
CorrectionFactors correction_factors(int order, double gamma);

CorrectionFactors resolved_correction(const CgLpConfig& cfg);
double omega_r_alpha(const CgLpConfig& cfg);
double beta_r(const CgLpConfig& cfg);

CgLpRealization build_cglp(const CgLpConfig& cfg);

/// describing_function(reset_part, omega) * lead_part(j omega).
Complex cglp_df(const CgLpConfig& cfg, double omega);

/// What "phase theta at omega_c" is measured on.
enum class PhaseReference {
  tamed,    ///< the full CgLp describing function
  untamed,  ///< reset part times lead numerator, less kTamingAllowanceDeg
};

/// Phase budget set aside for the taming poles under PhaseReference::untamed.
/// With it the solver reproduces the reference (gamma, b) design values.
inline constexpr double kTamingAllowanceDeg = 10.0;

/// Phase (deg) at omega_c of the design with ratio b, under `reference`.
double design_phase(int order, double gamma, double b, double omega_c, double omega_t,
                    int taming_poles = 0, PhaseReference reference = PhaseReference::tamed);

/// Ratio b = omega_c / omega_r at which design_phase equals theta_deg. The
/// b axis [0.05, 100] is scanned on a log grid and the first upward crossing
/// of theta is bisected. Throws InfeasibleDesign when no b in the bracket
/// reaches theta.
double solve_omega_r(int order, double gamma, double theta_deg, double omega_c,
                     double omega_t, int taming_poles = 0,
                     PhaseReference reference = PhaseReference::tamed);

/// Largest design_phase over b in [0.05, 100].
double max_phase_lead(int order, double gamma, double omega_c, double omega_t,
                      int taming_poles = 0, PhaseReference reference = PhaseReference::tamed);

/// Full configuration for a phase target; omega_r = omega_c / b.
CgLpConfig design_cglp(int order, double gamma, double theta_deg, double omega_c,
                       double omega_t, int taming_poles = 0,
                       PhaseReference reference = PhaseReference::tamed);

inline constexpr double kBMin = 0.05;
inline constexpr double kBMax = 100.0;

}  // namespace resetkit
