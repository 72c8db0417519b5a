#pragma once

// Frequency-domain description of reset systems
//
//   x' = A_r x + B_r e     while e != 0
//   x+ = A_rho x           when  e == 0
//   u  = C_r x + D_r e
//
// under a sinusoidal input e(t) = sin(omega t): the reset contribution matrix
// Theta_D(omega), the first-harmonic describing function, the higher-order
// sinusoidal input describing functions (HOSIDF) and a time-domain oracle
// that recovers the same harmonics by simulation and correlation.

#include <optional>
#include <vector>

#include "resetkit/lti.hpp"

namespace resetkit {

/// Base linear system plus reset matrix.
struct ResetSystem {
  StateSpaceModel base;  ///< continuous (A_r, B_r, C_r, D_r)
  Matrix reset_matrix;   ///< A_rho, same size as A_r

  /// Throws ModelError if the base is discrete or A_rho does not match A_r.
  void validate() const;

  /// Spectral radius of A_r; the corner frequency of GFORE/GSORE elements.
  double characteristic_frequency() const;
};

/// n-th harmonic gain: amplitude/phase of the n-th output harmonic per unit
/// input amplitude.
struct HarmonicResponse {
  double omega = 0.0;
  int order = 1;
  Complex value;
};

/// Peak of |G(j omega, n)| over frequency.
struct HarmonicPeak {
  double omega_p = 0.0;       ///< rad/s
  double magnitude_db = 0.0;  ///< M_p, 20 log10 |G(j omega_p, n)|
};

/// Theta_D(omega) =
///   -2 omega^2 / pi (I + E) ((I + A_rho E)^{-1} A_rho (I + E) - I) (omega^2 I + A_r^2)^{-1}
/// with E = exp(pi A_r / omega). Real-valued.
/// Throws SingularityError when (I + A_rho E) or (omega^2 I + A_r^2) is singular.
Matrix theta_d(const ResetSystem& rs, double omega);

/// First-harmonic gain C_r (j omega I - A_r)^{-1} (I + j Theta_D) B_r + D_r.
Complex describing_function(const ResetSystem& rs, double omega);

/// n-th harmonic gain. n == 1 is the describing function; even n >= 2 is
/// exactly zero; odd n >= 3 is C_r (j n omega I - A_r)^{-1} j Theta_D B_r.
Complex hosidf(const ResetSystem& rs, double omega, int n);

struct PeakSearchOptions {
  int order = 3;
  std::optional<double> omega_lo;  ///< default: characteristic frequency / 100
  std::optional<double> omega_hi;  ///< default: characteristic frequency * 100
  double points_per_decade = 400.0;
};

/// Log-grid scan of |G(j omega, n)| followed by golden-section refinement in
/// log omega. If the grid maximum lies on the bracket edge the bracket is
/// widened once by two decades on both sides; a second edge hit throws
/// ConvergenceError asking for a wider bracket.
HarmonicPeak harmonic_peak(const ResetSystem& rs, const PeakSearchOptions& options = {});

struct OracleOptions {
  int samples_per_period = 4000;  ///< rounded up to an even number, at least 4000
  int analysis_periods = 5;       ///< at least 5
  int max_periods = 400;
  double settle_tolerance = 1e-10;
};

/// Simulates the reset law under e(t) = sin(omega t) with fixed-step RK4,
/// resetting at samples where e changes sign or is exactly zero, waits for
/// the periodic steady state and correlates u(t) with exp(-j n omega t) over
/// an integer number of periods. Returns harmonics 1..n_max.
/// Throws ConvergenceError ("no steady state") if the state does not settle.
std::vector<HarmonicResponse> fft_harmonic_oracle(const ResetSystem& rs, double omega,
                                                  int n_max, const OracleOptions& options = {});

}  // namespace resetkit
