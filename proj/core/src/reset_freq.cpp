#include "resetkit/reset_freq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "resetkit/error.hpp"
#include "resetkit/numeric.hpp"

namespace resetkit {
namespace {

using std::numbers::pi;
constexpr Complex kJ{0.0, 1.0};

void require_positive_frequency(double omega, const char* who) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    std::ostringstream msg;
    msg << who << ": frequency must be positive and finite (got " << omega << ")";
    throw ModelError(msg.str());
  }
}

// C (s I - A)^{-1} rhs
Complex resolvent_output(const ResetSystem& rs, Complex s, const Eigen::VectorXcd& rhs) {
  const Eigen::Index n = rs.base.order();
  Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - rs.base.a.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-13)) {
    std::ostringstream msg;
    msg << "resolvent (sI - A_r) is singular at s = " << s;
    throw SingularityError(msg.str());
  }
  return (rs.base.c.cast<Complex>() * lu.solve(rhs))(0);
}

}  // namespace

void ResetSystem::validate() const {
  base.validate();
  if (base.is_discrete()) throw ModelError("reset system base must be continuous");
  if (reset_matrix.rows() != base.order() || reset_matrix.cols() != base.order()) {
    std::ostringstream msg;
    msg << "reset matrix is " << reset_matrix.rows() << "x" << reset_matrix.cols()
        << " but the base system has " << base.order() << " states";
    throw ModelError(msg.str());
  }
  if (!reset_matrix.allFinite()) throw ModelError("reset matrix has non-finite entries");
}

double ResetSystem::characteristic_frequency() const {
  if (base.order() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(base.a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix theta_d(const ResetSystem& rs, double omega) {
  rs.validate();
  require_positive_frequency(omega, "theta_d");
  const Eigen::Index n = rs.base.order();
  const Matrix& a = rs.base.a;
  const Matrix& a_rho = rs.reset_matrix;
  const Matrix identity = Matrix::Identity(n, n);
  if (n == 0) return Matrix(0, 0);
  // No reset action: the bracket vanishes identically, skip the rounding.
  if (a_rho == identity) return Matrix::Zero(n, n);

  const Matrix e = matrix_exponential(a * (pi / omega));
  const Matrix i_plus_e = identity + e;

  Eigen::FullPivLU<Matrix> reset_lu(identity + a_rho * e);
  if (!reset_lu.isInvertible() || reset_lu.rcond() < 1e-12) {
    std::ostringstream msg;
    msg << "reset-matrix singularity at omega = " << omega
        << " rad/s: (I + A_rho exp(pi A_r / omega)) is not invertible";
    throw SingularityError(msg.str());
  }
  Eigen::FullPivLU<Matrix> q_lu(omega * omega * identity + a * a);
  if (!q_lu.isInvertible() || q_lu.rcond() < 1e-12) {
    std::ostringstream msg;
    msg << "theta_d: (omega^2 I + A_r^2) is singular at omega = " << omega << " rad/s";
    throw SingularityError(msg.str());
  }
  const Matrix bracket = reset_lu.solve(a_rho * i_plus_e) - identity;
  return (-2.0 * omega * omega / pi) * i_plus_e * bracket * q_lu.inverse();
}

Complex describing_function(const ResetSystem& rs, double omega) {
  const Matrix theta = theta_d(rs, omega);
  if (rs.base.order() == 0) return rs.base.d;
  const Eigen::VectorXcd rhs =
      rs.base.b.cast<Complex>() + kJ * (theta * rs.base.b).cast<Complex>();
  return resolvent_output(rs, Complex(0.0, omega), rhs) + rs.base.d;
}

Complex hosidf(const ResetSystem& rs, double omega, int n) {
  if (n < 1) throw ModelError("hosidf: harmonic order must be >= 1");
  if (n == 1) return describing_function(rs, omega);
  rs.validate();
  require_positive_frequency(omega, "hosidf");
  if (n % 2 == 0 || rs.base.order() == 0) return Complex(0.0, 0.0);
  const Matrix theta = theta_d(rs, omega);
  const Eigen::VectorXcd rhs = kJ * (theta * rs.base.b).cast<Complex>();
  return resolvent_output(rs, Complex(0.0, omega * n), rhs);
}

HarmonicPeak harmonic_peak(const ResetSystem& rs, const PeakSearchOptions& options) {
  rs.validate();
  const double wc = rs.characteristic_frequency();
  double lo = options.omega_lo.value_or(wc / 100.0);
  double hi = options.omega_hi.value_or(wc * 100.0);
  if (!(lo > 0.0) || !(hi > lo)) {
    throw ModelError("harmonic_peak: need 0 < omega_lo < omega_hi (set the bracket explicitly "
                     "for systems without a corner frequency)");
  }
  auto magnitude = [&](double omega) { return std::abs(hosidf(rs, omega, options.order)); };

  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::vector<double> grid = log_grid(lo, hi, options.points_per_decade);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double m = magnitude(grid[i]);
      if (m > best_mag) {
        best_mag = m;
        best = i;
      }
    }
    if (best == 0 || best + 1 == grid.size()) {
      lo /= 100.0;
      hi *= 100.0;
      continue;
    }
    const auto opt = numeric::golden_section_minimize(
        [&](double log_w) { return -magnitude(std::exp(log_w)); }, std::log(grid[best - 1]),
        std::log(grid[best + 1]), 1e-10);
    return HarmonicPeak{std::exp(opt.x), to_db(-opt.value)};
  }
  std::ostringstream msg;
  msg << "harmonic_peak: maximum of harmonic " << options.order
      << " lies on the bracket edge even after widening to [" << lo * 100.0 << ", "
      << hi / 100.0 << "] rad/s; supply a wider bracket";
  throw ConvergenceError(msg.str());
}

std::vector<HarmonicResponse> fft_harmonic_oracle(const ResetSystem& rs, double omega, int n_max,
                                                  const OracleOptions& options) {
  rs.validate();
  require_positive_frequency(omega, "fft_harmonic_oracle");
  if (n_max < 1) throw ModelError("fft_harmonic_oracle: n_max must be >= 1");
  int samples = std::max(options.samples_per_period, 4000);
  samples += samples % 2;
  const int half = samples / 2;
  const int analysis_periods = std::max(options.analysis_periods, 5);

  const Eigen::Index n = rs.base.order();
  const Matrix& a = rs.base.a;
  const Vector& b = rs.base.b;
  const double period = 2.0 * pi / omega;
  const double h = period / samples;

  // Input within one period; zero crossings land exactly on k = 0 and k = N/2.
  auto input_at = [&](double t_in_period) { return std::sin(omega * t_in_period); };
  auto sample_input = [&](int k) {
    return (k % half == 0) ? 0.0 : std::sin(2.0 * pi * k / samples);
  };

  Vector x = Vector::Zero(n);
  double e_prev = 0.0;
  auto rk4_step = [&](int k) {
    const double t = k * h;
    const double e0 = input_at(t);
    const double em = input_at(t + 0.5 * h);
    const double e1 = input_at(t + h);
    const Vector k1 = a * x + b * e0;
    const Vector k2 = a * (x + 0.5 * h * k1) + b * em;
    const Vector k3 = a * (x + 0.5 * h * k2) + b * em;
    const Vector k4 = a * (x + h * k3) + b * e1;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto apply_reset = [&](double e) {
    if (e == 0.0 || e_prev * e < 0.0) x = rs.reset_matrix * x;
    e_prev = e;
  };

  // Settle: compare the state at consecutive period boundaries.
  apply_reset(sample_input(0));
  Vector boundary = x;
  int stable_boundaries = 0;
  int p = 0;
  for (; p < options.max_periods && stable_boundaries < 2; ++p) {
    for (int k = 0; k < samples; ++k) {
      rk4_step(k);
      apply_reset(sample_input((k + 1) % samples));
    }
    const double scale = std::max(1.0, x.norm());
    stable_boundaries = ((x - boundary).norm() <= options.settle_tolerance * scale)
                            ? stable_boundaries + 1
                            : 0;
    boundary = x;
  }
  if (stable_boundaries < 2) {
    std::ostringstream msg;
    msg << "fft_harmonic_oracle: no steady state after " << options.max_periods
        << " periods at omega = " << omega << " rad/s";
    throw ConvergenceError(msg.str());
  }

  // Trapezoidal correlation; at a reset sample the interval to its right
  // starts from the post-reset output and the one to its left ends at the
  // pre-reset output.
  std::vector<Complex> acc(static_cast<std::size_t>(n_max), Complex(0.0, 0.0));
  auto weight = [&](int harmonic, int k) {
    return kJ * std::polar(1.0, -2.0 * pi * harmonic * k / samples);
  };
  auto output = [&](double e) { return rs.base.c.dot(x) + rs.base.d * e; };
  for (int period_index = 0; period_index < analysis_periods; ++period_index) {
    for (int k = 0; k < samples; ++k) {
      const double u_left = output(sample_input(k));
      rk4_step(k);
      const int k_next = (k + 1) % samples;
      const double e_next = sample_input(k_next);
      const double u_right = output(e_next);
      apply_reset(e_next);
      for (int harmonic = 1; harmonic <= n_max; ++harmonic) {
        acc[static_cast<std::size_t>(harmonic - 1)] +=
            0.5 * h * (u_left * weight(harmonic, k) + u_right * weight(harmonic, k + 1));
      }
    }
  }

  std::vector<HarmonicResponse> out;
  out.reserve(static_cast<std::size_t>(n_max));
  const double norm = 2.0 / (analysis_periods * period);
  for (int harmonic = 1; harmonic <= n_max; ++harmonic) {
    out.push_back({omega, harmonic, acc[static_cast<std::size_t>(harmonic - 1)] * norm});
  }
  return out;
}

}  // namespace resetkit
