#pragma once

// SISO linear time-invariant building blocks: transfer functions, state-space
// models, frequency response, composition and discretization.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace resetkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;

/// Rational transfer function num(s)/den(s), coefficients in descending powers.
///
/// Leading zeros are stripped on construction. The denominator must have a
/// nonzero leading coefficient and deg(num) <= deg(den) + 1.
class TransferFunction {
 public:
  TransferFunction(std::vector<double> num, std::vector<double> den);

  static TransferFunction gain(double k);

  const std::vector<double>& num() const noexcept { return num_; }
  const std::vector<double>& den() const noexcept { return den_; }

  int num_degree() const noexcept { return static_cast<int>(num_.size()) - 1; }
  int den_degree() const noexcept { return static_cast<int>(den_.size()) - 1; }
  bool is_proper() const noexcept { return num_degree() <= den_degree(); }

  /// num(s)/den(s) at an arbitrary complex point.
  Complex evaluate(Complex s) const;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
};

/// Sampling marker of a state-space model. Empty period = continuous time.
struct SampleTime {
  std::optional<double> period;

  static SampleTime continuous() { return {}; }
  static SampleTime discrete(double ts) { return {ts}; }
  bool is_discrete() const noexcept { return period.has_value(); }
};

/// SISO state-space model x' = A x + B u, y = C x + D u (or the discrete
/// recursion when `sample_time` is discrete). A static gain has zero states.
struct StateSpaceModel {
  Matrix a;
  Vector b;
  RowVector c;
  double d = 0.0;
  SampleTime sample_time;

  Eigen::Index order() const noexcept { return a.rows(); }
  bool is_discrete() const noexcept { return sample_time.is_discrete(); }

  /// Throws ModelError on inconsistent dimensions or non-finite entries.
  void validate() const;
};

StateSpaceModel static_gain(double k);

/// Controllable canonical realization. Throws ModelError when tf is improper.
StateSpaceModel tf_to_ss(const TransferFunction& tf);

/// Complex gain at angular frequency omega (rad/s). Continuous models are
/// evaluated at s = j*omega; discrete ones at z = exp(j*omega*Ts).
/// Throws SingularityError when omega hits an undamped pole.
Complex freq_response(const StateSpaceModel& model, double omega);
Complex freq_response(const TransferFunction& tf, double omega);

/// C (sI - A)^{-1} B + D at an arbitrary complex point s.
Complex evaluate_at(const StateSpaceModel& model, Complex s);

/// exp(M) by Padé(6) scaling and squaring. Throws ModelError on NaN/Inf.
Matrix matrix_exponential(const Matrix& m);

/// Bilinear (Tustin) discretization:
///   Ad = M^{-1}(I + A Ts/2), Bd = M^{-1} B Ts, Cd = C M^{-1},
///   Dd = D + C M^{-1} B Ts/2,  with M = I - A Ts/2.
StateSpaceModel tustin_discretize(const StateSpaceModel& model, double ts);

/// Zero-order-hold discretization, exact for piecewise-constant input.
StateSpaceModel zoh_discretize(const StateSpaceModel& model, double ts);

/// Series connection: input -> first -> second -> output.
TransferFunction series(const TransferFunction& first,
                        const TransferFunction& second);
StateSpaceModel series(const StateSpaceModel& first,
                       const StateSpaceModel& second);

/// Runs a discrete model from zero initial state over the input sequence.
std::vector<double> simulate_discrete(const StateSpaceModel& model,
                                      std::span<const double> input);

/// Eigenvalues of A (poles of the realization).
std::vector<Complex> poles(const StateSpaceModel& model);

/// Polynomial helpers (descending powers).
std::vector<double> poly_multiply(std::span<const double> p,
                                  std::span<const double> q);
Complex poly_evaluate(std::span<const double> p, Complex s);

/// `count` log-spaced points covering [lo, hi] inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t count);

/// Log-spaced grid with the given density per decade (at least 2 points).
std::vector<double> log_grid(double lo, double hi, double points_per_decade);

inline double to_db(double magnitude) { return 20.0 * std::log10(magnitude); }
inline double phase_deg(Complex z) { return std::arg(z) * 180.0 / std::numbers::pi; }

}  // namespace resetkit
