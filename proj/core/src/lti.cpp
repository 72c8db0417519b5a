#include "resetkit/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "resetkit/error.hpp"

namespace resetkit {
namespace {

std::vector<double> strip_leading_zeros(std::vector<double> p) {
  auto first = std::find_if(p.begin(), p.end(), [](double v) { return v != 0.0; });
  p.erase(p.begin(), first);
  return p;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_same_sampling(const StateSpaceModel& a, const StateSpaceModel& b) {
  if (a.sample_time.period != b.sample_time.period) {
    throw ModelError("series: blocks have different sample times");
  }
}

// Solves (s I - A) x = B and reports an imaginary-axis pole on failure.
Eigen::VectorXcd resolvent_apply(const StateSpaceModel& model, Complex s) {
  const Eigen::Index n = model.order();
  Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - model.a.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-13)) {
    std::vector<Complex> p = poles(model);
    auto nearest = std::min_element(p.begin(), p.end(), [s](Complex x, Complex y) {
      return std::abs(x - s) < std::abs(y - s);
    });
    std::ostringstream msg;
    msg << "resolvent (sI - A) is singular at s = " << s;
    if (nearest != p.end()) msg << "; the model has a pole at " << *nearest;
    throw SingularityError(msg.str());
  }
  return lu.solve(model.b.cast<Complex>());
}

}  // namespace

TransferFunction::TransferFunction(std::vector<double> num, std::vector<double> den)
    : num_(strip_leading_zeros(std::move(num))), den_(strip_leading_zeros(std::move(den))) {
  if (den_.empty()) throw ModelError("transfer function denominator is zero");
  if (num_.empty()) num_ = {0.0};
  if (!all_finite(num_) || !all_finite(den_)) {
    throw ModelError("transfer function has non-finite coefficients");
  }
  if (num_degree() > den_degree() + 1) {
    throw ModelError("transfer function numerator degree exceeds denominator degree + 1");
  }
}

TransferFunction TransferFunction::gain(double k) { return TransferFunction({k}, {1.0}); }

Complex TransferFunction::evaluate(Complex s) const {
  const Complex den = poly_evaluate(den_, s);
  double scale = 0.0;
  double power = 1.0;
  for (auto it = den_.rbegin(); it != den_.rend(); ++it) {
    scale += std::abs(*it) * power;
    power *= std::abs(s);
  }
  if (std::abs(den) <= 1e-14 * scale) {
    std::ostringstream msg;
    msg << "transfer function denominator vanishes at s = " << s;
    throw SingularityError(msg.str());
  }
  return poly_evaluate(num_, s) / den;
}

void StateSpaceModel::validate() const {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n || c.size() != n) {
    std::ostringstream msg;
    msg << "state-space dimensions inconsistent: A " << a.rows() << "x" << a.cols()
        << ", B " << b.size() << ", C " << c.size();
    throw ModelError(msg.str());
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite() || !std::isfinite(d)) {
    throw ModelError("state-space model has non-finite entries");
  }
  if (sample_time.period && !(*sample_time.period > 0.0)) {
    throw ModelError("discrete sample time must be positive");
  }
}

StateSpaceModel static_gain(double k) {
  return StateSpaceModel{Matrix(0, 0), Vector(0), RowVector(0), k, SampleTime::continuous()};
}

StateSpaceModel tf_to_ss(const TransferFunction& tf) {
  if (!tf.is_proper()) {
    std::ostringstream msg;
    msg << "cannot realize improper transfer function (numerator degree "
        << tf.num_degree() << " > denominator degree " << tf.den_degree() << ")";
    throw ModelError(msg.str());
  }
  const int n = tf.den_degree();
  const double lead = tf.den().front();
  std::vector<double> den(tf.den().size());
  std::transform(tf.den().begin(), tf.den().end(), den.begin(),
                 [lead](double v) { return v / lead; });
  // Numerator padded to n+1 coefficients and normalized alongside den.
  std::vector<double> num(static_cast<std::size_t>(n) + 1, 0.0);
  const auto offset = num.size() - tf.num().size();
  for (std::size_t i = 0; i < tf.num().size(); ++i) num[offset + i] = tf.num()[i] / lead;

  StateSpaceModel ss;
  ss.d = num[0];
  ss.a = Matrix::Zero(n, n);
  ss.b = Vector::Zero(n);
  ss.c = RowVector::Zero(n);
  if (n > 0) {
    for (int j = 0; j < n; ++j) {
      ss.a(0, j) = -den[static_cast<std::size_t>(j) + 1];
      ss.c(j) = num[static_cast<std::size_t>(j) + 1] - den[static_cast<std::size_t>(j) + 1] * ss.d;
    }
    for (int i = 1; i < n; ++i) ss.a(i, i - 1) = 1.0;
    ss.b(0) = 1.0;
  }
  return ss;
}

Complex evaluate_at(const StateSpaceModel& model, Complex s) {
  if (model.order() == 0) return model.d;
  const Eigen::VectorXcd x = resolvent_apply(model, s);
  return (model.c.cast<Complex>() * x)(0) + model.d;
}

Complex freq_response(const StateSpaceModel& model, double omega) {
  model.validate();
  if (model.is_discrete()) {
    return evaluate_at(model, std::polar(1.0, omega * *model.sample_time.period));
  }
  return evaluate_at(model, Complex(0.0, omega));
}

Complex freq_response(const TransferFunction& tf, double omega) {
  return tf.evaluate(Complex(0.0, omega));
}

Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw ModelError("matrix_exponential: matrix is not square");
  if (!m.allFinite()) throw ModelError("matrix_exponential: non-finite entries");
  const Eigen::Index n = m.rows();
  if (n == 0) return m;

  // Scale so that ||M / 2^j||_inf <= 1/2, evaluate the (6,6) Padé
  // approximant, then square j times.
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int j = 0;
  if (norm > 0.0) j = std::max(0, 1 + static_cast<int>(std::floor(std::log2(norm))));
  const Matrix a = m / std::ldexp(1.0, j);

  constexpr int q = 6;
  const Matrix identity = Matrix::Identity(n, n);
  Matrix x = identity;
  Matrix num = identity;
  Matrix den = identity;
  double c = 1.0;
  for (int k = 1; k <= q; ++k) {
    c *= static_cast<double>(q - k + 1) / static_cast<double>((2 * q - k + 1) * k);
    x = a * x;
    num += c * x;
    den += ((k % 2 == 0) ? c : -c) * x;
  }
  Matrix f = den.partialPivLu().solve(num);
  for (int k = 0; k < j; ++k) f = f * f;
  return f;
}

StateSpaceModel tustin_discretize(const StateSpaceModel& model, double ts) {
  model.validate();
  if (model.is_discrete()) throw ModelError("tustin_discretize: model is already discrete");
  if (!(ts > 0.0)) throw ModelError("tustin_discretize: sample time must be positive");
  const Eigen::Index n = model.order();
  StateSpaceModel out;
  out.sample_time = SampleTime::discrete(ts);
  if (n == 0) {
    out.a = Matrix(0, 0);
    out.b = Vector(0);
    out.c = RowVector(0);
    out.d = model.d;
    return out;
  }
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix m = identity - model.a * (ts / 2.0);
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) {
    throw SingularityError("tustin_discretize: (I - A Ts/2) is singular");
  }
  const Matrix m_inv = lu.inverse();
  out.a = m_inv * (identity + model.a * (ts / 2.0));
  out.b = m_inv * model.b * ts;
  out.c = model.c * m_inv;
  out.d = model.d + (model.c * m_inv * model.b)(0) * ts / 2.0;
  return out;
}

StateSpaceModel zoh_discretize(const StateSpaceModel& model, double ts) {
  model.validate();
  if (model.is_discrete()) throw ModelError("zoh_discretize: model is already discrete");
  if (!(ts > 0.0)) throw ModelError("zoh_discretize: sample time must be positive");
  const Eigen::Index n = model.order();
  StateSpaceModel out = model;
  out.sample_time = SampleTime::discrete(ts);
  if (n == 0) return out;
  // exp([A B; 0 0] Ts) = [Ad Bd; 0 1]
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = model.a;
  aug.topRightCorner(n, 1) = model.b;
  const Matrix phi = matrix_exponential(aug * ts);
  out.a = phi.topLeftCorner(n, n);
  out.b = phi.topRightCorner(n, 1);
  return out;
}

TransferFunction series(const TransferFunction& first, const TransferFunction& second) {
  return TransferFunction(poly_multiply(first.num(), second.num()),
                          poly_multiply(first.den(), second.den()));
}

StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
  first.validate();
  second.validate();
  require_same_sampling(first, second);
  const Eigen::Index n1 = first.order();
  const Eigen::Index n2 = second.order();
  StateSpaceModel out;
  out.sample_time = first.sample_time;
  out.a = Matrix::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = first.a;
  out.a.bottomRightCorner(n2, n2) = second.a;
  out.a.bottomLeftCorner(n2, n1) = second.b * first.c;
  out.b = Vector(n1 + n2);
  out.b.head(n1) = first.b;
  out.b.tail(n2) = second.b * first.d;
  out.c = RowVector(n1 + n2);
  out.c.head(n1) = second.d * first.c;
  out.c.tail(n2) = second.c;
  out.d = second.d * first.d;
  return out;
}

std::vector<double> simulate_discrete(const StateSpaceModel& model,
                                      std::span<const double> input) {
  model.validate();
  if (!model.is_discrete()) throw ModelError("simulate_discrete: model is continuous");
  std::vector<double> y;
  y.reserve(input.size());
  Vector x = Vector::Zero(model.order());
  for (double u : input) {
    y.push_back(model.c.dot(x) + model.d * u);
    x = model.a * x + model.b * u;
  }
  return y;
}

std::vector<Complex> poles(const StateSpaceModel& model) {
  if (model.order() == 0) return {};
  Eigen::EigenSolver<Matrix> es(model.a, false);
  std::vector<Complex> out(es.eigenvalues().begin(), es.eigenvalues().end());
  return out;
}

std::vector<double> poly_multiply(std::span<const double> p, std::span<const double> q) {
  if (p.empty() || q.empty()) return {};
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

Complex poly_evaluate(std::span<const double> p, Complex s) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ModelError("logspace: need 0 < lo <= hi");
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + step * static_cast<double>(i));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> log_grid(double lo, double hi, double points_per_decade) {
  if (!(points_per_decade > 0.0)) throw ModelError("log_grid: density must be positive");
  const double decades = std::log10(hi / lo);
  const auto count = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
  return logspace(lo, hi, std::max<std::size_t>(count, 2));
}

}  // namespace resetkit
