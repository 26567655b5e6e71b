// SPDX-License-Identifier: Apache-2.0
#include "dkt/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkt/error.hpp"
#include "dkt/matrix.hpp"

namespace dkt {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    ++i;
  }
  return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
  Matrix m(1, values.size());
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void gemv_add(const Matrix& w, std::span<const double> x, std::span<double> y) {
  if (w.cols() != x.size() || w.rows() != y.size())
    throw ShapeError("gemv_add: " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                     " matrix with x[" + std::to_string(x.size()) + "], y[" +
                     std::to_string(y.size()) + "]");
  const std::size_t cols = w.cols();
  const double* wp = w.values().data();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double* row = wp + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void gemv_transpose_add(const Matrix& w, std::span<const double> y, std::span<double> x) {
  if (w.cols() != x.size() || w.rows() != y.size())
    throw ShapeError("gemv_transpose_add: shape mismatch");
  const std::size_t cols = w.cols();
  const double* wp = w.values().data();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    const double* row = wp + r * cols;
    for (std::size_t c = 0; c < cols; ++c) x[c] += row[c] * yr;
  }
}

void outer_add(Matrix& w, std::span<const double> a, std::span<const double> b) {
  if (w.rows() != a.size() || w.cols() != b.size()) throw ShapeError("outer_add: shape mismatch");
  const std::size_t cols = w.cols();
  double* wp = w.values().data();
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    double* row = wp + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

void add_to(std::span<double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("add_to: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void add_to(Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("add_to: shape mismatch");
  add_to(a.values(), b.values());
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::vector<double> softmax_t(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("softmax_t: temperature must be positive, got " +
                          std::to_string(temperature));
  if (logits.empty()) throw InvalidArgument("softmax_t: empty logit vector");
  double max = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) throw NumericOverflow("softmax_t: non-finite logit");
    max = std::max(max, z);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - max) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double cross_entropy(std::span<const double> target, std::span<const double> output) {
  if (target.size() != output.size())
    throw ShapeError("cross_entropy: target has " + std::to_string(target.size()) +
                     " entries, output " + std::to_string(output.size()));
  double sum = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j] == 0.0) continue;
    const double y = std::clamp(output[j], kProbFloor, 1.0);
    sum += target[j] * std::log(y);
  }
  return sum == 0.0 ? 0.0 : -sum;
}

double entropy(std::span<const double> probs) { return cross_entropy(probs, probs); }

std::vector<double> logit_gradient(std::span<const double> target, std::span<const double> output) {
  if (target.size() != output.size()) throw ShapeError("logit_gradient: length mismatch");
  std::vector<double> g(target.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = output[i] - target[i];
  return g;
}

double l2_distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("l2_distance_sq: length mismatch");
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    const double term = d * d - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

std::vector<double> one_hot(std::size_t index, std::size_t size) {
  if (index >= size) throw InvalidArgument("one_hot: index out of range");
  std::vector<double> v(size, 0.0);
  v[index] = 1.0;
  return v;
}

bool is_probability_vector(std::span<const double> values, double tolerance) {
  if (values.empty()) return false;
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

double finite_diff_check(const ScalarFunction& f, std::span<const double> params,
                         std::span<const double> analytic_grad, double step) {
  if (params.size() != analytic_grad.size())
    throw ShapeError("finite_diff_check: gradient length mismatch");
  if (!(step > 0.0)) throw InvalidArgument("finite_diff_check: step must be positive");
  std::vector<double> x(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    const double hi = orig + step;
    const double lo = orig - step;
    x[i] = hi;
    const double f_hi = f(x);
    x[i] = lo;
    const double f_lo = f(x);
    x[i] = orig;
    if (!std::isfinite(f_hi) || !std::isfinite(f_lo))
      throw NumericOverflow("finite_diff_check: non-finite function value at coordinate " +
                            std::to_string(i));
    const double fd = (f_hi - f_lo) / (hi - lo);
    const double an = analytic_grad[i];
    const double err = std::abs(fd - an) / std::max(1e-8, std::abs(fd) + std::abs(an));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace dkt
