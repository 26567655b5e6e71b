// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dkt {

/// Probabilities are clamped to [kProbFloor, 1] before any logarithm.
inline constexpr double kProbFloor = 1e-12;

/// Tolerance on the sum of an in-memory probability vector.
inline constexpr double kProbSumTolerance = 1e-9;

double sigmoid(double x) noexcept;

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Temperature softmax exp(z_i / T) / sum_j exp(z_j / T), stabilised by
/// subtracting max(z) first. Throws InvalidArgument for T <= 0 and
/// NumericOverflow for non-finite logits.
std::vector<double> softmax_t(std::span<const double> logits, double temperature);

/// -sum_j t_j ln(clamp(y_j)). Never negative for probability inputs.
double cross_entropy(std::span<const double> target, std::span<const double> output);

/// -sum_j p_j ln p_j, with 0 ln 0 = 0.
double entropy(std::span<const double> probs);

/// Gradient of cross_entropy(target, softmax(z)) with respect to z, i.e.
/// output - target (the descent direction of the negated objective).
std::vector<double> logit_gradient(std::span<const double> target, std::span<const double> output);

/// sum_i (a_i - b_i)^2 with compensated summation.
double l2_distance_sq(std::span<const double> a, std::span<const double> b);

std::vector<double> one_hot(std::size_t index, std::size_t size);

/// True when every entry lies in [0, 1] and the entries sum to 1 within `tolerance`.
bool is_probability_vector(std::span<const double> values, double tolerance = kProbSumTolerance);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Compares an analytic gradient against central differences of `f`:
///   max_i |fd_i - an_i| / max(1e-8, |fd_i| + |an_i|).
/// Throws NumericOverflow if `f` returns a non-finite value.
double finite_diff_check(const ScalarFunction& f, std::span<const double> params,
                         std::span<const double> analytic_grad, double step);

}  // namespace dkt
