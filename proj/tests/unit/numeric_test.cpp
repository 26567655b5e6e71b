// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "dkt/error.hpp"
#include "dkt/matrix.hpp"
#include "dkt/numeric.hpp"
#include "dkt/random.hpp"
#include "support/oracles.hpp"

namespace dkt {
namespace {

using test::softmax_oracle;

TEST(Softmax, UniformForEqualLogits) {
  const std::vector<double> z{0.0, 0.0, 0.0};
  for (double t : {0.5, 1.0, 3.0}) {
    const auto y = softmax_t(z, t);
    for (double v : y) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  }
}

TEST(Softmax, MatchesOracleAtT1) {
  const std::vector<double> z{2.0, 1.0, 0.0};
  const auto y = softmax_t(z, 1.0);
  const auto ref = softmax_oracle(z, 1.0L);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(y[i], static_cast<double>(ref[i]), 1e-15);
  // Published five-digit values of the same oracle.
  EXPECT_NEAR(static_cast<double>(ref[0]), 0.66524, 5e-6);
  EXPECT_NEAR(static_cast<double>(ref[1]), 0.24473, 5e-6);
  EXPECT_NEAR(static_cast<double>(ref[2]), 0.09003, 5e-6);
}

TEST(Softmax, MatchesOracleAtT2AndIsFlatter) {
  const std::vector<double> z{2.0, 1.0, 0.0};
  const auto y2 = softmax_t(z, 2.0);
  const auto ref = softmax_oracle(z, 2.0L);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(y2[i], static_cast<double>(ref[i]), 1e-15);
  EXPECT_NEAR(static_cast<double>(ref[0]), 0.50648, 5e-6);
  EXPECT_NEAR(static_cast<double>(ref[1]), 0.30720, 5e-6);
  EXPECT_NEAR(static_cast<double>(ref[2]), 0.18632, 5e-6);
  const auto y1 = softmax_t(z, 1.0);
  EXPECT_GT(entropy(y2), entropy(y1));
  EXPECT_EQ(argmax(y1), argmax(y2));
}

TEST(Softmax, StableForLargeLogits) {
  const std::vector<double> z{1000.0, 999.0, 998.0};
  const auto y = softmax_t(z, 1.0);
  const auto ref = softmax_oracle(std::vector<double>{2.0, 1.0, 0.0}, 1.0L);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(y[i], static_cast<double>(ref[i]), 1e-15);
}

TEST(Softmax, RejectsBadInput) {
  const std::vector<double> z{1.0, 2.0};
  EXPECT_THROW(softmax_t(z, 0.0), InvalidArgument);
  EXPECT_THROW(softmax_t(z, -1.0), InvalidArgument);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(softmax_t(bad, 1.0), NumericOverflow);
  const std::vector<double> inf{1.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(softmax_t(inf, 1.0), NumericOverflow);
}

TEST(Softmax, RandomisedAgainstOracle) {
  Rng rng(11);
  for (int c = 0; c < 500; ++c) {
    std::vector<double> z(2 + rng.below(8));
    for (double& v : z) v = rng.uniform(-8.0, 8.0);
    const double t = rng.uniform(0.2, 10.0);
    const auto y = softmax_t(z, t);
    const auto ref = softmax_oracle(z, t);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(y[i], static_cast<double>(ref[i]), 1e-14);
  }
}

TEST(CrossEntropy, ReferenceValues) {
  EXPECT_EQ(cross_entropy(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(cross_entropy(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}), std::log(2.0),
              1e-15);
  const std::vector<double> z{2.0, 1.0, 0.0};
  const auto y = softmax_t(z, 1.0);
  const double ce = cross_entropy(std::vector<double>{1.0, 0.0, 0.0}, y);
  EXPECT_NEAR(ce, -std::log(static_cast<double>(softmax_oracle(z, 1.0L)[0])), 1e-15);
  EXPECT_NEAR(ce, 0.40761, 5e-6);
}

TEST(CrossEntropy, ClampsZeroProbabilities) {
  const double ce = cross_entropy(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(ce, -std::log(kProbFloor), 1e-9);
  EXPECT_TRUE(std::isfinite(ce));
}

TEST(CrossEntropy, NeverNegative) {
  Rng rng(3);
  for (int c = 0; c < 200; ++c) {
    std::vector<double> a(4), b(4);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    EXPECT_GE(cross_entropy(softmax_t(a, 1.0), softmax_t(b, 1.0)), 0.0);
  }
}

TEST(LogitGradient, ReferenceValues) {
  const std::vector<double> p{0.2, 0.8};
  for (double v : logit_gradient(p, p)) EXPECT_EQ(v, 0.0);
  const auto g = logit_gradient(std::vector<double>{1.0, 0.0}, std::vector<double>{0.7, 0.3});
  EXPECT_NEAR(g[0], -0.3, 1e-15);
  EXPECT_NEAR(g[1], 0.3, 1e-15);
}

TEST(LogitGradient, MatchesFiniteDifferences) {
  Rng rng(5);
  for (int c = 0; c < 50; ++c) {
    std::vector<double> z(5), target(5);
    for (double& v : z) v = rng.uniform(-2.0, 2.0);
    for (double& v : target) v = rng.uniform(0.0, 1.0);
    const double s = std::accumulate(target.begin(), target.end(), 0.0);
    for (double& v : target) v /= s;
    const auto grad = logit_gradient(target, softmax_t(z, 1.0));
    const auto f = [&](std::span<const double> x) { return cross_entropy(target, softmax_t(x, 1.0)); };
    EXPECT_LT(finite_diff_check(f, z, grad, 1e-5), 1e-6);
  }
}

TEST(L2Distance, ReferenceValues) {
  const std::vector<double> a{1.0, 2.0};
  EXPECT_EQ(l2_distance_sq(a, a), 0.0);
  EXPECT_EQ(l2_distance_sq(a, std::vector<double>{0.0, 0.0}), 5.0);
}

TEST(L2Distance, MatchesExtendedPrecisionSum) {
  Rng rng(9);
  for (int c = 0; c < 100; ++c) {
    std::vector<double> a(10), b(10);
    for (double& v : a) v = rng.normal() * 100.0;
    for (double& v : b) v = rng.normal();
    long double ref = 0.0L;
    for (std::size_t i = 0; i < 10; ++i) {
      const long double d = static_cast<long double>(a[i]) - b[i];
      ref += d * d;
    }
    EXPECT_NEAR(l2_distance_sq(a, b), static_cast<double>(ref), 1e-15 * static_cast<double>(ref));
  }
}

TEST(Argmax, LowestIndexWinsTies) {
  EXPECT_EQ(argmax(std::vector<double>{1.0, 3.0, 3.0}), 1u);
  EXPECT_EQ(argmax(std::vector<double>{5.0}), 0u);
}

TEST(ProbabilityVector, Checks) {
  EXPECT_TRUE(is_probability_vector(std::vector<double>{0.25, 0.75}));
  EXPECT_FALSE(is_probability_vector(std::vector<double>{0.3, 0.6}));
  EXPECT_FALSE(is_probability_vector(std::vector<double>{-0.1, 1.1}));
  EXPECT_TRUE(is_probability_vector(std::vector<double>{0.5, 0.5 + 1e-10}));
  EXPECT_FALSE(is_probability_vector(std::vector<double>{0.5, 0.5 + 1e-8}));
}

TEST(FiniteDiffCheck, QuadraticExactAndCorruptionDetected) {
  const auto f = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  const std::vector<double> x{1.0, 2.0};
  EXPECT_LT(finite_diff_check(f, x, std::vector<double>{2.0, 4.0}, 1e-5), 1e-8);
  EXPECT_GT(finite_diff_check(f, x, std::vector<double>{2.0, 5.0}, 1e-5), 0.1);
}

TEST(FiniteDiffCheck, NonFiniteFunctionThrows) {
  const auto f = [](std::span<const double> x) { return std::log(x[0]); };
  EXPECT_THROW(finite_diff_check(f, std::vector<double>{0.0}, std::vector<double>{1.0}, 1e-5),
               NumericOverflow);
}

TEST(Matrix, KernelsMatchNaiveLoops) {
  Rng rng(2);
  Matrix w(3, 4);
  for (double& v : w.values()) v = rng.normal();
  std::vector<double> x(4), y(3, 1.0);
  for (double& v : x) v = rng.normal();
  gemv_add(w, x, y);
  for (std::size_t o = 0; o < 3; ++o) {
    double s = 1.0;
    for (std::size_t i = 0; i < 4; ++i) s += w(o, i) * x[i];
    EXPECT_NEAR(y[o], s, 1e-14);
  }
  std::vector<double> back(4, 0.0);
  gemv_transpose_add(w, y, back);
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t o = 0; o < 3; ++o) s += w(o, i) * y[o];
    EXPECT_NEAR(back[i], s, 1e-14);
  }
  Matrix acc(3, 4);
  outer_add(acc, y, x);
  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(acc(o, i), y[o] * x[i]);
  EXPECT_THROW(gemv_add(w, y, x), ShapeError);
}

TEST(Matrix, FromRowsRejectsRaggedInput) {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ShapeError);
}

}  // namespace
}  // namespace dkt
