#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "ilnet/mlp.hpp"

using namespace ilnet;
using Eigen::MatrixXd;

namespace {

// Straight-line reference forward pass for a single sample, written with
// plain loops so it shares nothing with the batched implementation.
std::vector<double> reference_forward(const MlpModel& m, std::vector<double> a) {
  for (std::size_t l = 0; l < m.n_transforms(); ++l) {
    const auto& w = m.weights[l];
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = m.biases[l][r];
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = s;
    }
    const bool last = l + 1 == m.n_transforms();
    for (auto& v : z) {
      if (!last)
        v = m.activations[l] == Activation::tanh ? std::tanh(v) : (v > 0 ? v : 0.0);
      else if (m.output_activation == OutputActivation::softplus)
        v = std::log(1.0 + std::exp(v));
    }
    a = z;
  }
  return a;
}

}  // namespace

TEST(Init, DeterministicAndWithinXavierBound) {
  const auto a = init_model({8, 64, 64, 1}, {Activation::tanh, Activation::tanh},
                            OutputActivation::identity, 5);
  const auto b = init_model({8, 64, 64, 1}, {Activation::tanh, Activation::tanh},
                            OutputActivation::identity, 5);
  EXPECT_TRUE(a == b);
  const auto c = init_model({8, 64, 64, 1}, {Activation::tanh, Activation::tanh},
                            OutputActivation::identity, 6);
  EXPECT_FALSE(a == c);
  for (std::size_t l = 0; l < a.n_transforms(); ++l) {
    const double bound = std::sqrt(6.0 / double(a.layer_sizes[l] + a.layer_sizes[l + 1]));
    EXPECT_LE(a.weights[l].cwiseAbs().maxCoeff(), bound);
    EXPECT_TRUE(a.biases[l].isZero());
  }
}

TEST(Init, DefaultBaselineArchitectureIsReproducible) {
  const std::vector<Activation> acts(3, Activation::tanh);
  EXPECT_TRUE(init_model({8, 64, 64, 64, 1}, acts, OutputActivation::identity, 0) ==
              init_model({8, 64, 64, 64, 1}, acts, OutputActivation::identity, 0));
}

TEST(Init, RejectsBadArchitecture) {
  EXPECT_THROW(init_model({}, {}, OutputActivation::identity, 0), UsageError);
  EXPECT_THROW(init_model({3, 0, 1}, {Activation::tanh}, OutputActivation::identity, 0),
               UsageError);
  EXPECT_THROW(init_model({3, 4, 1}, {}, OutputActivation::identity, 0), UsageError);
}

TEST(Forward, HandComputedLinearUnit) {
  auto m = init_model({1, 1}, {}, OutputActivation::identity, 0);
  m.weights[0](0, 0) = 2.0;
  m.biases[0][0] = 1.0;
  MatrixXd x(1, 1);
  x << 3.0;
  EXPECT_EQ(forward(m, x)(0, 0), 7.0);
}

TEST(Forward, ZeroWeightsGiveBias) {
  auto m = init_model({3, 4, 1}, {Activation::tanh}, OutputActivation::identity, 0);
  for (auto& w : m.weights) w.setZero();
  m.biases[1][0] = 0.25;
  EXPECT_EQ(forward(m, MatrixXd::Ones(3, 2)), MatrixXd::Constant(1, 2, 0.25));
}

TEST(Forward, MatchesReferenceImplementation) {
  for (auto act : {Activation::tanh, Activation::relu}) {
    for (auto out : {OutputActivation::identity, OutputActivation::softplus}) {
      auto m = init_model({5, 7, 6, 3}, {act, act}, out, 21);
      std::mt19937_64 rng(2);
      std::uniform_real_distribution<double> u(-1, 1);
      for (auto& b : m.biases)
        for (auto& v : b) v = u(rng);
      MatrixXd x(5, 10);
      for (auto& v : x.reshaped()) v = u(rng);
      const MatrixXd y = forward(m, x);
      for (Eigen::Index s = 0; s < x.cols(); ++s) {
        std::vector<double> in(x.col(s).data(), x.col(s).data() + 5);
        const auto ref = reference_forward(m, in);
        for (Eigen::Index k = 0; k < 3; ++k)
          EXPECT_NEAR(y(k, s), ref[static_cast<std::size_t>(k)], 1e-12);
      }
    }
  }
}

TEST(Forward, SoftplusOutputIsNonNegative) {
  auto m = init_model({2, 3, 1}, {Activation::tanh}, OutputActivation::softplus, 1);
  m.biases[1][0] = -50.0;
  MatrixXd x = MatrixXd::Random(2, 100);
  EXPECT_GE(forward(m, x).minCoeff(), 0.0);
  EXPECT_NEAR(detail::softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(detail::softplus(800.0), 800.0);
}

TEST(Forward, RejectsWrongInputWidth) {
  const auto m = init_model({3, 1}, {}, OutputActivation::identity, 0);
  EXPECT_THROW(forward(m, MatrixXd::Zero(2, 1)), DataError);
}

TEST(Backward, FiniteDifferencesOnFixedNet) {
  auto m = init_model({4, 8, 3, 1}, {Activation::tanh, Activation::tanh},
                      OutputActivation::identity, 3);
  MatrixXd x = MatrixXd::Random(4, 5);
  MatrixXd r = MatrixXd::Ones(1, 5);
  const auto res = oracle::grad_check(m, x, r);
  EXPECT_EQ(res.failed, 0u) << "worst abs " << res.worst_abs << " rel " << res.worst_rel;
  EXPECT_EQ(res.checked, 4u * 8 + 8 + 8 * 3 + 3 + 3 + 1);
}

TEST(Backward, FiniteDifferencesOnRandomNets) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto out : {OutputActivation::identity, OutputActivation::softplus}) {
      const auto c = oracle::random_case(seed, out);
      const auto res = oracle::grad_check(c.model, c.x, c.r);
      EXPECT_EQ(res.failed, 0u) << "seed " << seed << " worst abs " << res.worst_abs;
    }
  }
}

TEST(Backward, ZeroOutputGradientGivesZeroGradients) {
  const auto m = init_model({3, 5, 2}, {Activation::tanh}, OutputActivation::identity, 1);
  ForwardCache cache;
  forward(m, MatrixXd::Random(3, 4), &cache);
  const auto g = backward(m, cache, MatrixXd::Zero(2, 4));
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    EXPECT_TRUE(g.weights[l].isZero());
    EXPECT_TRUE(g.biases[l].isZero());
  }
}

TEST(Backward, LinearUnitWeightGradientIsInput) {
  auto m = init_model({1, 1}, {}, OutputActivation::identity, 0);
  ForwardCache cache;
  MatrixXd x(1, 1);
  x << 2.5;
  forward(m, x, &cache);
  const auto g = backward(m, cache, MatrixXd::Ones(1, 1));
  EXPECT_EQ(g.weights[0](0, 0), 2.5);
  EXPECT_EQ(g.biases[0][0], 1.0);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  auto m = init_model({2, 1}, {}, OutputActivation::identity, 0);
  const auto before = m;
  auto g = MlpGradients::zeros_like(m);
  g.weights[0] << 0.3, -4.0;
  g.biases[0] << 1e-3;
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  auto state = AdamState::for_model(m);
  adam_step(m, g, state, cfg);
  // After one bias-corrected step: delta = -lr * g / (|g| + eps).
  for (int k = 0; k < 2; ++k) {
    const double gk = g.weights[0](0, k);
    EXPECT_NEAR(m.weights[0](0, k) - before.weights[0](0, k),
                -0.01 * gk / (std::abs(gk) + 1e-8), 1e-15);
  }
  EXPECT_NEAR(m.biases[0][0], -0.01 * 1e-3 / (1e-3 + 1e-8), 1e-15);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientLeavesModelUnchanged) {
  auto m = init_model({3, 4, 1}, {Activation::tanh}, OutputActivation::identity, 2);
  const auto before = m;
  auto state = AdamState::for_model(m);
  for (int i = 0; i < 3; ++i) adam_step(m, MlpGradients::zeros_like(m), state, TrainConfig{});
  EXPECT_TRUE(m == before);
}

TEST(Adam, NonFiniteGradientRaises) {
  auto m = init_model({2, 1}, {}, OutputActivation::identity, 0);
  auto g = MlpGradients::zeros_like(m);
  g.weights[0](0, 0) = std::nan("");
  auto state = AdamState::for_model(m);
  EXPECT_THROW(adam_step(m, g, state, TrainConfig{}), NumericalError);
}

TEST(Train, OneFullBatchEpochEqualsOneAdamStep) {
  auto m = init_model({2, 4, 1}, {Activation::tanh}, OutputActivation::identity, 9);
  MatrixXd x = MatrixXd::Random(2, 6);
  MatrixXd y = MatrixXd::Random(1, 6);
  const LossSpec loss{1.0, -0.5};
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 6;
  cfg.learning_rate = 0.05;

  auto manual = m;
  ForwardCache cache;
  MatrixXd grad;
  combined_loss(forward(manual, x, &cache), y, loss, &grad);
  auto state = AdamState::for_model(manual);
  adam_step(manual, backward(manual, cache, grad), state, cfg);

  const auto trace = train(m, x, y, loss, cfg);
  ASSERT_EQ(trace.epochs.size(), 1u);
  for (std::size_t l = 0; l < m.n_transforms(); ++l) {
    EXPECT_TRUE(m.weights[l].isApprox(manual.weights[l], 1e-12));
    EXPECT_TRUE(m.biases[l].isApprox(manual.biases[l], 1e-12) ||
                (m.biases[l] - manual.biases[l]).norm() < 1e-14);
  }
  EXPECT_NEAR(trace.epochs[0].total_loss, evaluate_loss(m, x, y, loss).total, 1e-15);
}

TEST(Train, DeterministicForFixedSeed) {
  MatrixXd x = MatrixXd::Random(3, 40);
  MatrixXd y = x.colwise().sum() / 3.0;
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  cfg.seed = 4;
  auto a = init_model({3, 6, 1}, {Activation::tanh}, OutputActivation::identity, 1);
  auto b = a;
  const auto ta = train(a, x, y, LossSpec{0.0, 0.0}, cfg);
  const auto tb = train(b, x, y, LossSpec{0.0, 0.0}, cfg);
  EXPECT_TRUE(a == b);
  for (std::size_t e = 0; e < ta.epochs.size(); ++e)
    EXPECT_EQ(ta.epochs[e].total_loss, tb.epochs[e].total_loss);
}

TEST(Train, LambdaZeroIgnoresThreshold) {
  MatrixXd x = MatrixXd::Random(2, 30);
  MatrixXd y = MatrixXd::Random(1, 30);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 10;
  auto a = init_model({2, 5, 1}, {Activation::tanh}, OutputActivation::identity, 3);
  auto b = a;
  train(a, x, y, LossSpec{0.0, -0.9}, cfg);
  train(b, x, y, LossSpec{0.0, 0.9}, cfg);
  EXPECT_TRUE(a == b);
}

TEST(Train, LossDecreasesOnLinearTarget) {
  MatrixXd x(1, 64);
  for (Eigen::Index i = 0; i < 64; ++i) x(0, i) = -1.0 + 2.0 * double(i) / 63.0;
  MatrixXd y = 0.5 * x.array() + 0.1;
  auto m = init_model({1, 8, 1}, {Activation::tanh}, OutputActivation::identity, 0);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 64;
  cfg.learning_rate = 1e-3;
  const auto trace = train(m, x, y, LossSpec{0.0, 0.0}, cfg);
  for (std::size_t e = 1; e < trace.epochs.size(); ++e)
    EXPECT_LT(trace.epochs[e].mse, trace.epochs[e - 1].mse) << "epoch " << e;
}

TEST(Train, PenaltyRaisesPredictionsAboveThreshold) {
  // Targets sit exactly at the threshold; the hinge pushes predictions up.
  MatrixXd x = MatrixXd::Random(2, 50);
  MatrixXd y = MatrixXd::Constant(1, 50, -0.5);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 50;
  cfg.learning_rate = 0.01;
  auto plain = init_model({2, 6, 1}, {Activation::tanh}, OutputActivation::identity, 7);
  auto fixed = plain;
  train(plain, x, y, LossSpec{0.0, -0.5}, cfg);
  train(fixed, x, y, LossSpec{1.0, -0.5}, cfg);
  const auto below = [&](const MlpModel& m) {
    return (forward(m, x).array() < -0.5).count();
  };
  EXPECT_LT(below(fixed), below(plain));
}

TEST(Train, RejectsOversizedBatch) {
  auto m = init_model({1, 1}, {}, OutputActivation::identity, 0);
  TrainConfig cfg;
  cfg.batch_size = 10;
  EXPECT_THROW(train(m, MatrixXd::Zero(1, 5), MatrixXd::Zero(1, 5), LossSpec{}, cfg), UsageError);
}

TEST(Train, DivergenceRaisesNumericalError) {
  auto m = init_model({1, 1}, {}, OutputActivation::identity, 0);
  MatrixXd x = MatrixXd::Constant(1, 4, 1e200);
  MatrixXd y = MatrixXd::Zero(1, 4);
  m.weights[0](0, 0) = 1e200;
  TrainConfig cfg;
  cfg.batch_size = 4;
  EXPECT_THROW(train(m, x, y, LossSpec{0.0, 0.0}, cfg), NumericalError);
}

TEST(Forward, DegenerateNetGivesActivationOfZero) {
  for (auto out : {OutputActivation::identity, OutputActivation::softplus}) {
    auto m = init_model({1, 1}, {}, out, 0);
    m.weights[0].setZero();
    MatrixXd x(1, 3);
    x << -2.0, 0.0, 5.0;
    const double expect = out == OutputActivation::identity ? 0.0 : std::log(2.0);
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(forward(m, x)(0, i), expect, 1e-15);
  }
}

TEST(Forward, SoftplusStrictlyPositiveInRepresentableRange) {
  // exp underflows below about -745; within the representable range the
  // head stays strictly positive, and it never goes negative.
  for (double z : {-700.0, -100.0, -10.0, 0.0, 10.0, 700.0})
    EXPECT_GT(detail::softplus(z), 0.0) << z;
  EXPECT_GE(detail::softplus(-1e308), 0.0);
}

TEST(Forward, WideNetMatchesReference) {
  auto m = init_model({8, 64, 1}, {Activation::tanh}, OutputActivation::identity, 0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  MatrixXd x(8, 16);
  for (auto& v : x.reshaped()) v = u(rng);
  const MatrixXd y = forward(m, x);
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    std::vector<double> in(x.col(s).data(), x.col(s).data() + 8);
    EXPECT_NEAR(y(0, s), reference_forward(m, in)[0], 1e-12);
  }
}
