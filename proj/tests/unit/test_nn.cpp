#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "adex/error.hpp"
#include "adex/nn/adam.hpp"
#include "adex/nn/dense.hpp"
#include "adex/nn/lstm.hpp"
#include "adex/nn/network.hpp"
#include "adex/nn/weights_io.hpp"
#include "gradcheck.hpp"

using namespace adex;
using namespace adex::nn;
using adex::testing::random_history;
using adex::testing::random_vector;

TEST(Tensor, ShapeMustMatchData) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ConfigError);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_TRUE(t.all_finite());
  t[4] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(t.all_finite());
}

TEST(Dense, ZeroParametersGiveZeroOutput) {
  DenseLayer layer("d", 4, 3, Activation::relu);
  EXPECT_EQ(layer.forward(std::vector<double>{1, -2, 3, 4}), std::vector<double>(3, 0.0));
}

TEST(Dense, IdentityWeightsPassInputThrough) {
  DenseLayer layer("d", 3, 3, Activation::linear);
  for (std::size_t i = 0; i < 3; ++i) layer.weights()[i * 3 + i] = 1.0;
  const std::vector<double> x{0.25, -7.0, 3.5};
  EXPECT_EQ(layer.forward(x), x);
}

TEST(Dense, HandComputedTwoByTwo) {
  DenseLayer layer("d", 2, 2, Activation::linear);
  layer.weights() = Tensor({2, 2}, {1, 2, 3, 4});
  layer.bias() = Tensor({2}, {0.5, -0.5});
  // [1,1] [[1,2],[3,4]] = [4, 6], plus bias.
  EXPECT_EQ(layer.forward(std::vector<double>{1, 1}), (std::vector<double>{4.5, 5.5}));
}

TEST(Dense, WrongInputWidthIsAConfigError) {
  DenseLayer layer("d", 2, 2, Activation::linear);
  EXPECT_THROW(layer.forward(std::vector<double>{1, 2, 3}), ConfigError);
}

TEST(Dense, NonFiniteInputIsANumericError) {
  DenseLayer layer("d", 2, 2, Activation::linear);
  layer.weights().fill(1.0);
  EXPECT_THROW(layer.forward(std::vector<double>{std::numeric_limits<double>::infinity(), 0.0}), NumericError);
}

TEST(Softmax, ExtremeLogitsStayNormalised) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(5);
    for (auto& v : z) v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(0.0, 300.0));
    softmax_inplace(z);
    double sum = 0.0;
    for (const double p : z) {
      EXPECT_GE(p, 0.0);
      EXPECT_TRUE(std::isfinite(p));
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  std::vector<double> tie{1e308, 1e308, -1e308};
  softmax_inplace(tie);
  EXPECT_DOUBLE_EQ(tie[0], 0.5);
  EXPECT_DOUBLE_EQ(tie[2], 0.0);
}

TEST(Lstm, ZeroParametersKeepStateAtZero) {
  LstmLayer layer("l", 3, 4);
  const auto seq = std::vector<double>{1, 2, 3, -1, -2, -3};
  const auto trace = layer.forward(seq, 2, LstmState::zeros(4));
  for (std::size_t t = 0; t < 2; ++t)
    for (const double h : trace.output(t)) EXPECT_EQ(h, 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(trace.gates[i], 0.5);  // input gate
  EXPECT_EQ(trace.final_state(), LstmState::zeros(4));
}

TEST(Lstm, SaturatedGatesGiveTanhOfOne) {
  LstmLayer layer("l", 1, 1);
  // Bias blocks: input, forget, output, candidate.
  layer.bias() = Tensor({4}, {40.0, 0.0, 40.0, 40.0});
  const auto trace = layer.forward(std::vector<double>{0.0}, 1, LstmState::zeros(1));
  EXPECT_NEAR(trace.output(0)[0], std::tanh(1.0), 1e-12);
  EXPECT_NEAR(trace.output(0)[0], 0.7616, 1e-4);
}

TEST(Lstm, SplitSequenceMatchesOneCall) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = 1 + rng.below(6), hidden = 1 + rng.below(6), steps = 1 + rng.below(7);
    LstmLayer layer("l", in, hidden);
    layer.init_glorot(rng);
    const auto seq = random_vector(steps * in, rng);
    LstmState init{random_vector(hidden, rng), random_vector(hidden, rng)};
    const auto whole = layer.forward(seq, steps, init).final_state();
    LstmState chained = init;
    for (std::size_t t = 0; t < steps; ++t) chained = layer.step(std::span(seq).subspan(t * in, in), chained);
    EXPECT_EQ(whole, chained);
  }
}

TEST(Lstm, StateSizeMismatchIsRejected) {
  LstmLayer layer("l", 2, 3);
  EXPECT_THROW(layer.forward(std::vector<double>{1, 2}, 1, LstmState::zeros(2)), ConfigError);
  EXPECT_THROW(layer.forward(std::vector<double>{}, 0, LstmState::zeros(3)), ConfigError);
}

TEST(Lstm, BatchMatchesPerSequence) {
  Rng rng(8);
  const std::size_t in = 7, hidden = 9, steps = 4, batch = 6;
  LstmLayer layer("l", in, hidden);
  layer.init_glorot(rng);
  const auto seq = random_vector(steps * batch * in, rng);  // [T, B, in]
  const auto trace = layer.forward_batch(seq, steps, batch);
  for (std::size_t b = 0; b < batch; ++b) {
    std::vector<double> one;
    for (std::size_t t = 0; t < steps; ++t) {
      const auto row = std::span(seq).subspan((t * batch + b) * in, in);
      one.insert(one.end(), row.begin(), row.end());
    }
    const auto single = layer.forward(one, steps, LstmState::zeros(hidden));
    for (std::size_t t = 0; t < steps; ++t) {
      const auto batched = trace.output(t).subspan(b * hidden, hidden);
      const auto expected = single.output(t);
      EXPECT_TRUE(std::equal(batched.begin(), batched.end(), expected.begin())) << "b=" << b << " t=" << t;
    }
  }
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  Tensor value({3}, {1.0, -2.0, 0.5}), grad({3}, {0.3, -4.0, 1e-3});
  ParamList params{{"p", &value, &grad}};
  AdamState adam({0.01, 0.9, 0.999, 1e-8}, params);
  adam.step(params);
  // Bias-corrected m = g and v = g^2, so the step is lr * g / (|g| + eps).
  const double expected[] = {1.0 - 0.01 * 0.3 / (0.3 + 1e-8), -2.0 + 0.01 * 4.0 / (4.0 + 1e-8),
                             0.5 - 0.01 * 1e-3 / (1e-3 + 1e-8)};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(value[i], expected[i], 1e-15);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Tensor value({2}, {1.0, 2.0}), grad({2}, 0.0);
  ParamList params{{"p", &value, &grad}};
  AdamState adam({}, params);
  for (int i = 0; i < 5; ++i) adam.step(params);
  EXPECT_EQ(value, Tensor({2}, {1.0, 2.0}));
}

TEST(Adam, NonFiniteGradientIsRejectedUntouched) {
  Tensor a({2}, {1.0, 2.0}), ga({2}, {0.5, 0.5});
  Tensor b({1}, {3.0}), gb({1}, {std::numeric_limits<double>::quiet_NaN()});
  ParamList params{{"a", &a, &ga}, {"b", &b, &gb}};
  AdamState adam({}, params);
  EXPECT_THROW(adam.step(params), TrainingError);
  EXPECT_EQ(a, Tensor({2}, {1.0, 2.0}));
  EXPECT_EQ(b, Tensor({1}, {3.0}));
  EXPECT_EQ(adam.steps(), 0u);
}

TEST(Adam, ClipScalesToMaxNorm) {
  Tensor v({2}, 0.0), g({2}, {3.0, 4.0});
  ParamList params{{"p", &v, &g}};
  EXPECT_DOUBLE_EQ(clip_grad_norm(params, 1.0), 5.0);
  EXPECT_NEAR(grad_norm(params), 1.0, 1e-15);
}

TEST(Network, ZeroParametersGiveZeroQ) {
  PolicyNetwork net(navigation_spec());
  Rng rng(1);
  const auto q = net.forward(random_history(net.spec(), rng));
  EXPECT_EQ(q, std::vector<double>(5, 0.0));
}

TEST(Network, ForwardIsDeterministic) {
  PolicyNetwork net(navigation_spec());
  Rng rng(2);
  net.initialize(rng);
  const auto input = random_history(net.spec(), rng);
  EXPECT_EQ(net.forward(input), net.forward(input));
}

TEST(Network, OldestStepInfluencesOutputThroughLstm) {
  PolicyNetwork net(navigation_spec());
  Rng rng(3);
  net.initialize(rng);
  auto input = random_history(net.spec(), rng);
  const auto base = net.forward(input);
  input.mutable_states()[3] += 0.5;
  input.mutable_maps()[10] += 0.5;
  EXPECT_NE(net.forward(input), base);

  PolicyNetwork flat(navigation_spec(false));
  flat.initialize(rng);
  auto input2 = random_history(flat.spec(), rng);
  const auto before = flat.forward(input2);
  input2.mutable_states()[0] += 0.5;
  EXPECT_EQ(flat.forward(input2), before);  // dense mix only reads the newest step
}

TEST(Network, WrongHistoryShapeIsRejected) {
  PolicyNetwork net(navigation_spec());
  EXPECT_THROW(net.forward(History(4, 31, 625)), ConfigError);
  EXPECT_THROW(net.forward(History(5, 29, 625)), ConfigError);
}

TEST(Network, ActorOutputIsADistribution) {
  PolicyNetwork actor(actor_spec());
  Rng rng(4);
  actor.initialize(rng);
  for (int i = 0; i < 10; ++i) {
    const auto p = actor.forward(random_history(actor.spec(), rng));
    double sum = 0.0;
    for (const double v : p) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Network, EncodeThenDecideEqualsForward) {
  for (const bool recurrent : {true, false}) {
    PolicyNetwork net(actor_spec(recurrent));
    Rng rng(6);
    net.initialize(rng);
    const auto input = random_history(net.spec(), rng);
    std::vector<double> features;
    for (std::size_t t = 0; t < input.steps(); ++t) {
      const auto f = net.encode(input.state(t), input.map(t));
      features.insert(features.end(), f.begin(), f.end());
    }
    EXPECT_EQ(net.decide(features), net.forward(input));
  }
}

TEST(Network, BatchForwardAndBackwardMatchPerSample) {
  for (const bool recurrent : {true, false}) {
    Rng rng(7);
    PolicyNetwork a(navigation_spec(recurrent)), b(navigation_spec(recurrent));
    a.initialize(rng);
    b.copy_parameters_from(a);
    std::vector<History> inputs;
    for (int i = 0; i < 9; ++i) inputs.push_back(random_history(a.spec(), rng));
    std::vector<const History*> ptrs;
    for (const auto& h : inputs) ptrs.push_back(&h);
    const auto d = random_vector(inputs.size() * 5, rng);

    auto pa = a.parameters(), pb = b.parameters();
    zero_grad(pa);
    zero_grad(pb);
    const auto trace = a.forward_batch(ptrs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto row = trace.output_row(i);
      EXPECT_EQ(std::vector<double>(row.begin(), row.end()), b.forward(inputs[i]));
      b.backward(b.forward_trace(inputs[i]), std::span(d).subspan(i * 5, 5));
    }
    a.backward_batch(trace, d);
    // Gradient sums are accumulated in a different order, so compare closely
    // rather than bitwise.
    for (std::size_t k = 0; k < pa.size(); ++k) {
      for (std::size_t i = 0; i < pa[k].grad->size(); ++i) {
        const double x = (*pa[k].grad)[i], y = (*pb[k].grad)[i];
        ASSERT_NEAR(x, y, 1e-11 * std::max(1.0, std::abs(y))) << pa[k].name << "[" << i << "]";
      }
    }
  }
}

TEST(Network, SaveLoadReproducesOutputsExactly) {
  Rng rng(9);
  PolicyNetwork net(critic_spec());
  net.initialize(rng);
  adex::testing::randomize(net.parameters(), rng, 0.3);
  std::stringstream file;
  write_weights(file, net.parameters());
  PolicyNetwork other(critic_spec());
  read_weights(file, other.parameters());
  const auto input = random_history(net.spec(), rng);
  EXPECT_EQ(net.forward(input), other.forward(input));
  for (std::size_t k = 0; k < net.parameters().size(); ++k)
    EXPECT_EQ(*net.parameters()[k].value, *other.parameters()[k].value);
}

TEST(WeightsIo, HeaderAndShapesAreValidated) {
  PolicyNetwork net(critic_spec());
  std::stringstream bad("WEIGHTS v2\n");
  EXPECT_THROW(read_weights(bad, net.parameters()), ConfigError);

  PolicyNetwork nav(navigation_spec());
  std::stringstream file;
  write_weights(file, nav.parameters());
  EXPECT_THROW(read_weights(file, net.parameters()), ConfigError);
}

TEST(WeightsIo, FileStartsWithVersion) {
  Tensor v({2}, {0.1, 1.0 / 3.0}), g({2}, 0.0);
  std::stringstream out;
  write_weights(out, {{"p", &v, &g}});
  std::string first;
  std::getline(out, first);
  EXPECT_EQ(first, "WEIGHTS v1");
  std::getline(out, first);
  EXPECT_EQ(first, "p shape 2");
}
