/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "vae4as/errors.hpp"
#include "vae4as/nn.hpp"

using namespace vae4as;

TEST(HeNormal, SampleStdMatchesFanIn) {
    Rng rng(7);
    const auto layer = he_normal_init(100, 400, Activation::linear, rng);
    double sq = 0.0;
    for (double w : layer.weights) {
        sq += w * w;
    }
    const double sd = std::sqrt(sq / static_cast<double>(layer.weights.size()));
    EXPECT_NEAR(sd, 0.1414, 0.005);
    for (double b : layer.biases) {
        EXPECT_EQ(b, 0.0);
    }
}

TEST(HeNormal, SampleMeanNearZero) {
    Rng rng(11);
    const auto layer = he_normal_init(2, 5000, Activation::linear, rng);
    ASSERT_EQ(layer.weights.size(), 10000u);
    const double mean = std::accumulate(layer.weights.begin(), layer.weights.end(), 0.0) / 10000.0;
    EXPECT_LT(std::abs(mean), 4.0 * (1.0 / 100.0));
}

TEST(HeNormal, SameSeedSameTensors) {
    Rng a(3);
    Rng b(3);
    EXPECT_EQ(he_normal_init(5, 7, Activation::leaky_relu, a).weights,
              he_normal_init(5, 7, Activation::leaky_relu, b).weights);
}

TEST(Forward, IdentityLinearLayer) {
    DenseLayer layer(2, 2, Activation::linear);
    layer.weights = {1.0, 0.0, 0.0, 1.0};
    const Mlp net{layer};
    const Vector x{1.0, 2.0};
    EXPECT_EQ(predict(net, x), (Vector{1.0, 2.0}));
}

TEST(Forward, Activations) {
    EXPECT_DOUBLE_EQ(activate(Activation::leaky_relu, -1.0, 0.01), -0.01);
    EXPECT_DOUBLE_EQ(activate(Activation::leaky_relu, 2.0, 0.01), 2.0);
    EXPECT_DOUBLE_EQ(activate(Activation::sigmoid, 0.0, 0.01), 0.5);
    EXPECT_GE(activate(Activation::sigmoid, -1000.0, 0.01), kSigmoidFloor);
    EXPECT_LE(activate(Activation::sigmoid, 1000.0, 0.01), kSigmoidCeil);
}

TEST(Adam, ZeroGradientsLeaveParameters) {
    Vector params{0.3, -1.2, 4.0};
    const Vector before = params;
    const Vector grads(3, 0.0);
    AdamState state(3);
    adam_step(params, grads, state, 1e-3);
    EXPECT_EQ(params, before);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    Vector params{0.0};
    const Vector grads{1.0};
    AdamState state(1);
    adam_step(params, grads, state, 0.001);
    // m_hat = 1, v_hat = 1: delta = -lr / (1 + eps)
    EXPECT_NEAR(params[0], -0.001 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, NonFiniteGradientLeavesStateUntouched) {
    Vector params{1.0, 2.0};
    const Vector grads{0.5, std::nan("")};
    AdamState state(2);
    try {
        adam_step(params, grads, state, 1e-3);
        FAIL() << "expected NonFiniteGradient";
    } catch (const NonFiniteGradient& e) {
        EXPECT_EQ(e.index(), 1u);
    }
    EXPECT_EQ(params, (Vector{1.0, 2.0}));
    EXPECT_EQ(state.step_count, 0u);
}

TEST(Forward, Pure) {
    Rng rng(5);
    const Mlp net{he_normal_init(3, 4, Activation::leaky_relu, rng), he_normal_init(4, 2, Activation::sigmoid, rng)};
    const Vector x{0.1, 0.7, -0.3};
    EXPECT_EQ(predict(net, x), predict(net, x));
    EXPECT_EQ(forward(net, x).output(), predict(net, x));
}

TEST(GradientCheck, LinearSquaredErrorIsExact) {
    Rng rng(9);
    const Mlp net{he_normal_init(3, 2, Activation::linear, rng)};
    const Vector x{0.4, -1.0, 2.0};
    const Vector target{0.5, 0.1};
    EXPECT_LT(gradient_check(net, x, target, 1e-4), 1e-8);
}

TEST(GradientCheck, RandomMlpsProperty) {
    Rng rng(21);
    std::uniform_int_distribution<std::size_t> width(1, 6);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t in = width(rng);
        const std::size_t mid = width(rng);
        const std::size_t out = width(rng);
        const Mlp net{he_normal_init(in, mid, Activation::leaky_relu, rng),
                      he_normal_init(mid, out, Activation::sigmoid, rng)};
        Vector x(in);
        Vector target(out);
        for (auto& v : x) {
            v = unit(rng);
        }
        for (auto& v : target) {
            v = unit(rng);
        }
        EXPECT_LT(gradient_check(net, x, target, 1e-6), 1e-5) << "trial " << trial;
    }
}

TEST(GradientCheck, RelativeErrorDefinition) {
    const Vector a{1.0, 10.0, 0.0};
    const Vector n{1.0, 11.0, 1e-3};
    EXPECT_DOUBLE_EQ(max_relative_error(a, n), 1.0 / 11.0);
}

TEST(Parameters, FlatRoundTrip) {
    Rng rng(2);
    Mlp net{he_normal_init(3, 4, Activation::leaky_relu, rng), he_normal_init(4, 1, Activation::linear, rng)};
    Vector flat;
    append_parameters(net, flat);
    ASSERT_EQ(flat.size(), parameter_count(net));
    for (auto& v : flat) {
        v += 1.0;
    }
    EXPECT_EQ(assign_parameters(net, flat, 0), flat.size());
    Vector again;
    append_parameters(net, again);
    EXPECT_EQ(again, flat);
}
