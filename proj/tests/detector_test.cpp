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

#include "vae4as/detector.hpp"
#include "vae4as/errors.hpp"

using namespace vae4as;

TEST(Threshold, ClosedForms) {
    EXPECT_EQ(threshold_from_losses(Vector{1.0, 1.0, 1.0}), 1.0);
    EXPECT_EQ(threshold_from_losses(Vector{0.0, 2.0}), 3.0);
    // 2.5 + 2 * sqrt(1.25)
    EXPECT_NEAR(threshold_from_losses(Vector{1.0, 2.0, 3.0, 4.0}), 4.736067977, 1e-9);
}

TEST(Threshold, EmptyRejected) { EXPECT_THROW(threshold_from_losses(Vector{}), ContractViolation); }

TEST(Threshold, ShiftEquivarianceProperty) {
    Rng rng(4);
    std::uniform_real_distribution<double> unit(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vector losses(1 + static_cast<std::size_t>(trial));
        for (auto& v : losses) {
            v = unit(rng);
        }
        const double theta = threshold_from_losses(losses);
        const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
        EXPECT_GE(theta, mean - 1e-12);
        Vector shifted = losses;
        for (auto& v : shifted) {
            v += 10.0;
        }
        EXPECT_NEAR(threshold_from_losses(shifted), theta + 10.0, 1e-9);
    }
}

namespace {

VaeModel small_model() {
    Rng rng(1);
    return make_vae(2, VaeArchitecture::default_for(2), VaeSettings{}, rng);
}

}// namespace

TEST(Predict, StrictInequality) {
    const auto model = small_model();
    const Vector x{0.3, 0.6};
    const double loss = anomaly_score(model, x);
    EXPECT_EQ(predict(model, loss, x).label, 0);
    EXPECT_EQ(predict(model, loss * 2.0, x).label, 0);
    EXPECT_EQ(predict(model, loss / 2.0, x).label, 1);
    EXPECT_EQ(predict(model, std::nextafter(loss, 0.0), x).label, 1);
    EXPECT_EQ(predict(model, loss, x).loss, loss);
}

TEST(Threshold, FromModelWindow) {
    const auto model = small_model();
    const std::vector<Vector> window{{0.1, 0.2}, {0.5, 0.5}, {0.9, 0.1}};
    Vector losses;
    for (const auto& x : window) {
        losses.push_back(total_loss(model, x));
    }
    const auto state = compute_threshold(model, window, 42);
    EXPECT_EQ(state.window_losses, losses);
    EXPECT_EQ(state.theta, threshold_from_losses(losses));
    EXPECT_EQ(state.computed_at, 42);
}

TEST(AnomalyScore, EntropyOffsetSubtractsInputEntropy) {
    const auto model = small_model();
    const Vector x{0.2, 0.7};
    double entropy = 0.0;
    for (double v : x) {
        entropy -= v * std::log(v) + (1.0 - v) * std::log(1.0 - v);
    }
    EXPECT_NEAR(anomaly_score(model, x, true), anomaly_score(model, x) - entropy, 1e-12);
}
