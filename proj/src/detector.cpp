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
#include "vae4as/detector.hpp"

#include <cmath>

#include "vae4as/errors.hpp"

namespace vae4as {

double threshold_from_losses(std::span<const double> losses) {
    if (losses.empty()) {
        throw ContractViolation("compute_threshold: empty window, defer thresholding");
    }
    const auto n = static_cast<double>(losses.size());
    double mean = 0.0;
    for (double l : losses) {
        mean += l;
    }
    mean /= n;
    double var = 0.0;
    for (double l : losses) {
        var += (l - mean) * (l - mean);
    }
    return mean + 2.0 * std::sqrt(var / n);
}

double anomaly_score(const VaeModel& model, std::span<const double> x, bool entropy_offset) {
    double loss = total_loss(model, x);
    if (entropy_offset && model.loss_kind == LossKind::binary_cross_entropy) {
        for (double v : x) {
            if (v > 0.0 && v < 1.0) {
                loss += v * std::log(v) + (1.0 - v) * std::log1p(-v);
            }
        }
    }
    return loss;
}

ThresholdState compute_threshold(const VaeModel& model, std::span<const Vector> window, std::int64_t t,
                                 bool entropy_offset) {
    ThresholdState state;
    state.computed_at = t;
    state.window_losses.reserve(window.size());
    for (const auto& x : window) {
        state.window_losses.push_back(anomaly_score(model, x, entropy_offset));
    }
    state.theta = threshold_from_losses(state.window_losses);
    return state;
}

Prediction predict(const VaeModel& model, double theta, std::span<const double> x, bool entropy_offset) {
    const double loss = anomaly_score(model, x, entropy_offset);
    return {loss > theta ? 1 : 0, loss};
}

}// namespace vae4as
