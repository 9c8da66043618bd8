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
#pragma once

#include <cstdint>
#include <span>

#include "vae4as/vae.hpp"

namespace vae4as {

struct ThresholdState {
    double theta = 0.0;
    std::int64_t computed_at = 0;
    Vector window_losses;
};

/// mean + 2 * population std. Throws ContractViolation on an empty input.
double threshold_from_losses(std::span<const double> losses);

/// Evaluation-mode total loss. With `entropy_offset` under cross-entropy, the input's own Bernoulli
/// entropy is subtracted so a perfect reconstruction scores 0 wherever x lies in [0, 1].
double anomaly_score(const VaeModel& model, std::span<const double> x, bool entropy_offset = false);

/// Scores of every window element under `model`, thresholded.
ThresholdState compute_threshold(const VaeModel& model, std::span<const Vector> window, std::int64_t t = 0,
                                 bool entropy_offset = false);

struct Prediction {
    int label = 0;
    double loss = 0.0;
};

/// Anomalous (1) iff loss > theta, strictly.
Prediction predict(const VaeModel& model, double theta, std::span<const double> x, bool entropy_offset = false);

}// namespace vae4as
