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
#include <vector>

namespace vae4as {

/// Exponentially faded confusion counts: count <- alpha * count + indicator.
struct FadedCounts {
    double tp = 0.0;
    double tn = 0.0;
    double p = 0.0;
    double n = 0.0;
    double alpha = 0.99;

    FadedCounts() = default;
    explicit FadedCounts(double fading) : alpha(fading) {}

    /// Recall of a class whose faded count is still below 1e-12 is reported as 1.
    double positive_recall() const;
    double negative_recall() const;
    double g_mean() const;
};

/// Decays, adds the new outcome and returns the current G-mean.
double prequential_update(FadedCounts& counts, int y_true, int y_pred);

/// sqrt(R+ * R-)
double g_mean(double positive_recall, double negative_recall);

struct AlarmScore {
    std::vector<bool> detected;
    std::vector<std::int64_t> delays;// -1 where missed
    std::size_t false_alarms = 0;

    std::size_t detections() const;
};

/// The first alarm in (drift, drift + tolerance] detects that drift; every other alarm is false.
AlarmScore score_alarms(std::span<const std::int64_t> alarms, std::span<const std::int64_t> drifts,
                        std::int64_t tolerance = 1000);

struct RunAggregate {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

/// Per-step mean and population-std / sqrt(R) across runs.
RunAggregate aggregate_runs(std::span<const std::vector<double>> series);

/// Scalar convenience over one value per run.
RunAggregate aggregate_scalars(std::span<const double> values);

}// namespace vae4as
