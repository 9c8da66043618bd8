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
#include "vae4as/eval.hpp"

#include <algorithm>
#include <cmath>

#include "vae4as/errors.hpp"

namespace vae4as {

namespace {
constexpr double kUndefined = 1e-12;
}

double FadedCounts::positive_recall() const { return p < kUndefined ? 1.0 : std::min(1.0, tp / p); }

double FadedCounts::negative_recall() const { return n < kUndefined ? 1.0 : std::min(1.0, tn / n); }

double FadedCounts::g_mean() const { return vae4as::g_mean(positive_recall(), negative_recall()); }

double g_mean(double positive_recall, double negative_recall) { return std::sqrt(positive_recall * negative_recall); }

double prequential_update(FadedCounts& counts, int y_true, int y_pred) {
    if ((y_true != 0 && y_true != 1) || (y_pred != 0 && y_pred != 1)) {
        throw ContractViolation("prequential_update: labels must be 0 or 1");
    }
    counts.tp *= counts.alpha;
    counts.tn *= counts.alpha;
    counts.p *= counts.alpha;
    counts.n *= counts.alpha;
    if (y_true == 1) {
        counts.p += 1.0;
        counts.tp += y_pred == 1 ? 1.0 : 0.0;
    } else {
        counts.n += 1.0;
        counts.tn += y_pred == 0 ? 1.0 : 0.0;
    }
    return counts.g_mean();
}

std::size_t AlarmScore::detections() const {
    return static_cast<std::size_t>(std::count(detected.begin(), detected.end(), true));
}

AlarmScore score_alarms(std::span<const std::int64_t> alarms, std::span<const std::int64_t> drifts,
                        std::int64_t tolerance) {
    AlarmScore score;
    score.detected.assign(drifts.size(), false);
    score.delays.assign(drifts.size(), -1);
    for (auto a : alarms) {
        bool counted = false;
        for (std::size_t g = 0; g < drifts.size(); ++g) {
            if (a > drifts[g] && a <= drifts[g] + tolerance && !score.detected[g]) {
                score.detected[g] = true;
                score.delays[g] = a - drifts[g];
                counted = true;
                break;
            }
        }
        if (!counted) {
            ++score.false_alarms;
        }
    }
    return score;
}

RunAggregate aggregate_runs(std::span<const std::vector<double>> series) {
    RunAggregate agg;
    if (series.empty()) {
        return agg;
    }
    const std::size_t len = series.front().size();
    for (const auto& s : series) {
        if (s.size() != len) {
            throw ContractViolation("aggregate_runs: series lengths differ");
        }
    }
    const auto runs = static_cast<double>(series.size());
    agg.mean.resize(len);
    agg.stderr_.resize(len);
    std::vector<double> column;
    for (std::size_t t = 0; t < len; ++t) {
        // summing in sorted order makes the result independent of run order
        column.clear();
        for (const auto& s : series) {
            column.push_back(s[t]);
        }
        std::sort(column.begin(), column.end());
        double m = 0.0;
        for (double v : column) {
            m += v;
        }
        m /= runs;
        double var = 0.0;
        for (double v : column) {
            var += (v - m) * (v - m);
        }
        agg.mean[t] = m;
        agg.stderr_[t] = std::sqrt(var / runs) / std::sqrt(runs);
    }
    return agg;
}

RunAggregate aggregate_scalars(std::span<const double> values) {
    std::vector<std::vector<double>> series;
    series.reserve(values.size());
    for (double v : values) {
        series.push_back({v});
    }
    return aggregate_runs(series);
}

}// namespace vae4as
