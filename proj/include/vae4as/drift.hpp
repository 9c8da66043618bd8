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
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vae4as/sliding_window.hpp"
#include "vae4as/vae.hpp"

namespace vae4as {

enum class AlarmSource { none, ks, distance };

std::string to_string(AlarmSource source);

struct KsResult {
    double ks_dis = 0.0;
    double p_value = 1.0;
    std::size_t dimension = 0;
};

/// Effective sample size for two samples of size n and m; n/2 when n == m.
double ks_effective_size(std::size_t n, std::size_t m);

/// Asymptotic Kolmogorov tail probability 2 * sum_{i>=1} (-1)^(i-1) exp(-2 i^2 gamma^2)
/// with gamma = (sqrt(n_eff) + 0.12 + 0.11 / sqrt(n_eff)) * ks_dis.
double ks_p_value(double ks_dis, double n_eff);

/// Largest gap between the empirical CDFs of two ascending samples.
double ks_statistic_sorted(std::span<const double> a, std::span<const double> b);

/// Two-sample KS test on equal-size samples (size >= 2).
KsResult ks_two_sample(std::span<const double> ref_sample, std::span<const double> mov_sample,
                       std::size_t dimension = 0);

struct DriftState {
    bool flag_warn = false;
    bool flag_alarm = false;
    AlarmSource alarm_source = AlarmSource::none;
    std::optional<std::int64_t> warn_raised_at;

    SlidingWindow<Vector> ref_driftx;
    SlidingWindow<Vector> mov_driftx;
    std::vector<Vector> mov_warn;
    std::vector<Vector> ref_disx;
    SlidingWindow<Vector> mov_an;
    std::deque<std::int64_t> mov_an_times;// arrival step of each mov_an row

    double dis_thre = 0.0;
    std::int64_t expiry_time = 100;
    double p_warn = 0.01;
    double p_alarm = 0.001;

    DriftState(std::size_t w_drift, std::size_t w_distance, std::int64_t expiry, double warn_level,
               double alarm_level);

    void raise_alarm(AlarmSource source);
    void push_anomaly(Vector x, std::int64_t t);
    /// Forgets mov_an rows that arrived more than `horizon` steps before t; 0 keeps everything.
    void expire_anomalies(std::int64_t t, std::int64_t horizon);
    /// Clears flags and every window except ref_disx.
    void reset();
};

struct KsScan {
    std::vector<KsResult> per_dimension;
    bool warn_raised = false;
    bool alarm_raised = false;

    double min_p_value() const;
};

/// Runs the per-dimension KS test on pre-sorted latent columns and updates the flags.
/// While a warning is active only the alarm level is checked.
KsScan ks_scan_sorted(std::span<const Vector> ref_columns, std::span<const Vector> mov_columns, DriftState& state,
                      std::int64_t t);

/// Encodes both drift windows (z = mu) and runs ks_scan_sorted. Requires both windows full.
KsScan ks_drift_scan(const VaeModel& model, DriftState& state, std::int64_t t);

/// Per-dimension latent means of `window`, one ascending column per latent dimension.
std::vector<Vector> sorted_latent_columns(const VaeModel& model, const SlidingWindow<Vector>& window);

/// Frobenius norm of (a - b); rows are paired in order.
double window_distance(std::span<const Vector> a, std::span<const Vector> b);
double window_distance(std::span<const Vector> a, const SlidingWindow<Vector>& b);

/// mean + 3 * std of `n_boot` distances between disjoint random size-w subsets of `pool`.
double calibrate_distance_threshold(std::span<const Vector> pool, std::size_t w, std::size_t n_boot, Rng& rng);

/// Raises the anomaly-only threshold to the midpoint between the mean anomaly/anomaly distance
/// and the mean anomaly/normal distance, so a few normal rows in mov_AN do not fire DD2.
double calibrate_distance_threshold(std::span<const Vector> pool, std::span<const Vector> normals, std::size_t w,
                                    std::size_t n_boot, Rng& rng);

/// Expires a warning that has outlived expiry_time without an alarm. Returns true if cleared.
bool warning_expiry_update(DriftState& state, std::int64_t t);

}// namespace vae4as
