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
#include "vae4as/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vae4as/errors.hpp"

namespace vae4as {

std::string to_string(AlarmSource source) {
    switch (source) {
        case AlarmSource::ks:
            return "ks";
        case AlarmSource::distance:
            return "distance";
        case AlarmSource::none:
            break;
    }
    return "none";
}

double ks_effective_size(std::size_t n, std::size_t m) {
    const auto a = static_cast<double>(n);
    const auto b = static_cast<double>(m);
    return a * b / (a + b);
}

double ks_p_value(double ks_dis, double n_eff) {
    const double root = std::sqrt(n_eff);
    const double gamma = (root + 0.12 + 0.11 / root) * ks_dis;
    if (gamma < 1e-8) {
        return 1.0;
    }
    double p = 0.0;
    if (gamma < 1.18) {
        // The alternating series needs ~3.7/gamma terms here; use its theta-function
        // dual, which converges in a handful of terms for small gamma.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * gamma * gamma));
            cdf += term;
            if (term < 1e-17 * cdf) {
                break;
            }
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / gamma;
        p = 1.0 - cdf;
    } else {
        // relative cutoff keeps the tiny tail probabilities reported in the event log
        double sign = 1.0;
        for (int i = 1; i <= 100; ++i) {
            const double term = 2.0 * sign * std::exp(-2.0 * i * i * gamma * gamma);
            p += term;
            if (std::abs(term) < 1e-12 * std::abs(p)) {
                break;
            }
            sign = -sign;
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

double ks_statistic_sorted(std::span<const double> a, std::span<const double> b) {
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) {
            ++i;
        }
        while (j < b.size() && b[j] == v) {
            ++j;
        }
        worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return worst;
}

KsResult ks_two_sample(std::span<const double> ref_sample, std::span<const double> mov_sample, std::size_t dimension) {
    if (ref_sample.size() != mov_sample.size()) {
        throw ContractViolation("ks_two_sample: samples must have equal size");
    }
    if (ref_sample.size() < 2) {
        throw ContractViolation("ks_two_sample: samples need at least 2 values");
    }
    Vector a(ref_sample.begin(), ref_sample.end());
    Vector b(mov_sample.begin(), mov_sample.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KsResult r;
    r.dimension = dimension;
    r.ks_dis = ks_statistic_sorted(a, b);
    r.p_value = ks_p_value(r.ks_dis, ks_effective_size(a.size(), b.size()));
    return r;
}

DriftState::DriftState(std::size_t w_drift, std::size_t w_distance, std::int64_t expiry, double warn_level,
                       double alarm_level)
    : ref_driftx(w_drift), mov_driftx(w_drift), mov_an(w_distance), expiry_time(expiry), p_warn(warn_level),
      p_alarm(alarm_level) {
    if (!(alarm_level < warn_level)) {
        throw ContractViolation("DriftState: P_alarm must be below P_warn");
    }
    if (expiry <= 0) {
        throw ContractViolation("DriftState: expiry_time must be positive");
    }
}

void DriftState::raise_alarm(AlarmSource source) {
    flag_alarm = true;
    alarm_source = source;
}

void DriftState::reset() {
    flag_warn = false;
    flag_alarm = false;
    alarm_source = AlarmSource::none;
    warn_raised_at.reset();
    ref_driftx.clear();
    mov_driftx.clear();
    mov_warn.clear();
    mov_an.clear();
    mov_an_times.clear();
}

void DriftState::push_anomaly(Vector x, std::int64_t t) {
    if (mov_an.push(std::move(x))) {
        mov_an_times.pop_front();
    }
    mov_an_times.push_back(t);
}

void DriftState::expire_anomalies(std::int64_t t, std::int64_t horizon) {
    if (horizon <= 0) {
        return;
    }
    while (!mov_an_times.empty() && t - mov_an_times.front() >= horizon) {
        mov_an_times.pop_front();
        mov_an.pop_front();
    }
}

double KsScan::min_p_value() const {
    double p = 1.0;
    for (const auto& r : per_dimension) {
        p = std::min(p, r.p_value);
    }
    return p;
}

KsScan ks_scan_sorted(std::span<const Vector> ref_columns, std::span<const Vector> mov_columns, DriftState& state,
                      std::int64_t t) {
    if (ref_columns.size() != mov_columns.size()) {
        throw ContractViolation("ks_scan: latent dimension mismatch");
    }
    KsScan scan;
    const bool already_warned = state.flag_warn;
    for (std::size_t i = 0; i < ref_columns.size(); ++i) {
        const auto& a = ref_columns[i];
        const auto& b = mov_columns[i];
        if (a.size() < 2 || b.size() < 2) {
            throw ContractViolation("ks_scan: each latent column needs at least two values");
        }
        KsResult r;
        r.dimension = i;
        r.ks_dis = ks_statistic_sorted(a, b);
        r.p_value = ks_p_value(r.ks_dis, ks_effective_size(a.size(), b.size()));
        scan.per_dimension.push_back(r);

        if (!already_warned && r.p_value <= state.p_warn && !state.flag_warn) {
            state.flag_warn = true;
            state.warn_raised_at = t;
            scan.warn_raised = true;
        }
        if (r.p_value <= state.p_alarm && !state.flag_alarm) {
            state.raise_alarm(AlarmSource::ks);
            scan.alarm_raised = true;
        }
    }
    return scan;
}

std::vector<Vector> sorted_latent_columns(const VaeModel& model, const SlidingWindow<Vector>& window) {
    std::vector<Vector> columns(model.latent_dim);
    for (auto& c : columns) {
        c.reserve(window.size());
    }
    for (const auto& x : window) {
        const auto code = encode(model, x);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            columns[i].push_back(code.mu[i]);
        }
    }
    for (auto& c : columns) {
        std::sort(c.begin(), c.end());
    }
    return columns;
}

KsScan ks_drift_scan(const VaeModel& model, DriftState& state, std::int64_t t) {
    if (!state.ref_driftx.full() || !state.mov_driftx.full()) {
        throw ContractViolation("ks_drift_scan: both drift windows must be full");
    }
    const auto ref = sorted_latent_columns(model, state.ref_driftx);
    const auto mov = sorted_latent_columns(model, state.mov_driftx);
    return ks_scan_sorted(ref, mov, state, t);
}

namespace {

template <typename Rows>
double frobenius(std::span<const Vector> a, const Rows& b) {
    if (a.size() != b.size()) {
        throw ContractViolation("window_distance: row counts differ");
    }
    double s = 0.0;
    std::size_t r = 0;
    for (const auto& row : b) {
        const auto& ref = a[r++];
        if (ref.size() != row.size()) {
            throw ContractViolation("window_distance: column counts differ");
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d = ref[j] - row[j];
            s += d * d;
        }
    }
    return std::sqrt(s);
}

}// namespace

double window_distance(std::span<const Vector> a, std::span<const Vector> b) { return frobenius(a, b); }

double window_distance(std::span<const Vector> a, const SlidingWindow<Vector>& b) { return frobenius(a, b); }

namespace {

// Draws 2w distinct indices from [0, n) into the front of idx (partial Fisher-Yates).
void draw_indices(std::vector<std::size_t>& idx, std::size_t n, std::size_t count, Rng& rng) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
}

std::pair<double, double> mean_std(const Vector& v) {
    const auto n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double d : v) {
        var += (d - mean) * (d - mean);
    }
    return {mean, std::sqrt(var / n)};
}

Vector bootstrap_distances(std::span<const Vector> pool, std::span<const Vector> other, std::size_t w,
                           std::size_t n_boot, Rng& rng) {
    std::vector<std::size_t> idx;
    std::vector<std::size_t> other_idx;
    std::vector<Vector> a(w);
    std::vector<Vector> b(w);
    Vector distances;
    distances.reserve(n_boot);
    for (std::size_t rep = 0; rep < n_boot; ++rep) {
        if (other.empty()) {
            draw_indices(idx, pool.size(), 2 * w, rng);
            for (std::size_t i = 0; i < w; ++i) {
                a[i] = pool[idx[i]];
                b[i] = pool[idx[w + i]];
            }
        } else {
            draw_indices(idx, pool.size(), w, rng);
            draw_indices(other_idx, other.size(), w, rng);
            for (std::size_t i = 0; i < w; ++i) {
                a[i] = pool[idx[i]];
                b[i] = other[other_idx[i]];
            }
        }
        distances.push_back(window_distance(a, b));
    }
    return distances;
}

}// namespace

double calibrate_distance_threshold(std::span<const Vector> pool, std::size_t w, std::size_t n_boot, Rng& rng) {
    if (w == 0 || pool.size() < 2 * w) {
        throw DataError("calibrate_distance_threshold: need at least " + std::to_string(2 * w)
                        + " anomalous reference instances, got " + std::to_string(pool.size()));
    }
    if (n_boot == 0) {
        throw ContractViolation("calibrate_distance_threshold: n_boot must be positive");
    }
    const auto [mean, sd] = mean_std(bootstrap_distances(pool, {}, w, n_boot, rng));
    return mean + 3.0 * sd;
}

double calibrate_distance_threshold(std::span<const Vector> pool, std::span<const Vector> normals, std::size_t w,
                                    std::size_t n_boot, Rng& rng) {
    const double within = calibrate_distance_threshold(pool, w, n_boot, rng);
    if (normals.size() < w) {
        return within;
    }
    const double anomaly_mean = mean_std(bootstrap_distances(pool, {}, w, n_boot, rng)).first;
    const double cross_mean = mean_std(bootstrap_distances(pool, normals, w, n_boot, rng)).first;
    return std::max(within, 0.5 * (anomaly_mean + cross_mean));
}

bool warning_expiry_update(DriftState& state, std::int64_t t) {
    if (state.flag_warn && !state.flag_alarm && state.warn_raised_at && t - *state.warn_raised_at > state.expiry_time) {
        state.flag_warn = false;
        state.warn_raised_at.reset();
        state.mov_warn.clear();
        return true;
    }
    return false;
}

}// namespace vae4as
