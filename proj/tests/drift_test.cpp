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

#include <algorithm>
#include <cmath>

#include "vae4as/drift.hpp"
#include "vae4as/errors.hpp"

using namespace vae4as;

namespace {

// Two-sample statistic by direct CDF evaluation at every sample point.
double brute_force_statistic(const Vector& a, const Vector& b) {
    Vector points = a;
    points.insert(points.end(), b.begin(), b.end());
    double worst = 0.0;
    for (double v : points) {
        const auto fa = static_cast<double>(std::count_if(a.begin(), a.end(), [v](double u) { return u <= v; }));
        const auto fb = static_cast<double>(std::count_if(b.begin(), b.end(), [v](double u) { return u <= v; }));
        worst = std::max(worst, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
    }
    return worst;
}

// 2 sum (-1)^(i-1) exp(-2 i^2 gamma^2), 10^5 terms in long double.
double series_p_value(double d, double n_eff) {
    const long double root = std::sqrt(static_cast<long double>(n_eff));
    const long double gamma = (root + 0.12L + 0.11L / root) * d;
    long double p = 0.0L;
    for (int i = 1; i <= 100000; ++i) {
        const long double term = std::exp(-2.0L * i * i * gamma * gamma);
        p += (i % 2 == 1 ? 2.0L : -2.0L) * term;
        if (term == 0.0L) {
            break;
        }
    }
    return static_cast<double>(std::clamp(p, 0.0L, 1.0L));
}

Vector normal_sample(Rng& rng, double mean, std::size_t n) {
    std::normal_distribution<double> normal(mean, 1.0);
    Vector v(n);
    for (auto& x : v) {
        x = normal(rng);
    }
    return v;
}

Vector sorted(Vector v) {
    std::sort(v.begin(), v.end());
    return v;
}

DriftState fresh_state() { return DriftState(100, 50, 100, 0.01, 0.001); }

}// namespace

TEST(KsTest, IdenticalSamples) {
    const Vector a{0.3, 0.1, 0.9, 0.5};
    const auto r = ks_two_sample(a, a);
    EXPECT_EQ(r.ks_dis, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTest, DisjointConstantSamples) {
    const Vector zeros(100, 0.0);
    const Vector ones(100, 1.0);
    EXPECT_EQ(ks_effective_size(100, 100), 50.0);
    const auto r = ks_two_sample(zeros, ones);
    EXPECT_EQ(r.ks_dis, 1.0);
    EXPECT_LT(r.p_value, 1e-20);
    EXPECT_GT(r.p_value, 0.0);
}

TEST(KsTest, EffectiveSize) {
    EXPECT_EQ(ks_effective_size(200, 200), 100.0);
    EXPECT_DOUBLE_EQ(ks_effective_size(100, 300), 75.0);
}

TEST(KsTest, ShiftedNormalsMatchSeriesOracle) {
    Rng rng(2024);
    const auto a = normal_sample(rng, 0.0, 1000);
    const auto b = normal_sample(rng, 0.5, 1000);
    const auto r = ks_two_sample(a, b);
    EXPECT_EQ(r.ks_dis, brute_force_statistic(a, b));
    EXPECT_NEAR(r.p_value, series_p_value(r.ks_dis, 500.0), 1e-6);
    EXPECT_LT(r.p_value, 1e-10);
}

TEST(KsTest, PValueMatchesSeriesAcrossRangeProperty) {
    for (int i = 1; i <= 400; ++i) {
        const double d = i / 400.0;
        for (double n_eff : {5.0, 50.0, 500.0}) {
            EXPECT_NEAR(ks_p_value(d, n_eff), series_p_value(d, n_eff), 1e-9) << d << " " << n_eff;
        }
    }
}

TEST(KsTest, RandomPairsProperty) {
    Rng rng(77);
    std::uniform_int_distribution<std::size_t> size(2, 120);
    std::uniform_int_distribution<int> grid(0, 9);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = size(rng);
        Vector a(n);
        Vector b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = grid(rng);// ties on purpose
            b[i] = grid(rng) + (trial % 3);
        }
        const auto r = ks_two_sample(a, b);
        EXPECT_DOUBLE_EQ(r.ks_dis, brute_force_statistic(a, b));
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
        EXPECT_EQ(ks_two_sample(b, a).ks_dis, r.ks_dis);
    }
}

TEST(KsTest, SizeContract) {
    EXPECT_THROW(ks_two_sample(Vector{1.0, 2.0}, Vector{1.0, 2.0, 3.0}), ContractViolation);
    EXPECT_THROW(ks_two_sample(Vector{1.0}, Vector{1.0}), ContractViolation);
}

TEST(KsScan, PermutedCopyRaisesNothing) {
    Rng rng(5);
    auto col = normal_sample(rng, 0.0, 100);
    auto permuted = col;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    const std::vector<Vector> ref{sorted(col), sorted(col)};
    const std::vector<Vector> mov{sorted(permuted), sorted(permuted)};
    auto state = fresh_state();
    const auto scan = ks_scan_sorted(ref, mov, state, 10);
    for (const auto& r : scan.per_dimension) {
        EXPECT_EQ(r.p_value, 1.0);
    }
    EXPECT_FALSE(state.flag_warn);
    EXPECT_FALSE(state.flag_alarm);
}

TEST(KsScan, FiveSigmaShiftAlarms) {
    Rng rng(6);
    const std::vector<Vector> ref{sorted(normal_sample(rng, 0.0, 1000))};
    const std::vector<Vector> mov{sorted(normal_sample(rng, 5.0, 1000))};
    auto state = fresh_state();
    const auto scan = ks_scan_sorted(ref, mov, state, 10);
    EXPECT_TRUE(scan.alarm_raised);
    EXPECT_TRUE(state.flag_alarm);
    EXPECT_EQ(state.alarm_source, AlarmSource::ks);
}

TEST(KsScan, WarnLevelOnly) {
    // ranks 0..99 against 24..123: statistic 0.24
    Vector ref(100);
    Vector mov(100);
    for (int i = 0; i < 100; ++i) {
        ref[static_cast<std::size_t>(i)] = i;
        mov[static_cast<std::size_t>(i)] = i + 24;
    }
    const double p = ks_p_value(0.24, 50.0);
    ASSERT_GT(p, 0.001);
    ASSERT_LT(p, 0.01);
    auto state = fresh_state();
    const std::vector<Vector> r{ref, ref};
    const std::vector<Vector> m{ref, mov};
    const auto scan = ks_scan_sorted(r, m, state, 7);
    EXPECT_NEAR(scan.min_p_value(), p, 1e-15);
    EXPECT_TRUE(state.flag_warn);
    EXPECT_EQ(state.warn_raised_at, 7);
    EXPECT_FALSE(state.flag_alarm);
}

TEST(KsScan, EscalatesWhileWarned) {
    auto state = fresh_state();
    state.flag_warn = true;
    state.warn_raised_at = 3;
    const std::vector<Vector> ref{Vector(100, 0.0)};
    const std::vector<Vector> mov{Vector(100, 1.0)};
    const auto scan = ks_scan_sorted(ref, mov, state, 9);
    EXPECT_FALSE(scan.warn_raised);
    EXPECT_TRUE(scan.alarm_raised);
    EXPECT_EQ(state.warn_raised_at, 3);
}

TEST(WindowDistance, ClosedForms) {
    const std::vector<Vector> zeros(50, Vector(10, 0.0));
    const std::vector<Vector> ones(50, Vector(10, 1.0));
    EXPECT_EQ(window_distance(zeros, zeros), 0.0);
    EXPECT_NEAR(window_distance(zeros, ones), std::sqrt(500.0), 1e-12);
    EXPECT_NEAR(window_distance(zeros, ones), 22.3607, 1e-4);
}

TEST(WindowDistance, MetricAxiomsProperty) {
    Rng rng(8);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    auto matrix = [&] {
        std::vector<Vector> m(6, Vector(3));
        for (auto& row : m) {
            for (auto& v : row) {
                v = unit(rng);
            }
        }
        return m;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = matrix();
        const auto b = matrix();
        const auto c = matrix();
        EXPECT_EQ(window_distance(a, a), 0.0);
        EXPECT_EQ(window_distance(a, b), window_distance(b, a));
        EXPECT_LE(window_distance(a, c), window_distance(a, b) + window_distance(b, c) + 1e-12);
    }
}

TEST(WindowDistance, ShapeContract) {
    const std::vector<Vector> a(3, Vector(2, 0.0));
    const std::vector<Vector> b(4, Vector(2, 0.0));
    EXPECT_THROW(window_distance(a, b), ContractViolation);
}

TEST(Calibration, IdenticalPoolGivesZero) {
    const std::vector<Vector> pool(120, Vector{0.4, 0.4});
    Rng rng(1);
    EXPECT_EQ(calibrate_distance_threshold(pool, 50, 100, rng), 0.0);
}

TEST(Calibration, ExceedsMedianBootstrapDistance) {
    Rng gen(13);
    std::vector<Vector> pool(500);
    for (auto& x : pool) {
        x = normal_sample(gen, 5.0, 10);
    }
    Rng rng(14);
    const double thre = calibrate_distance_threshold(pool, 50, 500, rng);

    Vector distances;
    for (int rep = 0; rep < 301; ++rep) {
        auto copy = pool;
        std::shuffle(copy.begin(), copy.end(), gen);
        distances.push_back(window_distance(std::span<const Vector>(copy).first(50),
                                             std::span<const Vector>(copy).subspan(50, 50)));
    }
    std::nth_element(distances.begin(), distances.begin() + 150, distances.end());
    EXPECT_GT(thre, distances[150]);
}

TEST(Calibration, SeededReproducible) {
    Rng gen(3);
    std::vector<Vector> pool(200);
    for (auto& x : pool) {
        x = normal_sample(gen, 0.0, 2);
    }
    Rng a(9);
    Rng b(9);
    EXPECT_EQ(calibrate_distance_threshold(pool, 50, 200, a), calibrate_distance_threshold(pool, 50, 200, b));
}

TEST(Calibration, NormalsRaiseThresholdToMidpoint) {
    Rng gen(4);
    std::vector<Vector> pool(200);
    std::vector<Vector> normals(200);
    for (auto& x : pool) {
        x = normal_sample(gen, 0.0, 2);
    }
    for (auto& x : normals) {
        x = normal_sample(gen, 10.0, 2);
    }
    Rng a(1);
    Rng b(1);
    const double plain = calibrate_distance_threshold(pool, 50, 200, a);
    const double widened = calibrate_distance_threshold(pool, normals, 50, 200, b);
    EXPECT_GT(widened, plain);
    // anomaly/normal rows differ by about 10 per coordinate: midpoint near sqrt(50 * 200) / 2
    EXPECT_GT(widened, 0.4 * std::sqrt(50.0 * 200.0));
}

TEST(Calibration, PoolTooSmall) {
    const std::vector<Vector> pool(99, Vector{0.0});
    Rng rng(1);
    EXPECT_THROW(calibrate_distance_threshold(pool, 50, 10, rng), DataError);
}

TEST(WarningExpiry, ClearsAfterExpiry) {
    auto state = fresh_state();
    state.flag_warn = true;
    state.warn_raised_at = 100;
    state.mov_warn = {Vector{1.0}, Vector{2.0}};
    EXPECT_FALSE(warning_expiry_update(state, 150));
    EXPECT_TRUE(state.flag_warn);
    EXPECT_EQ(state.mov_warn.size(), 2u);
    EXPECT_FALSE(warning_expiry_update(state, 200));
    EXPECT_TRUE(warning_expiry_update(state, 201));
    EXPECT_FALSE(state.flag_warn);
    EXPECT_TRUE(state.mov_warn.empty());
}

TEST(WarningExpiry, NoWarnIsNoOp) {
    auto state = fresh_state();
    EXPECT_FALSE(warning_expiry_update(state, 1000));
    EXPECT_FALSE(state.flag_warn);
}

TEST(DriftState, ResetKeepsReference) {
    auto state = fresh_state();
    state.ref_disx = {Vector{1.0}};
    state.ref_driftx.push(Vector{1.0});
    state.mov_driftx.push(Vector{1.0});
    state.push_anomaly(Vector{1.0}, 4);
    state.mov_warn.push_back(Vector{1.0});
    state.flag_warn = true;
    state.raise_alarm(AlarmSource::distance);
    state.reset();
    EXPECT_FALSE(state.flag_warn);
    EXPECT_FALSE(state.flag_alarm);
    EXPECT_EQ(state.alarm_source, AlarmSource::none);
    EXPECT_TRUE(state.ref_driftx.empty());
    EXPECT_TRUE(state.mov_driftx.empty());
    EXPECT_TRUE(state.mov_an.empty());
    EXPECT_TRUE(state.mov_warn.empty());
    EXPECT_EQ(state.ref_disx.size(), 1u);
}

TEST(DriftState, AnomalyHorizon) {
    DriftState state(10, 3, 100, 0.01, 0.001);
    for (std::int64_t t : {1, 2, 5, 9}) {
        state.push_anomaly(Vector{static_cast<double>(t)}, t);
    }
    EXPECT_EQ(state.mov_an.size(), 3u);
    EXPECT_EQ(state.mov_an.front()[0], 2.0);
    state.expire_anomalies(7, 5);
    ASSERT_EQ(state.mov_an.size(), 2u);
    EXPECT_EQ(state.mov_an.front()[0], 5.0);
    EXPECT_EQ(state.mov_an_times.front(), 5);
    state.expire_anomalies(100, 0);
    EXPECT_EQ(state.mov_an.size(), 2u);
}
