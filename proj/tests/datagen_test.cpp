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
#include <filesystem>
#include <numbers>
#include <fstream>

#include "vae4as/datagen.hpp"
#include "vae4as/errors.hpp"
#include "vae4as/normalizer.hpp"

using namespace vae4as;

namespace {

std::string temp_file(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("vae4as_" + name);
    std::ofstream(path) << body;
    return path.string();
}

}// namespace

TEST(Builtin, SeaLayout) {
    const auto spec = builtin_stream("sea");
    EXPECT_EQ(spec.length, 15000);
    EXPECT_EQ(spec.drift_times, (std::vector<std::int64_t>{5000, 10000}));
    const std::vector<std::pair<std::int64_t, std::int64_t>> intervals{{2000, 2100}, {7000, 7100}, {12000, 12100}};
    EXPECT_EQ(spec.anomalous_intervals, intervals);
    EXPECT_EQ(spec.anomalous_steps(), 300);
    const auto stream = generate_stream(spec, 1);
    ASSERT_EQ(stream.size(), 15000u);
    const auto anomalous = std::count_if(stream.begin(), stream.end(), [](const auto& i) { return i.y_true == 1; });
    EXPECT_EQ(anomalous, 300);
    EXPECT_EQ(stream.front().t, 1);
    EXPECT_EQ(stream[1998].y_true, 0);// t = 1999
    EXPECT_EQ(stream[1999].y_true, 1);
    EXPECT_EQ(stream[2098].y_true, 1);
    EXPECT_EQ(stream[2099].y_true, 0);
}

TEST(Builtin, SineAnomaliesBelowCurve) {
    const auto spec = builtin_stream("sine");
    for (const auto& inst : generate_stream(spec, 2)) {
        if (inst.y_true == 1 && inst.t < spec.drift_times[0]) {
            EXPECT_LT(inst.x[1], std::sin(inst.x[0]) - 1.0);
            EXPECT_GE(inst.x[0], 0.0);
            EXPECT_LE(inst.x[0], std::numbers::pi);
            EXPECT_GE(inst.x[1], -1.0);
        }
    }
}

TEST(Builtin, VibConcepts) {
    const auto spec = builtin_stream("vib");
    EXPECT_EQ(spec.n_features, 10u);
    const auto stream = generate_stream(spec, 3);
    auto class0_mean = [&stream](std::int64_t from, std::int64_t to) {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& inst : stream) {
            if (inst.t >= from && inst.t < to && inst.y_true == 0) {
                for (double v : inst.x) {
                    s += v;
                    ++n;
                }
            }
        }
        return s / static_cast<double>(n);
    };
    EXPECT_NEAR(class0_mean(1, 7500), 0.0, 0.03);
    EXPECT_NEAR(class0_mean(7501, 15000), 3.0, 0.03);
    EXPECT_EQ(spec.concepts[1].normal.shape, RegionShape::gaussian);
    EXPECT_EQ(spec.concepts[1].normal.stddev, 1.0);
}

TEST(Builtin, EveryInstanceSatisfiesActivePredicateProperty) {
    for (const auto& name : {"sea", "circle", "sine"}) {
        const auto spec = builtin_stream(name);
        for (const auto& inst : generate_stream(spec, 4)) {
            const auto& c = spec.concepts[spec.concept_index(inst.t)];
            EXPECT_TRUE((inst.y_true ? c.anomalous : c.normal).contains(inst.x)) << name << " t=" << inst.t;
            EXPECT_EQ(inst.y_true == 1, spec.is_anomalous(inst.t));
        }
    }
}

TEST(Builtin, DriftSwitchesConcept) {
    const auto spec = builtin_stream("sea");
    EXPECT_EQ(spec.concept_index(4999), 0u);
    EXPECT_EQ(spec.concept_index(5000), 1u);
    EXPECT_EQ(spec.concept_index(10000), 2u);
    for (const auto& inst : generate_stream(spec, 5)) {
        if (inst.y_true == 0 && inst.t >= 5000 && inst.t < 10000) {
            EXPECT_GE(inst.x[0] + inst.x[1], 15.0);
        }
    }
}

TEST(Builtin, SeededReproducible) {
    const auto spec = builtin_stream("circle");
    const auto a = generate_stream(spec, 9);
    const auto b = generate_stream(spec, 9);
    const auto c = generate_stream(spec, 10);
    ASSERT_EQ(a.size(), b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        differs = differs || a[i].x != c[i].x;
    }
    EXPECT_TRUE(differs);
}

TEST(Builtin, UnknownName) { EXPECT_THROW(builtin_stream("nope"), ConfigError); }

TEST(Pretraining, SizesAndLabels) {
    const auto spec = builtin_stream("sea");
    const auto sets = make_pretraining_sets(spec, 1);
    EXPECT_EQ(sets.train.size(), 1800u);
    ASSERT_EQ(sets.validation.size(), 250u);
    const auto anomalous =
        std::count_if(sets.validation.begin(), sets.validation.end(), [](const auto& i) { return i.y_true == 1; });
    EXPECT_EQ(anomalous, 50);
    EXPECT_EQ(sets.anomalous_reference.size(), 500u);
    for (const auto& x : sets.train) {
        EXPECT_TRUE(spec.concepts[0].normal.contains(x));
    }
    for (const auto& x : sets.anomalous_reference) {
        EXPECT_TRUE(spec.concepts[0].anomalous.contains(x));
    }
}

TEST(Pretraining, SeededReproducible) {
    const auto spec = builtin_stream("sine");
    const auto a = make_pretraining_sets(spec, 6);
    const auto b = make_pretraining_sets(spec, 6);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.anomalous_reference, b.anomalous_reference);
    ASSERT_EQ(a.validation.size(), b.validation.size());
    for (std::size_t i = 0; i < a.validation.size(); ++i) {
        EXPECT_EQ(a.validation[i].x, b.validation[i].x);
        EXPECT_EQ(a.validation[i].y_true, b.validation[i].y_true);
    }
}

TEST(Pretraining, InfeasibleRegion) {
    auto spec = builtin_stream("sea");
    spec.concepts[0].normal = ClassRegion::sum_at_least(25.0);
    EXPECT_THROW(spec.validate(), ConfigError);
    EXPECT_THROW(make_pretraining_sets(spec, 1), ConfigError);
}

TEST(Csv, WellFormed) {
    const auto path = temp_file("ok.csv", "a,b,label\n1,2,0\n3,4,1\n5,6,0\n");
    const auto rows = load_csv_stream(path);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].x, (Vector{1.0, 2.0}));
    EXPECT_EQ(rows[1].y_true, 1);
    EXPECT_EQ(rows[2].t, 3);
}

TEST(Csv, MissingFieldNamesLine) {
    const auto path = temp_file("short.csv", "a,b,label\n1,0\n");
    try {
        load_csv_stream(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
}

TEST(Csv, LabelOutsideBinary) {
    const auto path = temp_file("label.csv", "a,label\n1,2\n");
    try {
        load_csv_stream(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("schema"), std::string::npos) << e.what();
    }
}

TEST(Csv, RoundTrip) {
    const auto stream = generate_stream(builtin_stream("vib"), 1);
    const std::vector<LabeledInstance> head(stream.begin(), stream.begin() + 50);
    const auto path = (std::filesystem::temp_directory_path() / "vae4as_rt.csv").string();
    write_csv_stream(path, head);
    const auto back = load_csv_stream(path);
    ASSERT_EQ(back.size(), head.size());
    for (std::size_t i = 0; i < head.size(); ++i) {
        EXPECT_EQ(back[i].x, head[i].x);
        EXPECT_EQ(back[i].y_true, head[i].y_true);
    }
}

TEST(Csv, MissingFile) { EXPECT_THROW(load_csv_stream("/nonexistent/x.csv"), DataError); }

TEST(ScaledDrift, ScalesPerClass) {
    std::vector<LabeledInstance> stream{{{1.0, 2.0}, 0, 1}, {{1.0, 2.0}, 0, 2}, {{1.0, 2.0}, 1, 3}};
    apply_scaled_drift(stream, {2, 3.0, 0.5});
    EXPECT_EQ(stream[0].x, (Vector{1.0, 2.0}));
    EXPECT_EQ(stream[1].x, (Vector{3.0, 6.0}));
    EXPECT_EQ(stream[2].x, (Vector{0.5, 1.0}));
}

TEST(Normalizer, MinMax) {
    const std::vector<Vector> train{{0.0, 4.0}, {10.0, 4.0}};
    const auto norm = Normalizer::fit(train);
    EXPECT_EQ(norm.apply(Vector{5.0, 4.0}), (Vector{0.5, 0.5}));
    EXPECT_EQ(norm.apply(Vector{-3.0, 100.0}), (Vector{0.0, 0.5}));
    EXPECT_EQ(norm.apply(Vector{12.0, -1.0})[0], 1.0);
}
