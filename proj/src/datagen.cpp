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
#include "vae4as/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vae4as/errors.hpp"

namespace vae4as {

bool ClassRegion::contains(std::span<const double> x) const {
    switch (shape) {
        case RegionShape::sum_at_least:
            return x[0] + x[1] >= threshold;
        case RegionShape::sum_at_most:
            return x[0] + x[1] <= threshold;
        case RegionShape::disc: {
            const double dx = x[0] - center[0];
            const double dy = x[1] - center[1];
            return dx * dx + dy * dy <= radius * radius;
        }
        case RegionShape::above_sine:
            return x[1] > std::sin(x[0]) + threshold;
        case RegionShape::below_sine:
            return x[1] < std::sin(x[0]) + threshold;
        case RegionShape::gaussian:
            return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    }
    return false;
}

namespace {

constexpr std::size_t kFeasibilityTrials = 100000;
constexpr double kMinAcceptance = 1e-3;

Vector propose(const StreamSpec& spec, Rng& rng) {
    Vector x(spec.n_features);
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::uniform_real_distribution<double> u(spec.lower[j], spec.upper[j]);
        x[j] = u(rng);
    }
    return x;
}

double acceptance_rate(const StreamSpec& spec, const ClassRegion& region) {
    if (region.shape == RegionShape::gaussian) {
        return 1.0;
    }
    Rng rng(0x5eedULL);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < kFeasibilityTrials; ++i) {
        hits += region.contains(propose(spec, rng)) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(kFeasibilityTrials);
}

Rng seeded(std::uint64_t seed, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
    return Rng(seq);
}

}// namespace

void StreamSpec::validate() const {
    if (n_features == 0) {
        throw ConfigError(name + ": n_features must be positive");
    }
    if (length <= 0) {
        throw ConfigError(name + ": length must be positive");
    }
    for (std::size_t i = 0; i < drift_times.size(); ++i) {
        if (drift_times[i] < 1 || drift_times[i] > length) {
            throw ConfigError(name + ": drift time outside [1, length]");
        }
        if (i > 0 && drift_times[i] <= drift_times[i - 1]) {
            throw ConfigError(name + ": drift times must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < anomalous_intervals.size(); ++i) {
        const auto [start, end] = anomalous_intervals[i];
        if (start < 1 || end <= start || end > length + 1) {
            throw ConfigError(name + ": malformed anomalous interval");
        }
        if (i > 0 && start < anomalous_intervals[i - 1].second) {
            throw ConfigError(name + ": anomalous intervals must be disjoint and ordered");
        }
    }
    if (concepts.size() != drift_times.size() + 1) {
        throw ConfigError(name + ": need one concept per drift plus the initial one");
    }
    if (lower.size() != n_features || upper.size() != n_features) {
        throw ConfigError(name + ": feature box does not match n_features");
    }
    for (std::size_t j = 0; j < n_features; ++j) {
        if (!(lower[j] < upper[j])) {
            throw ConfigError(name + ": empty feature box");
        }
    }
    for (std::size_t c = 0; c < concepts.size(); ++c) {
        for (const auto* region : {&concepts[c].normal, &concepts[c].anomalous}) {
            if (region->shape != RegionShape::gaussian && n_features != 2) {
                throw ConfigError(name + ": geometric regions need exactly 2 features");
            }
            if (acceptance_rate(*this, *region) < kMinAcceptance) {
                throw ConfigError(name + ": concept " + std::to_string(c)
                                  + " has an infeasible region (rejection acceptance below 0.1%)");
            }
        }
    }
}

std::size_t StreamSpec::concept_index(std::int64_t t) const {
    return static_cast<std::size_t>(std::upper_bound(drift_times.begin(), drift_times.end(), t) - drift_times.begin());
}

bool StreamSpec::is_anomalous(std::int64_t t) const {
    return std::any_of(anomalous_intervals.begin(), anomalous_intervals.end(),
                       [t](const auto& iv) { return iv.first <= t && t < iv.second; });
}

std::int64_t StreamSpec::anomalous_steps() const {
    std::int64_t n = 0;
    for (const auto& [start, end] : anomalous_intervals) {
        n += std::min(end, length + 1) - start;
    }
    return n;
}

StreamSpec builtin_stream(const std::string& name) {
    StreamSpec s;
    s.name = name;
    if (name == "sea") {
        const Concept a{ClassRegion::sum_at_least(10.0), ClassRegion::sum_at_most(3.0)};
        const Concept b{ClassRegion::sum_at_least(15.0), ClassRegion::sum_at_most(4.0)};
        s.n_features = 2;
        s.length = 15000;
        s.drift_times = {5000, 10000};
        s.anomalous_intervals = {{2000, 2100}, {7000, 7100}, {12000, 12100}};
        s.concepts = {a, b, a};
        s.lower = {0.0, 0.0};
        s.upper = {10.0, 10.0};
    } else if (name == "circle") {
        const Concept a{ClassRegion::disc(0.6, 0.6, 0.2), ClassRegion::disc(0.2, 0.2, 0.2)};
        const Concept b{ClassRegion::disc(0.6, 0.6, 0.1), ClassRegion::disc(0.2, 0.2, 0.15)};
        s.n_features = 2;
        s.length = 15000;
        s.drift_times = {5000, 10000};
        s.anomalous_intervals = {{3000, 3200}, {8000, 8200}, {13000, 13200}};
        s.concepts = {a, b, a};
        s.lower = {0.0, 0.0};
        s.upper = {1.0, 1.0};
    } else if (name == "sine") {
        const Concept a{ClassRegion::above_sine(0.5), ClassRegion::below_sine(-1.0)};
        const Concept b{ClassRegion::above_sine(0.0), ClassRegion::below_sine(-1.1)};
        s.n_features = 2;
        s.length = 30000;
        s.drift_times = {10000, 20000};
        s.anomalous_intervals = {{5000, 5050}, {15000, 15050}, {25000, 25050}};
        s.concepts = {a, b, a};
        s.lower = {0.0, -1.0};
        s.upper = {std::numbers::pi, 1.0};
    } else if (name == "vib") {
        const Concept a{ClassRegion::gaussian(0.0, 1.0), ClassRegion::gaussian(5.0, 1.0)};
        const Concept b{ClassRegion::gaussian(3.0, 1.0), ClassRegion::gaussian(0.0, 0.5)};
        s.n_features = 10;
        s.length = 22500;
        s.drift_times = {7500, 15000};
        s.anomalous_intervals = {{3000, 3200}, {9000, 9200}, {17000, 17200}};
        s.concepts = {a, b, a};
        s.lower = Vector(10, -10.0);
        s.upper = Vector(10, 10.0);
    } else {
        throw ConfigError("unknown builtin dataset '" + name + "'");
    }
    return s;
}

std::vector<std::string> builtin_stream_names() { return {"sea", "circle", "sine", "vib"}; }

bool is_builtin_stream(const std::string& name) {
    const auto names = builtin_stream_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Vector sample_region(const StreamSpec& spec, const ClassRegion& region, Rng& rng) {
    if (region.shape == RegionShape::gaussian) {
        std::normal_distribution<double> normal(region.mean, region.stddev);
        Vector x(spec.n_features);
        for (auto& v : x) {
            v = normal(rng);
        }
        return x;
    }
    // validate() guarantees >= 0.1% acceptance, so this cap is never reached in practice
    for (std::size_t attempt = 0; attempt < 100 * kFeasibilityTrials; ++attempt) {
        Vector x = propose(spec, rng);
        if (region.contains(x)) {
            return x;
        }
    }
    throw ConfigError(spec.name + ": rejection sampling did not terminate");
}

StreamGenerator::StreamGenerator(StreamSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seeded(seed, 1)) {
    spec_.validate();
}

std::optional<LabeledInstance> StreamGenerator::next() {
    if (done()) {
        return std::nullopt;
    }
    const auto& concept_ = spec_.concepts[spec_.concept_index(t_)];
    LabeledInstance inst;
    inst.t = t_;
    inst.y_true = spec_.is_anomalous(t_) ? 1 : 0;
    inst.x = sample_region(spec_, inst.y_true ? concept_.anomalous : concept_.normal, rng_);
    ++t_;
    return inst;
}

std::vector<LabeledInstance> generate_stream(const StreamSpec& spec, std::uint64_t seed) {
    StreamGenerator gen(spec, seed);
    std::vector<LabeledInstance> out;
    out.reserve(static_cast<std::size_t>(spec.length));
    while (auto inst = gen.next()) {
        out.push_back(std::move(*inst));
    }
    return out;
}

PretrainingSets make_pretraining_sets(const StreamSpec& spec, std::uint64_t seed, const PretrainingSizes& sizes) {
    spec.validate();
    Rng rng = seeded(seed, 2);
    const auto& initial = spec.concepts.front();
    PretrainingSets sets;
    for (std::size_t i = 0; i < sizes.train; ++i) {
        sets.train.push_back(sample_region(spec, initial.normal, rng));
    }
    for (std::size_t i = 0; i < sizes.validation_normal; ++i) {
        sets.validation.push_back({sample_region(spec, initial.normal, rng), 0, 0});
    }
    for (std::size_t i = 0; i < sizes.validation_anomalous; ++i) {
        sets.validation.push_back({sample_region(spec, initial.anomalous, rng), 1, 0});
    }
    for (std::size_t i = 0; i < sizes.anomalous_reference; ++i) {
        sets.anomalous_reference.push_back(sample_region(spec, initial.anomalous, rng));
    }
    return sets;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                             : comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::string at_line(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line) + ": ";
}

}// namespace

std::vector<LabeledInstance> load_csv_stream(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') {
            continue;
        }
        header = split_csv(line);
        break;
    }
    if (header.size() < 2) {
        throw DataError(path + ": header row with at least one feature and a label column is required");
    }
    std::size_t label_col = header.size() - 1;
    const std::string wanted = schema.label_column.empty() ? "label" : schema.label_column;
    const auto found = std::find(header.begin(), header.end(), wanted);
    if (found != header.end()) {
        label_col = static_cast<std::size_t>(found - header.begin());
    } else if (!schema.label_column.empty()) {
        throw DataError(path + ": label column '" + wanted + "' not in header");
    }

    std::vector<LabeledInstance> out;
    std::int64_t t = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw DataError(at_line(path, line_no) + "expected " + std::to_string(header.size()) + " fields, got "
                            + std::to_string(fields.size()));
        }
        LabeledInstance inst;
        inst.t = t++;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto& f = fields[c];
            if (f.empty()) {
                throw DataError(at_line(path, line_no) + "missing value in column '" + header[c] + "'");
            }
            if (c == label_col) {
                if (f != "0" && f != "1") {
                    throw DataError(at_line(path, line_no) + "schema error: label must be 0 or 1, got '" + f + "'");
                }
                inst.y_true = f == "1" ? 1 : 0;
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw DataError(at_line(path, line_no) + "cannot parse '" + f + "' in column '" + header[c] + "'");
            }
            inst.x.push_back(v);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

void write_csv_stream(const std::string& path, std::span<const LabeledInstance> stream) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    const std::size_t d = stream.empty() ? 0 : stream.front().x.size();
    for (std::size_t j = 0; j < d; ++j) {
        out << 'x' << (j + 1) << ',';
    }
    out << "label\n";
    char buf[64];
    for (const auto& inst : stream) {
        for (double v : inst.x) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), v);
            out.write(buf, res.ptr - buf);
            out << ',';
        }
        out << inst.y_true << '\n';
    }
}

void apply_scaled_drift(std::vector<LabeledInstance>& stream, const ScaledDrift& drift) {
    for (auto& inst : stream) {
        if (inst.t < drift.at) {
            continue;
        }
        const double c = inst.y_true ? drift.anomalous_scale : drift.normal_scale;
        for (auto& v : inst.x) {
            v *= c;
        }
    }
}

}// namespace vae4as
