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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vae4as/nn.hpp"

namespace vae4as {

struct LabeledInstance {
    Vector x;
    int y_true = 0;
    std::int64_t t = 0;
};

enum class RegionShape { sum_at_least, sum_at_most, disc, above_sine, below_sine, gaussian };

/// Where one class of one concept lives. Geometric shapes are sampled by rejection
/// inside the stream's feature box; gaussian draws every feature i.i.d.
struct ClassRegion {
    RegionShape shape = RegionShape::gaussian;
    double threshold = 0.0;// sum bound, or sine offset
    std::array<double, 2> center{};
    double radius = 0.0;
    double mean = 0.0;
    double stddev = 1.0;

    static ClassRegion sum_at_least(double bound) { return {RegionShape::sum_at_least, bound}; }
    static ClassRegion sum_at_most(double bound) { return {RegionShape::sum_at_most, bound}; }
    static ClassRegion disc(double cx, double cy, double r) { return {RegionShape::disc, 0.0, {cx, cy}, r}; }
    static ClassRegion above_sine(double offset) { return {RegionShape::above_sine, offset}; }
    static ClassRegion below_sine(double offset) { return {RegionShape::below_sine, offset}; }
    static ClassRegion gaussian(double mu, double sigma) {
        return {RegionShape::gaussian, 0.0, {}, 0.0, mu, sigma};
    }

    bool contains(std::span<const double> x) const;
};

struct Concept {
    ClassRegion normal;
    ClassRegion anomalous;
};

struct StreamSpec {
    std::string name;
    std::size_t n_features = 2;
    std::int64_t length = 0;
    std::vector<std::int64_t> drift_times;
    /// [start, end) in stream steps; steps are numbered from 1.
    std::vector<std::pair<std::int64_t, std::int64_t>> anomalous_intervals;
    /// concepts[i] is active from drift_times[i - 1] on; concepts[0] from the start.
    std::vector<Concept> concepts;
    Vector lower;
    Vector upper;

    /// Throws ConfigError describing the first violated constraint, including any
    /// region that accepts fewer than 0.1% of 10^5 uniform proposals.
    void validate() const;
    std::size_t concept_index(std::int64_t t) const;
    bool is_anomalous(std::int64_t t) const;
    std::int64_t anomalous_steps() const;
};

/// Sea, Circle, Sine and Vib with recurrent drift (concepts A, B, A).
StreamSpec builtin_stream(const std::string& name);
std::vector<std::string> builtin_stream_names();
bool is_builtin_stream(const std::string& name);

/// Draws one point from `region` (rejection sampling inside the spec's feature box).
Vector sample_region(const StreamSpec& spec, const ClassRegion& region, Rng& rng);

/// Lazy, seeded stream over a spec.
class StreamGenerator {
  public:
    StreamGenerator(StreamSpec spec, std::uint64_t seed);

    bool done() const { return t_ > spec_.length; }
    std::optional<LabeledInstance> next();
    const StreamSpec& spec() const { return spec_; }

  private:
    StreamSpec spec_;
    Rng rng_;
    std::int64_t t_ = 1;
};

std::vector<LabeledInstance> generate_stream(const StreamSpec& spec, std::uint64_t seed);

struct PretrainingSets {
    std::vector<Vector> train;
    std::vector<LabeledInstance> validation;
    std::vector<Vector> anomalous_reference;
};

struct PretrainingSizes {
    std::size_t train = 1800;
    std::size_t validation_normal = 200;
    std::size_t validation_anomalous = 50;
    std::size_t anomalous_reference = 500;
};

/// Samples from the initial concept only, on an RNG stream disjoint from generate_stream.
PretrainingSets make_pretraining_sets(const StreamSpec& spec, std::uint64_t seed, const PretrainingSizes& sizes = {});

struct CsvSchema {
    /// Empty: the column named "label", else the last column.
    std::string label_column;
};

/// Header row required; every other column is a feature. Throws DataError with the
/// offending line number.
std::vector<LabeledInstance> load_csv_stream(const std::string& path, const CsvSchema& schema = {});
void write_csv_stream(const std::string& path, std::span<const LabeledInstance> stream);

/// Multiplies features of instances at or after `at` by a per-class factor.
struct ScaledDrift {
    std::int64_t at = 0;
    double normal_scale = 1.0;
    double anomalous_scale = 1.0;
};

void apply_scaled_drift(std::vector<LabeledInstance>& stream, const ScaledDrift& drift);

}// namespace vae4as
