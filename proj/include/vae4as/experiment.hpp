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
#include <limits>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vae4as/datagen.hpp"
#include "vae4as/eval.hpp"
#include "vae4as/pipeline.hpp"

namespace vae4as {

/// Everything needed to reproduce a batch of seeded runs.
struct ExperimentConfig {
    std::string dataset = "sea";// builtin name or CSV path
    std::string pretrain_path;  // CSV datasets only: labeled pre-training rows
    PipelineConfig pipeline;
    std::size_t runs = 1;
    std::uint64_t seed = 1;// run i uses seed + i
    std::string out_dir = "out";
    double fading = 0.99;
    std::int64_t alarm_tolerance = 1000;
    PretrainingSizes pretraining;

    // stream overrides; builtin defaults apply when unset
    std::optional<std::int64_t> length;
    std::optional<std::vector<std::int64_t>> drift_times;
    std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> anomalous_intervals;
    std::optional<ScaledDrift> scaled_drift;

    bool is_builtin() const { return is_builtin_stream(dataset); }
    /// Canonical key=value lines, sorted by key.
    std::string resolved_text() const;
    /// 16 hex digits of FNV-1a over resolved_text().
    std::string hash() const;
};

/// Per-dataset defaults: W_drift 1000 (builtin) or 200 (CSV), W_train 2000 or 1000,
/// beta 0 for vib, squared error for CSV data, and the drift-detector levels.
ExperimentConfig default_config(const std::string& dataset);

std::vector<std::string> known_config_keys();
/// Throws ConfigError on an unknown key or an unparsable value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a flat key=value file ('#' comments). The dataset key, from `overrides` or the file,
/// selects the defaults; the remaining keys are applied on top, then `overrides`.
/// Unknown keys are reported together in one ConfigError.
ExperimentConfig load_config(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides);
ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& settings);

struct StepRecord {
    std::int64_t t = 0;
    int y_true = 0;
    int y_pred = 0;
    double loss = 0.0;
    double theta = 0.0;
    double g_mean = 0.0;
    bool warn = false;
    AlarmSource alarm = AlarmSource::none;
};

struct RunResult {
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    std::vector<DriftEvent> events;
    std::vector<std::int64_t> alarm_steps;
    AlarmScore score;
    double final_g_mean = 0.0;
    double validation_g_mean = std::numeric_limits<double>::quiet_NaN();
};

/// The labeled stream and pre-training material for one seed.
struct PreparedData {
    std::vector<LabeledInstance> stream;
    std::vector<Vector> pretrain_normal;
    std::vector<Vector> anomalous_reference;
    std::vector<LabeledInstance> validation;
    std::vector<std::int64_t> drift_times;
};

PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed);

/// One seeded run, in memory.
RunResult run_single(const ExperimentConfig& config, std::uint64_t seed);
/// Pre-trains on `data` and streams it; config.pipeline.seed is replaced by `seed`.
RunResult run_prepared(const ExperimentConfig& config, const PreparedData& data, std::uint64_t seed);

struct ExperimentSummary {
    std::string config_hash;
    std::vector<RunResult> runs;
    RunAggregate final_g_mean;
    RunAggregate false_alarms;
};

/// Runs config.runs seeds. With `write_files`, writes into config.out_dir:
/// metrics_seed<N>.csv, events_seed<N>.csv, summary.csv, config.resolved, and drops the
/// per-step records from the returned runs once written.
ExperimentSummary run_experiment(const ExperimentConfig& config, bool write_files = true);

struct SweepRow {
    std::string value;
    double mean_final_g_mean = 0.0;
    double stderr_final_g_mean = 0.0;
    double mean_false_alarms = 0.0;
    std::vector<std::size_t> false_alarms;// per seed
    std::vector<double> final_g_mean;     // per seed
};

/// One run_experiment per value of `key`; writes sweep.csv when `write_files`.
std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& key,
                            const std::vector<std::string>& values, bool write_files = true);

void write_metrics_csv(const std::string& path, const std::string& config_hash, std::span<const StepRecord> steps);
std::vector<StepRecord> read_metrics_csv(const std::string& path);
void write_events_csv(const std::string& path, const std::string& config_hash, std::span<const DriftEvent> events);

}// namespace vae4as
