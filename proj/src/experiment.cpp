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
#include "vae4as/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vae4as/errors.hpp"

namespace vae4as {

namespace {

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const auto& values, const char* sep) {
    std::ostringstream os;
    bool first = true;
    for (const auto& v : values) {
        if (!first) {
            os << sep;
        }
        os << v;
        first = false;
    }
    return os.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
    return parse_number<std::size_t>(key, text);
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    return parse_number<std::int64_t>(key, text);
}

double parse_real(const std::string& key, const std::string& text) { return parse_number<double>(key, text); }

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true") {
        return true;
    }
    if (text == "0" || text == "false") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

}// namespace

ExperimentConfig default_config(const std::string& dataset) {
    ExperimentConfig c;
    c.dataset = dataset;
    auto& p = c.pipeline;
    if (is_builtin_stream(dataset)) {
        p.w_drift = 1000;
        p.w_train = 2000;
        p.loss_kind = LossKind::binary_cross_entropy;
        p.beta = dataset == "vib" ? 0.0 : 1.0;
    } else {
        p.w_drift = 200;
        p.w_train = 1000;
        p.loss_kind = LossKind::squared_error;
        p.beta = 1.0;
    }
    p.lr = 1e-3;
    p.batch_size = 64;
    p.epochs = 10;
    p.p = 100.0;
    p.w_distance = 50;
    p.p_warn = 0.01;
    p.p_alarm = 0.001;
    p.expiry_time = 100;
    return c;
}

std::vector<std::string> known_config_keys() {
    return {"alarm_tolerance", "an_horizon", "anomalous_intervals", "anomalous_reference", "batch_size", "beta",
            "dataset", "dd_mode", "drift_times", "early_retrain", "entropy_offset", "epochs", "expiry_time",
            "fading", "hidden", "ks_refilter", "latent", "leaky_slope", "length", "loss", "lr", "n_boot", "out",
            "p", "p_alarm", "p_warn", "pretrain_epochs", "pretrain_path", "pretrain_size", "rebuild_min_updates",
            "runs", "scale_anomalous", "scale_drift_at", "scale_normal", "seed", "validation_anomalous",
            "validation_normal", "w_distance", "widen_distance_set", "w_drift", "w_train"};
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    auto& p = c.pipeline;
    auto scaled = [&c]() -> ScaledDrift& {
        if (!c.scaled_drift) {
            c.scaled_drift = ScaledDrift{};
        }
        return *c.scaled_drift;
    };
    if (key == "dataset") {
        c.dataset = value;
    } else if (key == "pretrain_path") {
        c.pretrain_path = value;
    } else if (key == "runs") {
        c.runs = parse_size(key, value);
    } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "out") {
        c.out_dir = value;
    } else if (key == "fading") {
        c.fading = parse_real(key, value);
    } else if (key == "alarm_tolerance") {
        c.alarm_tolerance = parse_int(key, value);
    } else if (key == "w_train") {
        p.w_train = parse_size(key, value);
    } else if (key == "w_drift") {
        p.w_drift = parse_size(key, value);
    } else if (key == "w_distance") {
        p.w_distance = parse_size(key, value);
    } else if (key == "p") {
        p.p = parse_real(key, value);
    } else if (key == "p_warn") {
        p.p_warn = parse_real(key, value);
    } else if (key == "p_alarm") {
        p.p_alarm = parse_real(key, value);
    } else if (key == "expiry_time") {
        p.expiry_time = parse_int(key, value);
    } else if (key == "epochs") {
        p.epochs = parse_size(key, value);
    } else if (key == "pretrain_epochs") {
        p.pretrain_epochs = parse_size(key, value);
    } else if (key == "entropy_offset") {
        p.entropy_offset = parse_bool(key, value);
    } else if (key == "widen_distance_set") {
        p.widen_distance_set = parse_bool(key, value);
    } else if (key == "early_retrain") {
        p.early_retrain = parse_bool(key, value);
    } else if (key == "ks_refilter") {
        p.ks_refilter = parse_bool(key, value);
    } else if (key == "an_horizon") {
        p.an_horizon = parse_int(key, value);
    } else if (key == "rebuild_min_updates") {
        p.rebuild_min_updates = parse_size(key, value);
    } else if (key == "batch_size") {
        p.batch_size = parse_size(key, value);
    } else if (key == "lr") {
        p.lr = parse_real(key, value);
    } else if (key == "beta") {
        p.beta = parse_real(key, value);
    } else if (key == "loss") {
        p.loss_kind = parse_loss_kind(value);
    } else if (key == "hidden") {
        p.hidden.clear();
        for (const auto& h : split(value, ',')) {
            p.hidden.push_back(parse_size(key, h));
        }
    } else if (key == "latent") {
        p.latent = parse_size(key, value);
    } else if (key == "leaky_slope") {
        p.negative_slope = parse_real(key, value);
    } else if (key == "n_boot") {
        p.n_boot = parse_size(key, value);
    } else if (key == "dd_mode") {
        p.dd_mode = parse_drift_mode(value);
    } else if (key == "pretrain_size") {
        c.pretraining.train = parse_size(key, value);
    } else if (key == "validation_normal") {
        c.pretraining.validation_normal = parse_size(key, value);
    } else if (key == "validation_anomalous") {
        c.pretraining.validation_anomalous = parse_size(key, value);
    } else if (key == "anomalous_reference") {
        c.pretraining.anomalous_reference = parse_size(key, value);
    } else if (key == "length") {
        c.length = parse_int(key, value);
    } else if (key == "drift_times") {
        std::vector<std::int64_t> times;
        for (const auto& s : split(value, ',')) {
            times.push_back(parse_int(key, s));
        }
        c.drift_times = times;
    } else if (key == "anomalous_intervals") {
        // "2000-2100,7000-7100"
        std::vector<std::pair<std::int64_t, std::int64_t>> intervals;
        for (const auto& s : split(value, ',')) {
            const auto dash = s.find('-');
            if (dash == std::string::npos) {
                throw ConfigError("config key 'anomalous_intervals': expected start-end, got '" + s + "'");
            }
            intervals.emplace_back(parse_int(key, trim(s.substr(0, dash))), parse_int(key, trim(s.substr(dash + 1))));
        }
        c.anomalous_intervals = intervals;
    } else if (key == "scale_drift_at") {
        scaled().at = parse_int(key, value);
    } else if (key == "scale_normal") {
        scaled().normal_scale = parse_real(key, value);
    } else if (key == "scale_anomalous") {
        scaled().anomalous_scale = parse_real(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& settings) {
    const auto keys = known_config_keys();
    std::vector<std::string> unknown;
    std::string dataset = "sea";
    for (const auto& [k, v] : settings) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            unknown.push_back(k);
        }
        if (k == "dataset") {
            dataset = trim(v);
        }
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown config keys: " + join(unknown, ", "));
    }
    auto config = default_config(dataset);
    for (const auto& [k, v] : settings) {
        apply_setting(config, k, v);
    }
    config.pipeline.validate();
    if (config.runs == 0) {
        throw ConfigError("runs must be positive");
    }
    if (!(config.fading > 0.0 && config.fading <= 1.0)) {
        throw ConfigError("fading must lie in (0, 1]");
    }
    return config;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::vector<std::pair<std::string, std::string>> settings;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file " + path);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line.erase(hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
            }
            settings.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    settings.insert(settings.end(), overrides.begin(), overrides.end());
    return resolve_config(settings);
}

std::string ExperimentConfig::resolved_text() const {
    const auto& p = pipeline;
    std::map<std::string, std::string> kv;
    kv["dataset"] = dataset;
    kv["pretrain_path"] = pretrain_path;
    kv["runs"] = std::to_string(runs);
    kv["seed"] = std::to_string(seed);
    kv["fading"] = fmt_real(fading);
    kv["alarm_tolerance"] = std::to_string(alarm_tolerance);
    kv["w_train"] = std::to_string(p.w_train);
    kv["w_drift"] = std::to_string(p.w_drift);
    kv["w_distance"] = std::to_string(p.w_distance);
    kv["p"] = fmt_real(p.p);
    kv["p_warn"] = fmt_real(p.p_warn);
    kv["p_alarm"] = fmt_real(p.p_alarm);
    kv["expiry_time"] = std::to_string(p.expiry_time);
    kv["epochs"] = std::to_string(p.epochs);
    kv["pretrain_epochs"] = std::to_string(p.pretrain_epochs);
    kv["entropy_offset"] = p.entropy_offset ? "true" : "false";
    kv["widen_distance_set"] = p.widen_distance_set ? "true" : "false";
    kv["early_retrain"] = p.early_retrain ? "true" : "false";
    kv["ks_refilter"] = p.ks_refilter ? "true" : "false";
    kv["an_horizon"] = std::to_string(p.an_horizon);
    kv["rebuild_min_updates"] = std::to_string(p.rebuild_min_updates);
    kv["batch_size"] = std::to_string(p.batch_size);
    kv["lr"] = fmt_real(p.lr);
    kv["beta"] = fmt_real(p.beta);
    kv["loss"] = to_string(p.loss_kind);
    kv["hidden"] = join(p.hidden, ",");
    kv["latent"] = std::to_string(p.latent);
    kv["leaky_slope"] = fmt_real(p.negative_slope);
    kv["n_boot"] = std::to_string(p.n_boot);
    kv["dd_mode"] = to_string(p.dd_mode);
    kv["pretrain_size"] = std::to_string(pretraining.train);
    kv["validation_normal"] = std::to_string(pretraining.validation_normal);
    kv["validation_anomalous"] = std::to_string(pretraining.validation_anomalous);
    kv["anomalous_reference"] = std::to_string(pretraining.anomalous_reference);
    kv["length"] = length ? std::to_string(*length) : "";
    kv["drift_times"] = drift_times ? join(*drift_times, ",") : "";
    if (anomalous_intervals) {
        std::vector<std::string> parts;
        for (const auto& [a, b] : *anomalous_intervals) {
            parts.push_back(std::to_string(a) + "-" + std::to_string(b));
        }
        kv["anomalous_intervals"] = join(parts, ",");
    } else {
        kv["anomalous_intervals"] = "";
    }
    if (scaled_drift) {
        kv["scale_drift_at"] = std::to_string(scaled_drift->at);
        kv["scale_normal"] = fmt_real(scaled_drift->normal_scale);
        kv["scale_anomalous"] = fmt_real(scaled_drift->anomalous_scale);
    }
    std::ostringstream os;
    for (const auto& [k, v] : kv) {
        os << k << " = " << v << '\n';
    }
    return os.str();
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(resolved_text())));
    return buf;
}

PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed) {
    PreparedData data;
    if (config.is_builtin()) {
        auto spec = builtin_stream(config.dataset);
        if (config.length) {
            spec.length = *config.length;
        }
        if (config.drift_times) {
            spec.drift_times = *config.drift_times;
            spec.concepts.resize(spec.drift_times.size() + 1, spec.concepts.back());
            // keep the A/B alternation for any number of drifts
            for (std::size_t i = 0; i < spec.concepts.size(); ++i) {
                spec.concepts[i] = builtin_stream(config.dataset).concepts[i % 2];
            }
        }
        if (config.anomalous_intervals) {
            spec.anomalous_intervals = *config.anomalous_intervals;
        }
        data.stream = generate_stream(spec, seed);
        auto sets = make_pretraining_sets(spec, seed, config.pretraining);
        data.pretrain_normal = std::move(sets.train);
        data.anomalous_reference = std::move(sets.anomalous_reference);
        data.validation = std::move(sets.validation);
        data.drift_times = spec.drift_times;
    } else {
        if (!std::filesystem::exists(config.dataset)) {
            throw DataError("dataset '" + config.dataset + "' is neither a builtin stream nor an existing CSV file");
        }
        if (config.pretrain_path.empty()) {
            throw ConfigError("CSV datasets need pretrain_path (labeled normal and anomalous reference rows)");
        }
        data.stream = load_csv_stream(config.dataset);
        if (config.scaled_drift) {
            apply_scaled_drift(data.stream, *config.scaled_drift);
        }
        for (auto& inst : load_csv_stream(config.pretrain_path)) {
            (inst.y_true ? data.anomalous_reference : data.pretrain_normal).push_back(std::move(inst.x));
        }
        if (config.drift_times) {
            data.drift_times = *config.drift_times;
        }
    }
    return data;
}

RunResult run_single(const ExperimentConfig& config, std::uint64_t seed) {
    return run_prepared(config, prepare_data(config, seed), seed);
}

RunResult run_prepared(const ExperimentConfig& config, const PreparedData& data, std::uint64_t seed) {
    PipelineConfig pc = config.pipeline;
    pc.seed = seed;
    auto pipeline = Pipeline::pretrain(data.pretrain_normal, data.anomalous_reference, pc);

    RunResult result;
    result.seed = seed;
    if (!data.validation.empty()) {
        result.validation_g_mean = pipeline.evaluate_g_mean(data.validation);
    }
    FadedCounts counts(config.fading);
    result.steps.reserve(data.stream.size());
    for (const auto& inst : data.stream) {
        const auto out = pipeline.step(inst.x);
        StepRecord rec;
        rec.t = out.t;
        rec.y_true = inst.y_true;
        rec.y_pred = out.y_pred;
        rec.loss = out.instance_loss;
        rec.theta = out.theta;
        rec.g_mean = prequential_update(counts, inst.y_true, out.y_pred);
        rec.warn = pipeline.drift_state().flag_warn;
        rec.alarm = out.alarm;
        if (out.alarm != AlarmSource::none) {
            result.alarm_steps.push_back(out.t);
        }
        result.steps.push_back(rec);
    }
    result.events = pipeline.events();
    result.final_g_mean = result.steps.empty() ? 0.0 : result.steps.back().g_mean;
    result.score = score_alarms(result.alarm_steps, data.drift_times, config.alarm_tolerance);
    return result;
}

void write_metrics_csv(const std::string& path, const std::string& config_hash, std::span<const StepRecord> steps) {
    auto out = open_out(path);
    out << "# vae4as config_hash=" << config_hash << '\n';
    out << "t,y_true,y_pred,loss,theta,g_mean,warn,alarm_source\n";
    for (const auto& s : steps) {
        out << s.t << ',' << s.y_true << ',' << s.y_pred << ',' << fmt_real(s.loss) << ',' << fmt_real(s.theta) << ','
            << fmt_real(s.g_mean) << ',' << (s.warn ? 1 : 0) << ',' << to_string(s.alarm) << '\n';
    }
}

std::vector<StepRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    std::vector<StepRecord> steps;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string item;
        while (std::getline(ls, item, ',')) {
            f.push_back(item);
        }
        if (f.size() != 8) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 8 fields");
        }
        try {
            StepRecord s;
            s.t = parse_int("t", f[0]);
            s.y_true = static_cast<int>(parse_int("y_true", f[1]));
            s.y_pred = static_cast<int>(parse_int("y_pred", f[2]));
            s.loss = parse_real("loss", f[3]);
            s.theta = parse_real("theta", f[4]);
            s.g_mean = parse_real("g_mean", f[5]);
            s.warn = f[6] == "1";
            s.alarm = f[7] == "ks" ? AlarmSource::ks : f[7] == "distance" ? AlarmSource::distance : AlarmSource::none;
            steps.push_back(s);
        } catch (const ConfigError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return steps;
}

void write_events_csv(const std::string& path, const std::string& config_hash, std::span<const DriftEvent> events) {
    auto out = open_out(path);
    out << "# vae4as config_hash=" << config_hash << '\n';
    out << "t,kind,source,p_value,distance,training_set_size\n";
    for (const auto& e : events) {
        out << e.t << ',' << to_string(e.kind) << ',' << to_string(e.source) << ','
            << (std::isnan(e.p_value) ? std::string() : fmt_real(e.p_value)) << ','
            << (std::isnan(e.distance) ? std::string() : fmt_real(e.distance)) << ',' << e.training_set_size << '\n';
    }
}

ExperimentSummary run_experiment(const ExperimentConfig& config, bool write_files) {
    ExperimentSummary summary;
    summary.config_hash = config.hash();
    std::filesystem::path dir(config.out_dir);
    if (write_files) {
        std::filesystem::create_directories(dir);
        auto out = open_out(dir / "config.resolved");
        out << "# vae4as config_hash=" << summary.config_hash << '\n' << config.resolved_text();
    }
    std::vector<double> finals;
    std::vector<double> false_alarms;
    std::vector<std::vector<double>> curves;
    for (std::size_t r = 0; r < config.runs; ++r) {
        const std::uint64_t seed = config.seed + r;
        auto result = run_single(config, seed);
        finals.push_back(result.final_g_mean);
        false_alarms.push_back(static_cast<double>(result.score.false_alarms));
        if (write_files) {
            const auto tag = "seed" + std::to_string(seed);
            write_metrics_csv((dir / ("metrics_" + tag + ".csv")).string(), summary.config_hash, result.steps);
            write_events_csv((dir / ("events_" + tag + ".csv")).string(), summary.config_hash, result.events);
            std::vector<double> curve;
            curve.reserve(result.steps.size());
            for (const auto& s : result.steps) {
                curve.push_back(s.g_mean);
            }
            curves.push_back(std::move(curve));
            result.steps.clear();
            result.steps.shrink_to_fit();
        }
        summary.runs.push_back(std::move(result));
    }
    summary.final_g_mean = aggregate_scalars(finals);
    summary.false_alarms = aggregate_scalars(false_alarms);

    if (write_files) {
        auto out = open_out(dir / "summary.csv");
        out << "# vae4as config_hash=" << summary.config_hash << '\n';
        out << "seed,final_g_mean,validation_g_mean,detections,delays,false_alarms,alarms\n";
        for (const auto& r : summary.runs) {
            std::vector<std::string> delays;
            for (auto d : r.score.delays) {
                delays.push_back(d < 0 ? "miss" : std::to_string(d));
            }
            out << r.seed << ',' << fmt_real(r.final_g_mean) << ','
                << (std::isnan(r.validation_g_mean) ? std::string() : fmt_real(r.validation_g_mean)) << ','
                << r.score.detections() << ',' << join(delays, ";") << ',' << r.score.false_alarms << ','
                << join(r.alarm_steps, ";") << '\n';
        }
        out << "mean," << fmt_real(summary.final_g_mean.mean[0]) << ",,,," << fmt_real(summary.false_alarms.mean[0])
            << ",\n";
        out << "stderr," << fmt_real(summary.final_g_mean.stderr_[0]) << ",,,,"
            << fmt_real(summary.false_alarms.stderr_[0]) << ",\n";

        const auto agg = aggregate_runs(curves);
        auto curve_out = open_out(dir / "g_mean_curve.csv");
        curve_out << "# vae4as config_hash=" << summary.config_hash << '\n';
        curve_out << "t,mean_g_mean,stderr_g_mean\n";
        for (std::size_t t = 0; t < agg.mean.size(); ++t) {
            curve_out << (t + 1) << ',' << fmt_real(agg.mean[t]) << ',' << fmt_real(agg.stderr_[t]) << '\n';
        }
    }
    return summary;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& key,
                            const std::vector<std::string>& values, bool write_files) {
    const auto keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("sweep: unknown parameter '" + key + "'");
    }
    if (values.empty()) {
        throw ConfigError("sweep: no values given for '" + key + "'");
    }
    std::vector<SweepRow> rows;
    for (const auto& value : values) {
        ExperimentConfig c = config;
        apply_setting(c, key, value);
        c.pipeline.validate();
        c.out_dir = (std::filesystem::path(config.out_dir) / (key + "_" + value)).string();
        const auto summary = run_experiment(c, write_files);
        SweepRow row;
        row.value = value;
        row.mean_final_g_mean = summary.final_g_mean.mean[0];
        row.stderr_final_g_mean = summary.final_g_mean.stderr_[0];
        row.mean_false_alarms = summary.false_alarms.mean[0];
        for (const auto& r : summary.runs) {
            row.false_alarms.push_back(r.score.false_alarms);
            row.final_g_mean.push_back(r.final_g_mean);
        }
        rows.push_back(std::move(row));
    }
    if (write_files) {
        std::filesystem::create_directories(config.out_dir);
        auto out = open_out(std::filesystem::path(config.out_dir) / "sweep.csv");
        out << "# vae4as config_hash=" << config.hash() << " parameter=" << key << '\n';
        out << key << ",mean_final_g_mean,stderr_final_g_mean,mean_false_alarms,false_alarms_per_seed\n";
        for (const auto& r : rows) {
            out << r.value << ',' << fmt_real(r.mean_final_g_mean) << ',' << fmt_real(r.stderr_final_g_mean) << ','
                << fmt_real(r.mean_false_alarms) << ',' << join(r.false_alarms, ";") << '\n';
        }
    }
    return rows;
}

}// namespace vae4as
