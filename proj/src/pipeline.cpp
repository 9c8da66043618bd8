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
#include "vae4as/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "vae4as/errors.hpp"
#include "vae4as/eval.hpp"

namespace vae4as {

std::string to_string(DriftMode mode) {
    switch (mode) {
        case DriftMode::ks_only:
            return "ks_only";
        case DriftMode::distance_only:
            return "distance_only";
        case DriftMode::dual:
            break;
    }
    return "dual";
}

DriftMode parse_drift_mode(const std::string& text) {
    if (text == "dual") {
        return DriftMode::dual;
    }
    if (text == "ks_only") {
        return DriftMode::ks_only;
    }
    if (text == "distance_only") {
        return DriftMode::distance_only;
    }
    throw ConfigError("unknown dd_mode '" + text + "' (expected dual, ks_only or distance_only)");
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::warn_set:
            return "warn_set";
        case EventKind::warn_expired:
            return "warn_expired";
        case EventKind::rebuild:
            return "rebuild";
        case EventKind::alarm:
            break;
    }
    return "alarm";
}

void PipelineConfig::validate() const {
    if (w_train == 0 || w_drift < 2 || w_distance == 0) {
        throw ConfigError("window sizes must be positive (w_drift >= 2)");
    }
    if (w_distance > w_train) {
        throw ConfigError("w_distance must not exceed w_train");
    }
    if (!(p > 0.0 && p <= 100.0)) {
        throw ConfigError("p must lie in (0, 100]");
    }
    if (!(p_alarm < p_warn) || p_alarm < 0.0 || p_warn > 1.0) {
        throw ConfigError("need 0 <= p_alarm < p_warn <= 1");
    }
    if (expiry_time <= 0) {
        throw ConfigError("expiry_time must be positive");
    }
    if (batch_size == 0 || epochs == 0) {
        throw ConfigError("epochs and batch_size must be positive");
    }
    if (!(lr > 0.0) || beta < 0.0) {
        throw ConfigError("need lr > 0 and beta >= 0");
    }
    if (n_boot == 0) {
        throw ConfigError("n_boot must be positive");
    }
}

VaeArchitecture PipelineConfig::architecture(std::size_t input_dim) const {
    auto arch = VaeArchitecture::default_for(input_dim);
    if (!hidden.empty()) {
        arch.hidden = hidden;
    }
    if (latent > 0) {
        arch.latent = latent;
    }
    return arch;
}

VaeSettings PipelineConfig::vae_settings() const { return {beta, loss_kind, lr, negative_slope}; }

Pipeline::Pipeline(PipelineConfig config, Normalizer normalizer, VaeModel model, DriftState drift, Rng rng)
    : config_(std::move(config)), normalizer_(std::move(normalizer)), model_(std::move(model)),
      drift_(std::move(drift)), mov_train_(config_.w_train), rng_(std::move(rng)) {}

Pipeline Pipeline::pretrain(std::span<const Vector> unlabeled, std::span<const Vector> anomalous_reference,
                            const PipelineConfig& config) {
    config.validate();
    if (unlabeled.empty()) {
        throw DataError("pretrain: the unlabeled pre-training set is empty");
    }
    if (anomalous_reference.size() < 2 * config.w_distance) {
        throw DataError("pretrain: need at least " + std::to_string(2 * config.w_distance)
                        + " anomalous reference instances, got " + std::to_string(anomalous_reference.size()));
    }
    Rng rng(config.seed);
    std::vector<Vector> fit_rows(unlabeled.begin(), unlabeled.end());
    fit_rows.insert(fit_rows.end(), anomalous_reference.begin(), anomalous_reference.end());
    auto normalizer = Normalizer::fit(fit_rows);
    const auto train = normalizer.apply_all(unlabeled);
    const std::size_t d = normalizer.dimension();

    auto model = make_vae(d, config.architecture(d), config.vae_settings(), rng);
    train_on_window(model, train, config.pretrain_epochs, config.batch_size, rng);
    const double theta = compute_threshold(model, train, 0, config.entropy_offset).theta;

    DriftState drift(config.w_drift, config.w_distance, config.expiry_time, config.p_warn, config.p_alarm);
    const auto anomalies = normalizer.apply_all(anomalous_reference);
    drift.ref_disx.assign(anomalies.begin(), anomalies.begin() + static_cast<std::ptrdiff_t>(config.w_distance));
    drift.dis_thre = calibrate_distance_threshold(anomalies, train, config.w_distance, config.n_boot, rng);

    Pipeline pipeline(config, std::move(normalizer), std::move(model), std::move(drift), std::move(rng));
    pipeline.theta_ = theta;
    return pipeline;
}

bool Pipeline::training_due() const {
    if (fresh_model_ && config_.early_retrain && 2 * mov_train_.size() >= mov_train_.capacity()) {
        return true;
    }
    return mov_train_.full() && mov_train_.replaced_fraction() >= config_.p / 100.0;
}

void Pipeline::bump_model() { ++model_version_; }

std::optional<Vector> Pipeline::scan_code(const Vector& x) const {
    if (config_.ks_refilter && anomaly_score(model_, x, config_.entropy_offset) > theta_) {
        return std::nullopt;
    }
    return encode(model_, x).mu;
}

namespace {

void insert_code(std::vector<Vector>& columns, const Vector& code) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        auto& col = columns[i];
        col.insert(std::upper_bound(col.begin(), col.end(), code[i]), code[i]);
    }
}

}// namespace

void Pipeline::push_mov_drift(const Vector& x) {
    const auto evicted = drift_.mov_driftx.push(x);
    if (mov_cache_version_ != model_version_) {
        return;
    }
    mov_latents_.push_back(scan_code(x));
    if (mov_latents_.back()) {
        insert_code(mov_sorted_, *mov_latents_.back());
    }
    if (evicted) {
        const auto old = std::move(mov_latents_.front());
        mov_latents_.pop_front();
        if (old) {
            for (std::size_t i = 0; i < mov_sorted_.size(); ++i) {
                auto& col = mov_sorted_[i];
                col.erase(std::lower_bound(col.begin(), col.end(), (*old)[i]));
            }
        }
    }
}

KsScan Pipeline::run_ks_scan() {
    if (ref_cache_version_ != model_version_) {
        ref_sorted_.assign(model_.latent_dim, Vector{});
        for (const auto& x : drift_.ref_driftx) {
            if (const auto code = scan_code(x)) {
                for (std::size_t i = 0; i < code->size(); ++i) {
                    ref_sorted_[i].push_back((*code)[i]);
                }
            }
        }
        for (auto& col : ref_sorted_) {
            std::sort(col.begin(), col.end());
        }
        ref_cache_version_ = model_version_;
    }
    if (mov_cache_version_ != model_version_) {
        mov_latents_.clear();
        mov_sorted_.assign(model_.latent_dim, Vector{});
        for (const auto& x : drift_.mov_driftx) {
            mov_latents_.push_back(scan_code(x));
            if (const auto& code = mov_latents_.back()) {
                for (std::size_t i = 0; i < code->size(); ++i) {
                    mov_sorted_[i].push_back((*code)[i]);
                }
            }
        }
        for (auto& col : mov_sorted_) {
            std::sort(col.begin(), col.end());
        }
        mov_cache_version_ = model_version_;
    }
    if (ref_sorted_.empty() || ref_sorted_[0].size() < 2 || mov_sorted_[0].size() < 2) {
        return {};
    }
    return ks_scan_sorted(ref_sorted_, mov_sorted_, drift_, t_);
}

StepOutcome Pipeline::step(std::span<const double> raw_x) {
    ++t_;
    StepOutcome out;
    out.t = t_;
    try {
        const Vector x = normalizer_.apply(raw_x);
        const auto pred = predict(model_, theta_, x, config_.entropy_offset);
        out.y_pred = pred.label;
        out.instance_loss = pred.loss;
        out.theta = theta_;
        if (!std::isfinite(pred.loss)) {
            throw NumericalError("non-finite instance loss");
        }

        if (pred.label == 0) {
            mov_train_.push(x);
            push_mov_drift(x);
            recent_normals_.emplace_back(t_, x);
        } else {
            drift_.push_anomaly(x, t_);
        }

        if (training_due() && !drift_.flag_warn) {
            const auto window = mov_train_.to_vector();
            train_on_window(model_, window, config_.epochs, config_.batch_size, rng_);
            theta_ = compute_threshold(model_, window, t_, config_.entropy_offset).theta;
            mov_train_.mark_reset();
            fresh_model_ = false;
            bump_model();
            out.trained = true;
        }

        if (!drift_.ref_driftx.full()) {
            drift_.ref_driftx.push(x);
            ref_cache_version_ = std::numeric_limits<std::uint64_t>::max();
        } else if (drift_.mov_driftx.full() && config_.dd_mode != DriftMode::distance_only) {
            const auto scan = run_ks_scan();
            out.min_p_value = scan.min_p_value();
            if (scan.warn_raised) {
                out.warn_set = true;
                events_.push_back({t_, EventKind::warn_set, AlarmSource::ks, out.min_p_value});
            }
        }

        if (drift_.flag_warn && !drift_.flag_alarm) {
            drift_.mov_warn.push_back(x);
            if (warning_expiry_update(drift_, t_)) {
                out.warn_cleared = true;
                events_.push_back({t_, EventKind::warn_expired});
            }
        }

        drift_.expire_anomalies(t_, config_.an_horizon);
        while (!recent_normals_.empty()
               && (config_.an_horizon <= 0 || t_ - recent_normals_.front().first >= config_.an_horizon)) {
            recent_normals_.pop_front();
        }
        if (drift_.mov_an.full() && config_.dd_mode != DriftMode::ks_only) {
            out.distance = window_distance(drift_.ref_disx, drift_.mov_an);
            if (out.distance > drift_.dis_thre) {
                drift_.raise_alarm(AlarmSource::distance);
            }
        }

        if (drift_.flag_alarm) {
            handle_alarm(drift_.alarm_source, out);
        }
    } catch (const NumericalError& e) {
        throw NumericalError("step " + std::to_string(t_) + ": " + e.what());
    } catch (const ContractViolation& e) {
        throw ContractViolation("step " + std::to_string(t_) + ": " + e.what());
    }
    return out;
}

void Pipeline::handle_alarm(AlarmSource source, StepOutcome& outcome) {
    outcome.alarm = source;
    events_.push_back({t_, EventKind::alarm, source, outcome.min_p_value, outcome.distance});

    std::vector<Vector> training_set;
    if (source == AlarmSource::distance) {
        training_set = drift_.mov_an.to_vector();
        if (config_.widen_distance_set && !drift_.mov_an_times.empty()) {
            for (const auto& [arrived, x] : recent_normals_) {
                if (arrived >= drift_.mov_an_times.front()) {
                    training_set.push_back(x);
                }
            }
        }
    } else {
        training_set = drift_.mov_warn;
    }
    if (training_set.empty()) {
        const std::size_t take = std::min(config_.w_train, drift_.mov_driftx.size());
        training_set.assign(drift_.mov_driftx.end() - static_cast<std::ptrdiff_t>(take), drift_.mov_driftx.end());
    }

    const std::size_t d = model_.input_dim;
    model_ = make_vae(d, config_.architecture(d), config_.vae_settings(), rng_);
    if (!training_set.empty()) {
        const std::size_t batches = (training_set.size() + config_.batch_size - 1) / config_.batch_size;
        const std::size_t epochs = std::max(config_.epochs, (config_.rebuild_min_updates + batches - 1) / batches);
        train_on_window(model_, training_set, epochs, config_.batch_size, rng_);
        theta_ = compute_threshold(model_, training_set, t_, config_.entropy_offset).theta;
    }
    bump_model();

    drift_.reset();
    mov_train_.clear();
    fresh_model_ = true;
    recent_normals_.clear();
    outcome.model_rebuilt = true;
    DriftEvent rebuilt{t_, EventKind::rebuild, source};
    rebuilt.training_set_size = training_set.size();
    events_.push_back(rebuilt);
}

double Pipeline::evaluate_g_mean(std::span<const LabeledInstance> labeled) const {
    FadedCounts counts(1.0);
    for (const auto& inst : labeled) {
        const auto pred = predict(model_, theta_, normalizer_.apply(inst.x), config_.entropy_offset);
        prequential_update(counts, inst.y_true, pred.label);
    }
    return counts.g_mean();
}

}// namespace vae4as
