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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vae4as/datagen.hpp"
#include "vae4as/detector.hpp"
#include "vae4as/drift.hpp"
#include "vae4as/normalizer.hpp"
#include "vae4as/sliding_window.hpp"
#include "vae4as/vae.hpp"

namespace vae4as {

enum class DriftMode { dual, ks_only, distance_only };

std::string to_string(DriftMode mode);
DriftMode parse_drift_mode(const std::string& text);

struct PipelineConfig {
    std::size_t w_train = 2000;
    std::size_t w_drift = 1000;
    std::size_t w_distance = 50;
    double p = 100.0;// percent of mov_train replaced before retraining
    double p_warn = 0.01;
    double p_alarm = 0.001;
    std::int64_t expiry_time = 100;
    std::size_t epochs = 10;
    std::size_t pretrain_epochs = 100;
    std::size_t rebuild_min_updates = 1000;// floor on Adam steps when a model is rebuilt
    std::size_t batch_size = 64;
    double lr = 1e-3;
    double beta = 1.0;
    LossKind loss_kind = LossKind::binary_cross_entropy;
    std::vector<std::size_t> hidden;// empty: VaeArchitecture::default_for(d)
    std::size_t latent = 0;         // 0: default for d
    double negative_slope = 0.01;
    bool entropy_offset = false;// score cross-entropy relative to the input's own entropy
    std::size_t n_boot = 500;
    bool widen_distance_set = true;// DD2 rebuilds also use normal-classified arrivals since the oldest mov_AN row
    bool early_retrain = true;// first retraining after a rebuild once mov_train is half full
    bool ks_refilter = true;// KS compares only window members the current model calls normal
    std::int64_t an_horizon = 200;// mov_AN rows older than this many steps are dropped; 0 disables
    std::uint64_t seed = 1;
    DriftMode dd_mode = DriftMode::dual;

    /// Throws ConfigError.
    void validate() const;
    VaeArchitecture architecture(std::size_t input_dim) const;
    VaeSettings vae_settings() const;
};

struct StepOutcome {
    std::int64_t t = 0;
    int y_pred = 0;
    double instance_loss = 0.0;
    double theta = 0.0;
    bool trained = false;
    bool warn_set = false;
    bool warn_cleared = false;
    AlarmSource alarm = AlarmSource::none;
    bool model_rebuilt = false;
    double min_p_value = std::numeric_limits<double>::quiet_NaN();// NaN when no KS scan ran
    double distance = std::numeric_limits<double>::quiet_NaN();   // NaN when DD2 did not run
};

enum class EventKind { warn_set, warn_expired, alarm, rebuild };

std::string to_string(EventKind kind);

struct DriftEvent {
    std::int64_t t = 0;
    EventKind kind = EventKind::alarm;
    AlarmSource source = AlarmSource::none;
    double p_value = std::numeric_limits<double>::quiet_NaN();
    double distance = std::numeric_limits<double>::quiet_NaN();
    std::size_t training_set_size = 0;
};

/// The streaming detector: predict, route into windows, retrain, run both drift
/// tests, and replace the model on alarms.
class Pipeline {
  public:
    /// Offline stage: fits the normalizer and a fresh model on `unlabeled` (assumed normal),
    /// takes the initial threshold from its losses, and calibrates the distance test on
    /// `anomalous_reference`.
    static Pipeline pretrain(std::span<const Vector> unlabeled, std::span<const Vector> anomalous_reference,
                             const PipelineConfig& config);

    StepOutcome step(std::span<const double> raw_x);

    /// Static G-mean of the current model and threshold on a labeled set; nothing is updated.
    double evaluate_g_mean(std::span<const LabeledInstance> labeled) const;

    const PipelineConfig& config() const { return config_; }
    const VaeModel& model() const { return model_; }
    const Normalizer& normalizer() const { return normalizer_; }
    double theta() const { return theta_; }
    std::int64_t time() const { return t_; }
    const DriftState& drift_state() const { return drift_; }
    const SlidingWindow<Vector>& mov_train() const { return mov_train_; }
    const std::vector<DriftEvent>& events() const { return events_; }

  private:
    Pipeline(PipelineConfig config, Normalizer normalizer, VaeModel model, DriftState drift, Rng rng);

    bool training_due() const;
    void push_mov_drift(const Vector& x);
    KsScan run_ks_scan();
    void handle_alarm(AlarmSource source, StepOutcome& outcome);
    void bump_model();
    std::optional<Vector> scan_code(const Vector& x) const;

    PipelineConfig config_;
    Normalizer normalizer_;
    VaeModel model_;
    DriftState drift_;
    SlidingWindow<Vector> mov_train_;
    Rng rng_;
    double theta_ = 0.0;
    bool fresh_model_ = false;// rebuilt and not yet retrained
    std::deque<std::pair<std::int64_t, Vector>> recent_normals_;// normal-classified arrivals within an_horizon
    std::int64_t t_ = 0;
    std::vector<DriftEvent> events_;

    // latent encodings reused between scans while the model is unchanged
    std::uint64_t model_version_ = 0;
    std::uint64_t ref_cache_version_ = std::numeric_limits<std::uint64_t>::max();
    std::vector<Vector> ref_sorted_;
    std::uint64_t mov_cache_version_ = std::numeric_limits<std::uint64_t>::max();
    std::deque<std::optional<Vector>> mov_latents_;// empty when filtered out
    std::vector<Vector> mov_sorted_;
};

}// namespace vae4as
