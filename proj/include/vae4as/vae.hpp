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
#include <span>
#include <string>
#include <vector>

#include "vae4as/nn.hpp"

namespace vae4as {

enum class LossKind { binary_cross_entropy, squared_error };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

/// Hidden sizes of the encoder trunk; the decoder mirrors them.
struct VaeArchitecture {
    std::vector<std::size_t> hidden;
    std::size_t latent = 2;

    /// 2-d streams: 8 hidden / 2 latent; up to 10-d: 16 / 4; wider: 64 / 8.
    static VaeArchitecture default_for(std::size_t input_dim);
};

struct VaeSettings {
    double beta = 1.0;
    LossKind loss_kind = LossKind::binary_cross_entropy;
    double lr = 1e-3;
    double negative_slope = 0.01;
};

/// Encoder trunk -> (mu head, logvar head) -> decoder. Owns its optimizer state.
struct VaeModel {
    std::size_t input_dim = 0;
    std::size_t latent_dim = 0;
    Mlp encoder;
    DenseLayer mu_head;
    DenseLayer logvar_head;
    Mlp decoder;
    double beta = 1.0;
    LossKind loss_kind = LossKind::binary_cross_entropy;
    double lr = 1e-3;
    AdamState optimizer;
};

/// He-normal initialised model with fresh optimizer state.
VaeModel make_vae(std::size_t input_dim, const VaeArchitecture& arch, const VaeSettings& settings, Rng& rng);

struct LatentCode {
    Vector mu;
    Vector logvar;
    Vector z;
};

/// Deterministic encoding: z = mu. logvar is clamped to [-10, 10].
LatentCode encode(const VaeModel& model, std::span<const double> x);
Vector decode(const VaeModel& model, std::span<const double> z);

/// z = mu + eps * exp(logvar / 2) with eps ~ N(0, I) and logvar clamped to [-10, 10].
Vector reparameterize(std::span<const double> mu, std::span<const double> logvar, Rng& rng);

double kl_loss(std::span<const double> mu, std::span<const double> logvar);
/// Summed over features. BCE requires x in [0, 1] and clamps xhat away from 0 and 1.
double reconstruction_loss(std::span<const double> x, std::span<const double> xhat, LossKind kind);

/// Evaluation-mode loss (z = mu): reconstruction + beta * KL.
double total_loss(const VaeModel& model, std::span<const double> x);
/// Training-mode loss with an explicit reparameterization noise vector.
double total_loss(const VaeModel& model, std::span<const double> x, std::span<const double> noise);

std::size_t parameter_count(const VaeModel& model);
Vector parameters(const VaeModel& model);
void set_parameters(VaeModel& model, std::span<const double> flat);
/// FNV-1a over the raw parameter bytes.
std::uint64_t fingerprint(const VaeModel& model);

/// Per-layer gradient buffers laid out like the model.
struct VaeGradient {
    std::vector<LayerGradient> encoder;
    LayerGradient mu_head;
    LayerGradient logvar_head;
    std::vector<LayerGradient> decoder;

    explicit VaeGradient(const VaeModel& model);
    void zero();
    Vector flatten() const;
};

/// Adds d(total_loss)/d(params) for one instance into `grad` and returns the loss.
/// An empty `noise` means evaluation mode (z = mu).
double accumulate_gradient(const VaeModel& model, std::span<const double> x, std::span<const double> noise,
                           VaeGradient& grad);

/// Max relative error between analytic and central-difference gradients of total_loss.
double gradient_check(const VaeModel& model, std::span<const double> x, double eps, std::span<const double> noise = {});

struct TrainingReport {
    std::vector<double> epoch_mean_loss;
    std::size_t updates = 0;
};

/// Shuffled mini-batch Adam on the mean per-instance loss, stochastic z.
TrainingReport train_on_window(VaeModel& model, std::span<const Vector> window, std::size_t epochs,
                               std::size_t batch_size, Rng& rng);

}// namespace vae4as
