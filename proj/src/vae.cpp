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
#include "vae4as/vae.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "vae4as/errors.hpp"

namespace vae4as {

std::string to_string(LossKind kind) {
    return kind == LossKind::binary_cross_entropy ? "binary_cross_entropy" : "squared_error";
}

LossKind parse_loss_kind(const std::string& text) {
    if (text == "binary_cross_entropy" || text == "bce") {
        return LossKind::binary_cross_entropy;
    }
    if (text == "squared_error" || text == "mse" || text == "se") {
        return LossKind::squared_error;
    }
    throw ConfigError("unknown loss kind '" + text + "'");
}

VaeArchitecture VaeArchitecture::default_for(std::size_t input_dim) {
    if (input_dim <= 2) {
        return {{8}, 2};
    }
    if (input_dim <= 10) {
        return {{16}, 4};
    }
    return {{64}, 8};
}

VaeModel make_vae(std::size_t input_dim, const VaeArchitecture& arch, const VaeSettings& settings, Rng& rng) {
    if (input_dim == 0 || arch.latent == 0) {
        throw ContractViolation("make_vae: input and latent dimensions must be positive");
    }
    if (settings.beta < 0.0) {
        throw ContractViolation("make_vae: beta must be nonnegative");
    }
    VaeModel m;
    m.input_dim = input_dim;
    m.latent_dim = arch.latent;
    m.beta = settings.beta;
    m.loss_kind = settings.loss_kind;
    m.lr = settings.lr;
    const double slope = settings.negative_slope;

    std::size_t width = input_dim;
    for (auto h : arch.hidden) {
        m.encoder.push_back(he_normal_init(width, h, Activation::leaky_relu, rng, slope));
        width = h;
    }
    m.mu_head = he_normal_init(width, arch.latent, Activation::linear, rng, slope);
    m.logvar_head = he_normal_init(width, arch.latent, Activation::linear, rng, slope);

    width = arch.latent;
    for (auto it = arch.hidden.rbegin(); it != arch.hidden.rend(); ++it) {
        m.decoder.push_back(he_normal_init(width, *it, Activation::leaky_relu, rng, slope));
        width = *it;
    }
    m.decoder.push_back(he_normal_init(width, input_dim, Activation::sigmoid, rng, slope));
    m.optimizer = AdamState(parameter_count(m));
    return m;
}

namespace {

void check_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << ": dimension " << got << " does not match expected " << want;
        throw ContractViolation(os.str());
    }
}

Vector single_layer(const DenseLayer& layer, std::span<const double> x) {
    return predict(std::span<const DenseLayer>(&layer, 1), x);
}

double clamp_logvar(double v) { return std::clamp(v, kLogVarMin, kLogVarMax); }

}// namespace

LatentCode encode(const VaeModel& model, std::span<const double> x) {
    check_dim(x.size(), model.input_dim, "encode");
    const Vector h = predict(model.encoder, x);
    LatentCode code;
    code.mu = single_layer(model.mu_head, h);
    code.logvar = single_layer(model.logvar_head, h);
    for (auto& v : code.logvar) {
        v = clamp_logvar(v);
    }
    code.z = code.mu;
    return code;
}

Vector decode(const VaeModel& model, std::span<const double> z) {
    check_dim(z.size(), model.latent_dim, "decode");
    return predict(model.decoder, z);
}

Vector reparameterize(std::span<const double> mu, std::span<const double> logvar, Rng& rng) {
    check_dim(logvar.size(), mu.size(), "reparameterize");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        z[i] = mu[i] + normal(rng) * std::exp(0.5 * clamp_logvar(logvar[i]));
    }
    return z;
}

double kl_loss(std::span<const double> mu, std::span<const double> logvar) {
    check_dim(logvar.size(), mu.size(), "kl_loss");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        s += mu[i] * mu[i] + std::exp(logvar[i]) - logvar[i] - 1.0;
    }
    return 0.5 * s;
}

double reconstruction_loss(std::span<const double> x, std::span<const double> xhat, LossKind kind) {
    check_dim(xhat.size(), x.size(), "reconstruction_loss");
    double s = 0.0;
    if (kind == LossKind::squared_error) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - xhat[j];
            s += d * d;
        }
        return s;
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= 0.0 && x[j] <= 1.0)) {
            throw ContractViolation("reconstruction_loss: binary cross-entropy needs inputs in [0, 1], got "
                                    + std::to_string(x[j]) + " at feature " + std::to_string(j));
        }
        const double p = std::clamp(xhat[j], kSigmoidFloor, kSigmoidCeil);
        s -= x[j] * std::log(p) + (1.0 - x[j]) * std::log(1.0 - p);
    }
    return s;
}

double total_loss(const VaeModel& model, std::span<const double> x) {
    const auto code = encode(model, x);
    return reconstruction_loss(x, decode(model, code.z), model.loss_kind) + model.beta * kl_loss(code.mu, code.logvar);
}

double total_loss(const VaeModel& model, std::span<const double> x, std::span<const double> noise) {
    if (noise.empty()) {
        return total_loss(model, x);
    }
    auto code = encode(model, x);
    check_dim(noise.size(), model.latent_dim, "total_loss noise");
    for (std::size_t i = 0; i < code.z.size(); ++i) {
        code.z[i] = code.mu[i] + noise[i] * std::exp(0.5 * code.logvar[i]);
    }
    return reconstruction_loss(x, decode(model, code.z), model.loss_kind) + model.beta * kl_loss(code.mu, code.logvar);
}

std::size_t parameter_count(const VaeModel& model) {
    return parameter_count(model.encoder) + model.mu_head.parameter_count() + model.logvar_head.parameter_count()
        + parameter_count(model.decoder);
}

Vector parameters(const VaeModel& model) {
    Vector flat;
    flat.reserve(parameter_count(model));
    append_parameters(model.encoder, flat);
    append_parameters(std::span<const DenseLayer>(&model.mu_head, 1), flat);
    append_parameters(std::span<const DenseLayer>(&model.logvar_head, 1), flat);
    append_parameters(model.decoder, flat);
    return flat;
}

void set_parameters(VaeModel& model, std::span<const double> flat) {
    check_dim(flat.size(), parameter_count(model), "set_parameters");
    std::size_t off = assign_parameters(model.encoder, flat, 0);
    off = assign_parameters(std::span<DenseLayer>(&model.mu_head, 1), flat, off);
    off = assign_parameters(std::span<DenseLayer>(&model.logvar_head, 1), flat, off);
    assign_parameters(model.decoder, flat, off);
}

std::uint64_t fingerprint(const VaeModel& model) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : parameters(model)) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (auto b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

VaeGradient::VaeGradient(const VaeModel& model)
    : encoder(zero_gradients(model.encoder)), mu_head(model.mu_head), logvar_head(model.logvar_head),
      decoder(zero_gradients(model.decoder)) {}

void VaeGradient::zero() {
    auto clear = [](LayerGradient& g) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.biases.begin(), g.biases.end(), 0.0);
    };
    for (auto& g : encoder) {
        clear(g);
    }
    clear(mu_head);
    clear(logvar_head);
    for (auto& g : decoder) {
        clear(g);
    }
}

Vector VaeGradient::flatten() const {
    Vector flat;
    append_gradients(encoder, flat);
    append_gradients(std::span<const LayerGradient>(&mu_head, 1), flat);
    append_gradients(std::span<const LayerGradient>(&logvar_head, 1), flat);
    append_gradients(decoder, flat);
    return flat;
}

double accumulate_gradient(const VaeModel& model, std::span<const double> x, std::span<const double> noise,
                           VaeGradient& grad) {
    check_dim(x.size(), model.input_dim, "accumulate_gradient");
    const std::size_t k = model.latent_dim;
    const bool stochastic = !noise.empty();
    if (stochastic) {
        check_dim(noise.size(), k, "accumulate_gradient noise");
    }

    const auto enc = forward(model.encoder, x);
    const Vector& h = model.encoder.empty() ? Vector(x.begin(), x.end()) : enc.output();
    const std::span<const DenseLayer> mu_span(&model.mu_head, 1);
    const std::span<const DenseLayer> lv_span(&model.logvar_head, 1);
    const auto mu_trace = forward(mu_span, h);
    const auto lv_trace = forward(lv_span, h);
    const Vector& mu = mu_trace.output();
    const Vector& raw_lv = lv_trace.output();

    Vector lv(k);
    Vector z(k);
    for (std::size_t i = 0; i < k; ++i) {
        lv[i] = clamp_logvar(raw_lv[i]);
        z[i] = stochastic ? mu[i] + noise[i] * std::exp(0.5 * lv[i]) : mu[i];
    }

    const auto dec = forward(model.decoder, z);
    const Vector& xhat = dec.output();
    const double loss = reconstruction_loss(x, xhat, model.loss_kind) + model.beta * kl_loss(mu, lv);

    Vector d_xhat(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (model.loss_kind == LossKind::squared_error) {
            d_xhat[j] = 2.0 * (xhat[j] - x[j]);
        } else {
            const double p = xhat[j];
            d_xhat[j] = -x[j] / p + (1.0 - x[j]) / (1.0 - p);
        }
    }
    const Vector d_z = backward(model.decoder, dec, d_xhat, grad.decoder);

    Vector d_mu(k);
    Vector d_lv(k);
    for (std::size_t i = 0; i < k; ++i) {
        d_mu[i] = d_z[i] + model.beta * mu[i];
        const bool inside = raw_lv[i] > kLogVarMin && raw_lv[i] < kLogVarMax;
        double g = 0.5 * model.beta * (std::exp(lv[i]) - 1.0);
        if (stochastic) {
            g += d_z[i] * noise[i] * 0.5 * std::exp(0.5 * lv[i]);
        }
        d_lv[i] = inside ? g : 0.0;
    }
    Vector d_h = backward(mu_span, mu_trace, d_mu, std::span<LayerGradient>(&grad.mu_head, 1));
    const Vector d_h_lv = backward(lv_span, lv_trace, d_lv, std::span<LayerGradient>(&grad.logvar_head, 1));
    for (std::size_t i = 0; i < d_h.size(); ++i) {
        d_h[i] += d_h_lv[i];
    }
    if (!model.encoder.empty()) {
        backward(model.encoder, enc, d_h, grad.encoder);
    }
    return loss;
}

double gradient_check(const VaeModel& model, std::span<const double> x, double eps, std::span<const double> noise) {
    if (!(eps > 0.0 && eps <= 1e-2)) {
        throw ContractViolation("gradient_check: eps must lie in (0, 1e-2]");
    }
    VaeGradient grad(model);
    accumulate_gradient(model, x, noise, grad);
    const Vector analytic = grad.flatten();

    VaeModel scratch = model;
    auto loss = [&](std::span<const double> p) {
        set_parameters(scratch, p);
        return total_loss(scratch, x, noise);
    };
    return max_relative_error(analytic, central_difference(loss, parameters(model), eps));
}

TrainingReport train_on_window(VaeModel& model, std::span<const Vector> window, std::size_t epochs,
                               std::size_t batch_size, Rng& rng) {
    TrainingReport report;
    if (epochs == 0) {
        return report;
    }
    if (window.empty()) {
        throw ContractViolation("train_on_window: window is empty");
    }
    if (batch_size == 0) {
        throw ContractViolation("train_on_window: batch_size must be positive");
    }
    const std::size_t n = window.size();
    const std::size_t k = model.latent_dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::normal_distribution<double> normal(0.0, 1.0);

    VaeGradient grad(model);
    Vector noise(k);
    Vector flat = parameters(model);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t stop = std::min(n, start + batch_size);
            grad.zero();
            for (std::size_t b = start; b < stop; ++b) {
                for (auto& e : noise) {
                    e = normal(rng);
                }
                const double loss = accumulate_gradient(model, window[order[b]], noise, grad);
                if (!std::isfinite(loss)) {
                    std::ostringstream os;
                    os << "train_on_window: non-finite loss at epoch " << epoch << ", window index " << order[b];
                    throw NumericalError(os.str());
                }
                epoch_loss += loss;
            }
            Vector g = grad.flatten();
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (auto& v : g) {
                v *= scale;
            }
            adam_step(flat, g, model.optimizer, model.lr);
            set_parameters(model, flat);
            ++report.updates;
        }
        report.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(n));
    }
    return report;
}

}// namespace vae4as
