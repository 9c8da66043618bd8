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
#include "vae4as/nn.hpp"

#include <algorithm>
#include <cmath>

#include "vae4as/errors.hpp"

namespace vae4as {

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act, double slope)
    : fan_in(in), fan_out(out), weights(in * out, 0.0), biases(out, 0.0), activation(act), negative_slope(slope) {
    if (in == 0 || out == 0) {
        throw ContractViolation("DenseLayer: fan_in and fan_out must be positive");
    }
}

DenseLayer he_normal_init(std::size_t fan_in, std::size_t fan_out, Activation act, Rng& rng, double negative_slope) {
    DenseLayer layer(fan_in, fan_out, act, negative_slope);
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (auto& w : layer.weights) {
        w = normal(rng);
    }
    return layer;
}

double activate(Activation act, double pre, double negative_slope) {
    switch (act) {
        case Activation::leaky_relu:
            return pre >= 0.0 ? pre : negative_slope * pre;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-pre));
            return std::clamp(s, kSigmoidFloor, kSigmoidCeil);
        }
        case Activation::linear:
            return pre;
    }
    return pre;
}

double activation_derivative(Activation act, double pre, double out, double negative_slope) {
    switch (act) {
        case Activation::leaky_relu:
            return pre >= 0.0 ? 1.0 : negative_slope;
        case Activation::sigmoid:
            // flat where the output is clamped
            if (out <= kSigmoidFloor || out >= kSigmoidCeil) {
                return 0.0;
            }
            return out * (1.0 - out);
        case Activation::linear:
            return 1.0;
    }
    return 1.0;
}

namespace {

void check_input(const DenseLayer& layer, std::size_t n) {
    if (n != layer.fan_in) {
        throw ContractViolation("forward: input dimension " + std::to_string(n) + " does not match fan_in "
                                + std::to_string(layer.fan_in));
    }
}

void affine(const DenseLayer& layer, std::span<const double> x, Vector& pre) {
    pre.assign(layer.biases.begin(), layer.biases.end());
    for (std::size_t r = 0; r < layer.fan_out; ++r) {
        const double* row = layer.weights.data() + r * layer.fan_in;
        double acc = 0.0;
        for (std::size_t c = 0; c < layer.fan_in; ++c) {
            acc += row[c] * x[c];
        }
        pre[r] += acc;
    }
}

}// namespace

ForwardTrace forward(std::span<const DenseLayer> layers, std::span<const double> x) {
    ForwardTrace trace;
    trace.layers.reserve(layers.size());
    Vector current(x.begin(), x.end());
    for (const auto& layer : layers) {
        check_input(layer, current.size());
        LayerTrace lt;
        lt.input = std::move(current);
        affine(layer, lt.input, lt.pre);
        lt.out.resize(lt.pre.size());
        for (std::size_t i = 0; i < lt.pre.size(); ++i) {
            lt.out[i] = activate(layer.activation, lt.pre[i], layer.negative_slope);
        }
        current = lt.out;
        trace.layers.push_back(std::move(lt));
    }
    if (trace.layers.empty()) {
        trace.layers.push_back(LayerTrace{current, current, current});
    }
    return trace;
}

Vector predict(std::span<const DenseLayer> layers, std::span<const double> x) {
    Vector current(x.begin(), x.end());
    Vector pre;
    for (const auto& layer : layers) {
        check_input(layer, current.size());
        affine(layer, current, pre);
        current.resize(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i) {
            current[i] = activate(layer.activation, pre[i], layer.negative_slope);
        }
    }
    return current;
}

LayerGradient::LayerGradient(const DenseLayer& layer)
    : weights(layer.weights.size(), 0.0), biases(layer.biases.size(), 0.0) {}

std::vector<LayerGradient> zero_gradients(std::span<const DenseLayer> layers) {
    std::vector<LayerGradient> grads;
    grads.reserve(layers.size());
    for (const auto& layer : layers) {
        grads.emplace_back(layer);
    }
    return grads;
}

Vector backward(std::span<const DenseLayer> layers, const ForwardTrace& trace, std::span<const double> grad_output,
                std::span<LayerGradient> grads) {
    if (grads.size() != layers.size() || trace.layers.size() != layers.size()) {
        throw ContractViolation("backward: layer, trace and gradient counts differ");
    }
    Vector delta(grad_output.begin(), grad_output.end());
    for (std::size_t li = layers.size(); li-- > 0;) {
        const auto& layer = layers[li];
        const auto& lt = trace.layers[li];
        auto& g = grads[li];
        if (delta.size() != layer.fan_out) {
            throw ContractViolation("backward: gradient dimension mismatch");
        }
        for (std::size_t r = 0; r < layer.fan_out; ++r) {
            delta[r] *= activation_derivative(layer.activation, lt.pre[r], lt.out[r], layer.negative_slope);
        }
        Vector next(layer.fan_in, 0.0);
        for (std::size_t r = 0; r < layer.fan_out; ++r) {
            const double d = delta[r];
            g.biases[r] += d;
            const double* row = layer.weights.data() + r * layer.fan_in;
            double* grow = g.weights.data() + r * layer.fan_in;
            for (std::size_t c = 0; c < layer.fan_in; ++c) {
                grow[c] += d * lt.input[c];
                next[c] += d * row[c];
            }
        }
        delta = std::move(next);
    }
    return delta;
}

std::size_t parameter_count(std::span<const DenseLayer> layers) {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.parameter_count();
    }
    return n;
}

void append_parameters(std::span<const DenseLayer> layers, Vector& out) {
    for (const auto& layer : layers) {
        out.insert(out.end(), layer.weights.begin(), layer.weights.end());
        out.insert(out.end(), layer.biases.begin(), layer.biases.end());
    }
}

void append_gradients(std::span<const LayerGradient> grads, Vector& out) {
    for (const auto& g : grads) {
        out.insert(out.end(), g.weights.begin(), g.weights.end());
        out.insert(out.end(), g.biases.begin(), g.biases.end());
    }
}

std::size_t assign_parameters(std::span<DenseLayer> layers, std::span<const double> flat, std::size_t offset) {
    for (auto& layer : layers) {
        if (offset + layer.parameter_count() > flat.size()) {
            throw ContractViolation("assign_parameters: flat vector too short");
        }
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), layer.weights.size(), layer.weights.begin());
        offset += layer.weights.size();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), layer.biases.size(), layer.biases.begin());
        offset += layer.biases.size();
    }
    return offset;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
    const std::size_t n = params.size();
    if (grads.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
        throw ContractViolation("adam_step: parameter, gradient and state shapes differ");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grads[i])) {
            throw NonFiniteGradient(i);
        }
    }
    state.step_count += 1;
    const auto step = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(state.beta1, step);
    const double correction2 = 1.0 - std::pow(state.beta2, step);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        state.second_moment[i] = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.first_moment[i] / correction1;
        const double v_hat = state.second_moment[i] / correction2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

Vector central_difference(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                          double eps) {
    Vector probe(params.begin(), params.end());
    Vector numeric(params.size(), 0.0);
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + eps;
        const double up = loss(probe);
        probe[i] = saved - eps;
        const double down = loss(probe);
        probe[i] = saved;
        numeric[i] = (up - down) / (2.0 * eps);
    }
    return numeric;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
    if (analytic.size() != numeric.size()) {
        throw ContractViolation("max_relative_error: size mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double a = analytic[i];
        const double b = numeric[i];
        const double err = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
        worst = std::max(worst, err);
    }
    return worst;
}

double gradient_check(const Mlp& layers, std::span<const double> x, std::span<const double> target, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) {
        throw ContractViolation("gradient_check: eps must lie in (0, 1e-2]");
    }
    auto squared_error = [&](const Vector& out) {
        double s = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double d = out[j] - target[j];
            s += d * d;
        }
        return s;
    };

    const auto trace = forward(layers, x);
    const auto& out = trace.output();
    if (out.size() != target.size()) {
        throw ContractViolation("gradient_check: target dimension mismatch");
    }
    Vector grad_out(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        grad_out[j] = 2.0 * (out[j] - target[j]);
    }
    auto grads = zero_gradients(layers);
    backward(layers, trace, grad_out, grads);
    Vector analytic;
    append_gradients(grads, analytic);

    Vector flat;
    append_parameters(layers, flat);
    Mlp scratch = layers;
    auto loss = [&](std::span<const double> p) {
        assign_parameters(scratch, p, 0);
        return squared_error(predict(scratch, x));
    };
    return max_relative_error(analytic, central_difference(loss, flat, eps));
}

}// namespace vae4as
