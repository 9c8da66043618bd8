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
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace vae4as {

using Vector = std::vector<double>;
using Rng = std::mt19937_64;

enum class Activation { leaky_relu, sigmoid, linear };

inline constexpr double kSigmoidFloor = 1e-7;
inline constexpr double kSigmoidCeil = 1.0 - 1e-7;

/// Fully connected layer. Weights are row-major [fan_out x fan_in].
struct DenseLayer {
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    Vector weights;
    Vector biases;
    Activation activation = Activation::linear;
    double negative_slope = 0.01;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation act, double slope = 0.01);

    std::size_t parameter_count() const { return weights.size() + biases.size(); }
    double weight(std::size_t row, std::size_t col) const { return weights[row * fan_in + col]; }
};

using Mlp = std::vector<DenseLayer>;

/// Weights i.i.d. Normal(0, 2/fan_in), biases zero.
DenseLayer he_normal_init(std::size_t fan_in, std::size_t fan_out, Activation act, Rng& rng,
                          double negative_slope = 0.01);

double activate(Activation act, double pre, double negative_slope);
/// Derivative of the (clamped) activation given its pre-activation and output.
double activation_derivative(Activation act, double pre, double out, double negative_slope);

struct LayerTrace {
    Vector input;
    Vector pre;
    Vector out;
};

/// Everything backprop needs from a forward pass.
struct ForwardTrace {
    std::vector<LayerTrace> layers;

    const Vector& output() const { return layers.back().out; }
};

ForwardTrace forward(std::span<const DenseLayer> layers, std::span<const double> x);
/// Forward pass without keeping intermediates.
Vector predict(std::span<const DenseLayer> layers, std::span<const double> x);

struct LayerGradient {
    Vector weights;
    Vector biases;

    explicit LayerGradient(const DenseLayer& layer);
    LayerGradient() = default;
};

std::vector<LayerGradient> zero_gradients(std::span<const DenseLayer> layers);

/// Accumulates dL/dparams into `grads` and returns dL/dinput.
Vector backward(std::span<const DenseLayer> layers, const ForwardTrace& trace, std::span<const double> grad_output,
                std::span<LayerGradient> grads);

std::size_t parameter_count(std::span<const DenseLayer> layers);
/// Flat parameter order: for each layer, weights then biases.
void append_parameters(std::span<const DenseLayer> layers, Vector& out);
void append_gradients(std::span<const LayerGradient> grads, Vector& out);
/// Reads parameters from `flat` starting at `offset`; returns the new offset.
std::size_t assign_parameters(std::span<DenseLayer> layers, std::span<const double> flat, std::size_t offset);

struct AdamState {
    Vector first_moment;
    Vector second_moment;
    std::uint64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// One bias-corrected Adam update. Throws NonFiniteGradient before touching anything
/// if a gradient entry is not finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

/// Central finite differences of `loss` around `params`.
Vector central_difference(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                          double eps);

/// max_i |a_i - n_i| / max(1, |a_i|, |n_i|)
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// Gradient check for an MLP under loss = sum_j (f_j(x) - target_j)^2.
double gradient_check(const Mlp& layers, std::span<const double> x, std::span<const double> target, double eps);

}// namespace vae4as
