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
#include "vae4as/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vae4as/errors.hpp"

namespace vae4as {

namespace {

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

void write_reals(std::ostream& os, const char* tag, const Vector& values) {
    os << tag << ' ' << values.size();
    for (double v : values) {
        os << ' ' << hex(v);
    }
    os << '\n';
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::leaky_relu:
            return "leaky_relu";
        case Activation::sigmoid:
            return "sigmoid";
        case Activation::linear:
            break;
    }
    return "linear";
}

void write_layers(std::ostream& os, const char* name, std::span<const DenseLayer> layers) {
    os << "block " << name << ' ' << layers.size() << '\n';
    for (const auto& l : layers) {
        os << "layer " << l.fan_in << ' ' << l.fan_out << ' ' << activation_name(l.activation) << ' '
           << hex(l.negative_slope) << '\n';
        write_reals(os, "w", l.weights);
        write_reals(os, "b", l.biases);
    }
}

class Reader {
  public:
    explicit Reader(const std::string& text) : in_(text) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) {
            throw DataError("checkpoint: unexpected end of file");
        }
        return w;
    }

    void expect(const std::string& tag) {
        const auto w = word();
        if (w != tag) {
            throw DataError("checkpoint: expected '" + tag + "', found '" + w + "'");
        }
    }

    std::size_t count() {
        const auto w = word();
        char* end = nullptr;
        const auto v = std::strtoull(w.c_str(), &end, 10);
        if (end == w.c_str() || *end != '\0') {
            throw DataError("checkpoint: bad count '" + w + "'");
        }
        return static_cast<std::size_t>(v);
    }

    double real() {
        const auto w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end == w.c_str() || *end != '\0') {
            throw DataError("checkpoint: bad number '" + w + "'");
        }
        return v;
    }

    Vector reals(const std::string& tag, std::size_t expected) {
        expect(tag);
        const auto n = count();
        if (n != expected) {
            throw DataError("checkpoint: '" + tag + "' has " + std::to_string(n) + " values, expected "
                            + std::to_string(expected));
        }
        Vector v(n);
        for (auto& x : v) {
            x = real();
        }
        return v;
    }

    Activation activation() {
        const auto w = word();
        if (w == "leaky_relu") {
            return Activation::leaky_relu;
        }
        if (w == "sigmoid") {
            return Activation::sigmoid;
        }
        if (w == "linear") {
            return Activation::linear;
        }
        throw DataError("checkpoint: unknown activation '" + w + "'");
    }

    Mlp layers(const std::string& name) {
        expect("block");
        expect(name);
        const auto n = count();
        Mlp out;
        for (std::size_t i = 0; i < n; ++i) {
            expect("layer");
            const auto in = count();
            const auto fan_out = count();
            const auto act = activation();
            const double slope = real();
            DenseLayer l(in, fan_out, act, slope);
            l.weights = reals("w", in * fan_out);
            l.biases = reals("b", fan_out);
            out.push_back(std::move(l));
        }
        return out;
    }

  private:
    std::istringstream in_;
};

}// namespace

std::string serialize_checkpoint(const Checkpoint& c) {
    const auto& m = c.model;
    std::ostringstream os;
    os << "vae4as-checkpoint " << kCheckpointVersion << '\n';
    os << "input_dim " << m.input_dim << '\n';
    os << "latent_dim " << m.latent_dim << '\n';
    os << "beta " << hex(m.beta) << '\n';
    os << "loss_kind " << to_string(m.loss_kind) << '\n';
    os << "lr " << hex(m.lr) << '\n';
    os << "theta " << hex(c.theta) << '\n';
    write_layers(os, "encoder", m.encoder);
    write_layers(os, "mu_head", std::span<const DenseLayer>(&m.mu_head, 1));
    write_layers(os, "logvar_head", std::span<const DenseLayer>(&m.logvar_head, 1));
    write_layers(os, "decoder", m.decoder);
    const auto& opt = m.optimizer;
    os << "adam " << opt.step_count << ' ' << hex(opt.beta1) << ' ' << hex(opt.beta2) << ' ' << hex(opt.epsilon)
       << '\n';
    write_reals(os, "m", opt.first_moment);
    write_reals(os, "v", opt.second_moment);
    write_reals(os, "norm_min", c.normalizer.min());
    write_reals(os, "norm_max", c.normalizer.max());
    os << "end\n";
    return os.str();
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write checkpoint " + path);
    }
    out << serialize_checkpoint(checkpoint);
}

Checkpoint parse_checkpoint(const std::string& text) {
    Reader r(text);
    r.expect("vae4as-checkpoint");
    const auto version = r.count();
    if (version != static_cast<std::size_t>(kCheckpointVersion)) {
        throw DataError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint c;
    auto& m = c.model;
    r.expect("input_dim");
    m.input_dim = r.count();
    r.expect("latent_dim");
    m.latent_dim = r.count();
    r.expect("beta");
    m.beta = r.real();
    r.expect("loss_kind");
    try {
        m.loss_kind = parse_loss_kind(r.word());
    } catch (const ConfigError& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    r.expect("lr");
    m.lr = r.real();
    r.expect("theta");
    c.theta = r.real();
    m.encoder = r.layers("encoder");
    auto mu = r.layers("mu_head");
    auto lv = r.layers("logvar_head");
    if (mu.size() != 1 || lv.size() != 1) {
        throw DataError("checkpoint: heads must be single layers");
    }
    m.mu_head = std::move(mu.front());
    m.logvar_head = std::move(lv.front());
    m.decoder = r.layers("decoder");
    const std::size_t n = parameter_count(m);
    r.expect("adam");
    m.optimizer.step_count = r.count();
    m.optimizer.beta1 = r.real();
    m.optimizer.beta2 = r.real();
    m.optimizer.epsilon = r.real();
    m.optimizer.first_moment = r.reals("m", n);
    m.optimizer.second_moment = r.reals("v", n);
    auto lo = r.reals("norm_min", m.input_dim);
    auto hi = r.reals("norm_max", m.input_dim);
    c.normalizer = Normalizer(std::move(lo), std::move(hi));
    r.expect("end");
    if (m.mu_head.fan_out != m.latent_dim || m.decoder.empty() || m.decoder.back().fan_out != m.input_dim) {
        throw DataError("checkpoint: layer shapes disagree with declared dimensions");
    }
    return c;
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open checkpoint " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_checkpoint(buf.str());
}

}// namespace vae4as
