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
#include "vae4as/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vae4as/errors.hpp"

namespace vae4as {

Normalizer::Normalizer(Vector min, Vector max) : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size()) {
        throw ContractViolation("Normalizer: min and max differ in length");
    }
}

Normalizer Normalizer::fit(std::span<const Vector> train) {
    if (train.empty()) {
        throw ContractViolation("Normalizer::fit: training set is empty");
    }
    Vector lo = train.front();
    Vector hi = train.front();
    for (const auto& x : train) {
        if (x.size() != lo.size()) {
            throw ContractViolation("Normalizer::fit: ragged training set");
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            lo[j] = std::min(lo[j], x[j]);
            hi[j] = std::max(hi[j], x[j]);
        }
    }
    return {std::move(lo), std::move(hi)};
}

Vector Normalizer::apply(std::span<const double> x) const {
    if (x.size() != min_.size()) {
        throw ContractViolation("Normalizer::apply: dimension mismatch");
    }
    Vector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw DataError("Normalizer::apply: non-finite feature " + std::to_string(j));
        }
        const double range = max_[j] - min_[j];
        out[j] = range > 0.0 ? std::clamp((x[j] - min_[j]) / range, 0.0, 1.0) : 0.5;
    }
    return out;
}

std::vector<Vector> Normalizer::apply_all(std::span<const Vector> xs) const {
    std::vector<Vector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(apply(x));
    }
    return out;
}

}// namespace vae4as
