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

#include <span>
#include <vector>

#include "vae4as/nn.hpp"

namespace vae4as {

/// Per-feature min-max scaling into [0, 1], fit on pre-training data.
class Normalizer {
  public:
    Normalizer() = default;
    Normalizer(Vector min, Vector max);

    static Normalizer fit(std::span<const Vector> train);

    /// Out-of-range values are clamped; constant features map to 0.5.
    Vector apply(std::span<const double> x) const;
    std::vector<Vector> apply_all(std::span<const Vector> xs) const;

    std::size_t dimension() const { return min_.size(); }
    const Vector& min() const { return min_; }
    const Vector& max() const { return max_; }

  private:
    Vector min_;
    Vector max_;
};

}// namespace vae4as
