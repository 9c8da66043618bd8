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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vae4as {

/// Caller broke a precondition (shape mismatch, out-of-range argument).
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Invalid experiment or stream configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or missing input data.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value encountered during training or evaluation.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown by adam_step when a gradient entry is NaN or infinite.
class NonFiniteGradient : public NumericalError {
  public:
    explicit NonFiniteGradient(std::size_t index)
        : NumericalError("non-finite gradient at parameter index " + std::to_string(index)), index_(index) {}

    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

}// namespace vae4as
