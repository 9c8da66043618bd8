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

#include <string>

#include "vae4as/normalizer.hpp"
#include "vae4as/vae.hpp"

namespace vae4as {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    VaeModel model;
    Normalizer normalizer;
    double theta = 0.0;
};

/// Line-oriented text; every real is written as a hex float so a reload is bit-exact.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
std::string serialize_checkpoint(const Checkpoint& checkpoint);

/// Throws DataError on a malformed file or unsupported version.
Checkpoint load_checkpoint(const std::string& path);
Checkpoint parse_checkpoint(const std::string& text);

}// namespace vae4as
