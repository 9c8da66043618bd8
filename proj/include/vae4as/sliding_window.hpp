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

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "vae4as/errors.hpp"

namespace vae4as {

/// Bounded FIFO, oldest item first. Counts pushes since the last mark so callers
/// can tell how much of the window has been replaced.
template <typename T>
class SlidingWindow {
  public:
    explicit SlidingWindow(std::size_t capacity = 1) : capacity_(capacity) {
        if (capacity == 0) {
            throw ContractViolation("SlidingWindow: capacity must be positive");
        }
    }

    /// Appends `item`; returns the evicted oldest item when over capacity.
    std::optional<T> push(T item) {
        items_.push_back(std::move(item));
        ++replaced_since_mark_;
        if (items_.size() > capacity_) {
            std::optional<T> evicted(std::move(items_.front()));
            items_.pop_front();
            return evicted;
        }
        return std::nullopt;
    }

    double replaced_fraction() const {
        return std::min(1.0, static_cast<double>(replaced_since_mark_) / static_cast<double>(capacity_));
    }

    void mark_reset() { replaced_since_mark_ = 0; }

    /// Drops the oldest item; no-op when empty.
    void pop_front() {
        if (!items_.empty()) {
            items_.pop_front();
        }
    }

    void clear() {
        items_.clear();
        replaced_since_mark_ = 0;
    }

    bool full() const { return items_.size() == capacity_; }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t replaced_since_mark() const { return replaced_since_mark_; }

    const T& operator[](std::size_t i) const { return items_[i]; }
    const T& front() const { return items_.front(); }
    const T& back() const { return items_.back(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    std::vector<T> to_vector() const { return {items_.begin(), items_.end()}; }

  private:
    std::size_t capacity_;
    std::deque<T> items_;
    std::size_t replaced_since_mark_ = 0;
};

}// namespace vae4as
