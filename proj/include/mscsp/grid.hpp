// Copyright 2026 The mscsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mscsp/error.hpp"

namespace mscsp {

/// Dense row-major 2-D array.
template <typename T>
class Plane {
public:
    Plane() = default;
    Plane(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * cols_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * cols_ + col]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    template <typename U>
    bool same_shape(const Plane<U>& other) const noexcept
    {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Grid = Plane<double>;
using Mask = Plane<std::uint8_t>;

template <typename T, typename U>
void require_same_shape(const Plane<T>& a, const Plane<U>& b, const char* what)
{
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
}

} // namespace mscsp
