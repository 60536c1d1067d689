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
#include <span>
#include <vector>

#include "mscsp/error.hpp"

namespace mscsp {

/// Rank-3 array (channels x height x width), channel-major.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0)
        : channels_(channels), height_(height), width_(width), data_(channels * height * width, fill) {}

    std::size_t channels() const noexcept { return channels_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t plane_size() const noexcept { return height_ * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t c, std::size_t y, std::size_t x) noexcept
    {
        return data_[(c * height_ + y) * width_ + x];
    }
    double operator()(std::size_t c, std::size_t y, std::size_t x) const noexcept
    {
        return data_[(c * height_ + y) * width_ + x];
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::span<double> channel(std::size_t c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const double> channel(std::size_t c) const noexcept
    {
        return {data_.data() + c * plane_size(), plane_size()};
    }

    bool same_spatial(const Tensor& o) const noexcept { return height_ == o.height_ && width_ == o.width_; }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t channels_ = 0;
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<double> data_;
};

/// Square-kernel convolution with bias. Weights are laid out
/// [out][in][ky][kx]. Padding is "same": output size = ceil(in / stride).
struct ConvLayer {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::vector<double> weights;
    std::vector<double> bias;

    ConvLayer() = default;
    ConvLayer(std::size_t in, std::size_t out, std::size_t kernel_size, std::size_t stride_ = 1);

    double& weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx)
    {
        return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
    }
    double weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const
    {
        return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
    }

    std::size_t param_count() const noexcept { return weights.size() + bias.size(); }
};

Tensor conv2d(const Tensor& input, const ConvLayer& layer);

Tensor relu(Tensor t);

/// Logistic squashing applied element-wise.
Tensor sigmoid(Tensor t);

/// Normalizes each spatial location's channel vector to unit length
/// (norm + eps), then multiplies channel c by scale[c].
Tensor l2_normalize(const Tensor& input, std::span<const double> scale, double eps = 1e-10);

/// Bilinear upsampling by 2 or 4: a fixed-weight transposed convolution with
/// replicated borders, so constants are preserved.
Tensor upsample(const Tensor& input, int factor);

Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);

/// Channel-concatenates a and b and mixes them with a 1x1 convolution.
Tensor nin_fuse(const Tensor& a, const Tensor& b, const ConvLayer& block);

/// Six-channel first layer whose two 3-channel halves are copies of `layer`.
ConvLayer clone_input_conv(const ConvLayer& layer);

} // namespace mscsp
