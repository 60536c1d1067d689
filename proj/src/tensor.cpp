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


#include "mscsp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mscsp {

ConvLayer::ConvLayer(std::size_t in, std::size_t out, std::size_t kernel_size, std::size_t stride_)
    : in_channels(in), out_channels(out), kernel(kernel_size), stride(stride_),
      weights(in * out * kernel_size * kernel_size, 0.0), bias(out, 0.0)
{
    if (in == 0 || out == 0 || kernel_size == 0 || stride_ == 0)
        throw Error("conv layer dimensions must be positive");
    if (kernel_size % 2 == 0)
        throw Error("conv layer kernel must be odd");
}

Tensor conv2d(const Tensor& input, const ConvLayer& layer)
{
    if (input.channels() != layer.in_channels)
        throw ShapeError("conv2d: expected " + std::to_string(layer.in_channels) + " input channels, got " +
                         std::to_string(input.channels()));
    if (layer.weights.size() != layer.in_channels * layer.out_channels * layer.kernel * layer.kernel ||
        layer.bias.size() != layer.out_channels)
        throw ShapeError("conv2d: weight tensor does not match declared shape");

    const std::size_t k = layer.kernel;
    const std::size_t s = layer.stride;
    const long pad = static_cast<long>(k / 2);
    const std::size_t in_h = input.height();
    const std::size_t in_w = input.width();
    const std::size_t out_h = (in_h + s - 1) / s;
    const std::size_t out_w = (in_w + s - 1) / s;

    Tensor out(layer.out_channels, out_h, out_w);
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        auto dst = out.channel(o);
        std::fill(dst.begin(), dst.end(), layer.bias[o]);
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            const auto src = input.channel(i);
            for (std::size_t ky = 0; ky < k; ++ky) {
                for (std::size_t kx = 0; kx < k; ++kx) {
                    const double w = layer.weight(o, i, ky, kx);
                    for (std::size_t y = 0; y < out_h; ++y) {
                        const long iy = static_cast<long>(y * s + ky) - pad;
                        if (iy < 0 || iy >= static_cast<long>(in_h))
                            continue;
                        const double* row = src.data() + static_cast<std::size_t>(iy) * in_w;
                        double* drow = dst.data() + y * out_w;
                        for (std::size_t x = 0; x < out_w; ++x) {
                            const long ix = static_cast<long>(x * s + kx) - pad;
                            if (ix < 0 || ix >= static_cast<long>(in_w))
                                continue;
                            drow[x] += w * row[ix];
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor relu(Tensor t)
{
    for (auto& v : t.values())
        v = v > 0.0 ? v : 0.0;
    return t;
}

Tensor sigmoid(Tensor t)
{
    for (auto& v : t.values())
        v = 1.0 / (1.0 + std::exp(-v));
    return t;
}

Tensor l2_normalize(const Tensor& input, std::span<const double> scale, double eps)
{
    if (scale.size() != input.channels())
        throw ShapeError("l2_normalize: scale length must equal channel count");
    Tensor out(input.channels(), input.height(), input.width());
    const std::size_t plane = input.plane_size();
    const auto src = input.values();
    auto dst = out.values();
    for (std::size_t p = 0; p < plane; ++p) {
        double sq = 0.0;
        for (std::size_t c = 0; c < input.channels(); ++c)
            sq += src[c * plane + p] * src[c * plane + p];
        const double inv = 1.0 / (std::sqrt(sq) + eps);
        for (std::size_t c = 0; c < input.channels(); ++c)
            dst[c * plane + p] = src[c * plane + p] * inv * scale[c];
    }
    return out;
}

namespace {

struct Tap {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

// Source taps for output index `o` when upsampling `n` samples by `factor`,
// with half-pixel centers and clamped borders.
std::vector<Tap> bilinear_taps(std::size_t n, int factor)
{
    std::vector<Tap> taps(n * static_cast<std::size_t>(factor));
    const double inv = 1.0 / factor;
    for (std::size_t o = 0; o < taps.size(); ++o) {
        double src = (static_cast<double>(o) + 0.5) * inv - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(n - 1));
        const auto lo = static_cast<std::size_t>(std::floor(src));
        const std::size_t hi = std::min(lo + 1, n - 1);
        taps[o] = {lo, hi, src - static_cast<double>(lo)};
    }
    return taps;
}

} // namespace

Tensor upsample(const Tensor& input, int factor)
{
    if (factor != 2 && factor != 4)
        throw Error("upsample: unsupported factor " + std::to_string(factor));
    const auto ty = bilinear_taps(input.height(), factor);
    const auto tx = bilinear_taps(input.width(), factor);
    Tensor out(input.channels(), ty.size(), tx.size());
    for (std::size_t c = 0; c < input.channels(); ++c) {
        for (std::size_t y = 0; y < ty.size(); ++y) {
            const auto& a = ty[y];
            for (std::size_t x = 0; x < tx.size(); ++x) {
                const auto& b = tx[x];
                const double top = input(c, a.lo, b.lo) * (1.0 - b.frac) + input(c, a.lo, b.hi) * b.frac;
                const double bottom = input(c, a.hi, b.lo) * (1.0 - b.frac) + input(c, a.hi, b.hi) * b.frac;
                out(c, y, x) = top * (1.0 - a.frac) + bottom * a.frac;
            }
        }
    }
    return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    if (!a.same_spatial(b))
        throw ShapeError("concat: spatial dimensions differ");
    Tensor out(a.channels() + b.channels(), a.height(), a.width());
    auto dst = out.values();
    std::copy(a.values().begin(), a.values().end(), dst.begin());
    std::copy(b.values().begin(), b.values().end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

Tensor add(const Tensor& a, const Tensor& b)
{
    if (a.channels() != b.channels() || !a.same_spatial(b))
        throw ShapeError("add: tensor shapes differ");
    Tensor out = a;
    auto dst = out.values();
    const auto src = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] += src[i];
    return out;
}

Tensor nin_fuse(const Tensor& a, const Tensor& b, const ConvLayer& block)
{
    if (!a.same_spatial(b))
        throw ShapeError("nin_fuse: spatial dimensions differ");
    if (block.kernel != 1 || block.stride != 1)
        throw ShapeError("nin_fuse: fusion block must be a 1x1 stride-1 convolution");
    return conv2d(concat_channels(a, b), block);
}

ConvLayer clone_input_conv(const ConvLayer& layer)
{
    if (layer.in_channels != 3)
        throw ShapeError("clone_input_conv: expected a 3-channel layer, got " + std::to_string(layer.in_channels));
    ConvLayer out(6, layer.out_channels, layer.kernel, layer.stride);
    for (std::size_t o = 0; o < layer.out_channels; ++o)
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t ky = 0; ky < layer.kernel; ++ky)
                for (std::size_t kx = 0; kx < layer.kernel; ++kx)
                    out.weight(o, i, ky, kx) = layer.weight(o, i % 3, ky, kx);
    out.bias = layer.bias;
    return out;
}

} // namespace mscsp
