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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "mscsp/error.hpp"
#include "mscsp/tensor.hpp"

using namespace mscsp;

namespace {

ConvLayer random_conv(gen::Engine& e, std::size_t in, std::size_t out, std::size_t k, std::size_t stride = 1)
{
    ConvLayer l(in, out, k, stride);
    for (auto& w : l.weights)
        w = gen::real(e, -1, 1);
    return l;
}

// Direct definition: out[o][y][x] = b[o] + sum w[o][i][ky][kx] * in[i][y*s+ky-p][x*s+kx-p].
double conv_at(const Tensor& in, const ConvLayer& l, std::size_t o, std::size_t y, std::size_t x)
{
    double acc = l.bias[o];
    const long p = static_cast<long>(l.kernel / 2);
    for (std::size_t i = 0; i < l.in_channels; ++i)
        for (std::size_t ky = 0; ky < l.kernel; ++ky)
            for (std::size_t kx = 0; kx < l.kernel; ++kx) {
                const long iy = static_cast<long>(y * l.stride + ky) - p;
                const long ix = static_cast<long>(x * l.stride + kx) - p;
                if (iy >= 0 && ix >= 0 && iy < static_cast<long>(in.height()) && ix < static_cast<long>(in.width()))
                    acc += l.weight(o, i, ky, kx) * in(i, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
            }
    return acc;
}

} // namespace

TEST_CASE("conv2d: identity, zero and averaging kernels")
{
    gen::Engine e(41);
    const Tensor x = gen::image(e, 2, 5, 7);
    ConvLayer id(2, 2, 1);
    id.weight(0, 0, 0, 0) = 1.0;
    id.weight(1, 1, 0, 0) = 1.0;
    CHECK(conv2d(x, id) == x);

    const Tensor z = conv2d(x, ConvLayer(2, 3, 3));
    for (const double v : z.values())
        CHECK(v == 0.0);

    const Tensor one = gen::image(e, 1, 3, 3);
    ConvLayer avg(1, 1, 3);
    for (auto& w : avg.weights)
        w = 1.0 / 9.0;
    double mean = 0.0;
    for (const double v : one.values())
        mean += v / 9.0;
    CHECK(conv2d(one, avg)(0, 1, 1) == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("conv2d: matches the direct definition, same padding and stride")
{
    gen::Engine e(42);
    for (int t = 0; t < 20; ++t) {
        const std::size_t h = static_cast<std::size_t>(gen::integer(e, 1, 9));
        const std::size_t w = static_cast<std::size_t>(gen::integer(e, 1, 9));
        const std::size_t s = static_cast<std::size_t>(gen::integer(e, 1, 2));
        const std::size_t k = gen::coin(e) ? 1 : 3;
        const Tensor x = gen::image(e, 2, h, w, -1, 1);
        ConvLayer l = random_conv(e, 2, 3, k, s);
        l.bias = {0.1, -0.2, 0.3};
        const Tensor y = conv2d(x, l);
        REQUIRE(y.height() == (h + s - 1) / s);
        REQUIRE(y.width() == (w + s - 1) / s);
        for (std::size_t o = 0; o < 3; ++o)
            for (std::size_t yy = 0; yy < y.height(); ++yy)
                for (std::size_t xx = 0; xx < y.width(); ++xx)
                    CHECK(y(o, yy, xx) == doctest::Approx(conv_at(x, l, o, yy, xx)).epsilon(1e-12));
    }
}

TEST_CASE("conv2d: shape errors")
{
    CHECK_THROWS_AS(conv2d(Tensor(2, 4, 4), ConvLayer(3, 1, 3)), ShapeError);
    CHECK_THROWS_AS(ConvLayer(3, 1, 2), Error);
    ConvLayer broken(1, 1, 1);
    broken.bias.clear();
    CHECK_THROWS_AS(conv2d(Tensor(1, 2, 2), broken), ShapeError);
}

TEST_CASE("l2_normalize examples")
{
    Tensor t(2, 1, 1);
    t(0, 0, 0) = 3;
    t(1, 0, 0) = 4;
    const std::vector<double> unit{1, 1};
    const Tensor n = l2_normalize(t, unit);
    CHECK(n(0, 0, 0) == doctest::Approx(0.6));
    CHECK(n(1, 0, 0) == doctest::Approx(0.8));
    const Tensor z = l2_normalize(Tensor(2, 1, 1), unit);
    CHECK(z(0, 0, 0) == 0.0);
    CHECK(z(1, 0, 0) == 0.0);
    const std::vector<double> ten{10, 10};
    const Tensor s = l2_normalize(t, ten);
    CHECK(std::hypot(s(0, 0, 0), s(1, 0, 0)) == doctest::Approx(10.0));
    CHECK_THROWS_AS(l2_normalize(t, std::vector<double>{1}), ShapeError);
}

TEST_CASE("property: unit-scale l2_normalize yields unit norms")
{
    gen::Engine e(43);
    const Tensor x = gen::image(e, 5, 6, 6, -2, 2);
    const std::vector<double> unit(5, 1.0);
    const Tensor n = l2_normalize(x, unit);
    for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t xx = 0; xx < 6; ++xx) {
            double s = 0;
            for (std::size_t c = 0; c < 5; ++c)
                s += n(c, y, xx) * n(c, y, xx);
            CHECK(std::sqrt(s) >= 1 - 1e-6);
            CHECK(std::sqrt(s) <= 1 + 1e-6);
        }
}

TEST_CASE("upsample: shapes, constants and ramps")
{
    CHECK(upsample(Tensor(1, 3, 3), 2).height() == 6);
    CHECK(upsample(Tensor(1, 3, 3), 2).width() == 6);
    CHECK(upsample(Tensor(2, 3, 5), 4).width() == 20);
    const Tensor c = upsample(Tensor(2, 3, 4, 0.7), 4);
    for (const double v : c.values())
        CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

    Tensor ramp(1, 1, 6);
    for (std::size_t i = 0; i < 6; ++i)
        ramp(0, 0, i) = static_cast<double>(i);
    for (const int f : {2, 4}) {
        const Tensor u = upsample(ramp, f);
        for (std::size_t o = 0; o < u.width(); ++o) {
            const double src = (static_cast<double>(o) + 0.5) / f - 0.5;
            if (src >= 0.0 && src <= 5.0)
                CHECK(u(0, 0, o) == doctest::Approx(src).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(upsample(ramp, 3), Error);
}

TEST_CASE("concat and add")
{
    const Tensor a(2, 2, 2, 1.0);
    const Tensor b(1, 2, 2, 2.0);
    const Tensor c = concat_channels(a, b);
    CHECK(c.channels() == 3);
    CHECK(c(2, 1, 1) == 2.0);
    CHECK(add(a, a)(1, 0, 0) == 2.0);
    CHECK_THROWS_AS(add(a, b), ShapeError);
    CHECK_THROWS_AS(concat_channels(a, Tensor(1, 3, 2)), ShapeError);
}

TEST_CASE("nin_fuse examples")
{
    gen::Engine e(44);
    const Tensor a = gen::image(e, 4, 3, 3, -1, 1);
    ConvLayer half = random_conv(e, 4, 2, 1);
    ConvLayer block(8, 2, 1);
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 4; ++i) {
            block.weight(o, i, 0, 0) = half.weight(o, i, 0, 0);
            block.weight(o, i + 4, 0, 0) = half.weight(o, i, 0, 0);
        }
    const Tensor alone = conv2d(a, half);
    const Tensor both = nin_fuse(a, a, block);
    for (std::size_t i = 0; i < alone.size(); ++i)
        CHECK(both.values()[i] == doctest::Approx(2.0 * alone.values()[i]).epsilon(1e-14));

    ConvLayer a_only = block;
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 4; i < 8; ++i)
            a_only.weight(o, i, 0, 0) = 0.0;
    const Tensor r = nin_fuse(a, gen::image(e, 4, 3, 3), a_only);
    for (std::size_t i = 0; i < alone.size(); ++i)
        CHECK(r.values()[i] == doctest::Approx(alone.values()[i]).epsilon(1e-14));

    CHECK(ConvLayer(64, 32, 1).param_count() == 2080);
    CHECK_THROWS_AS(nin_fuse(a, Tensor(4, 2, 3), block), ShapeError);
    CHECK_THROWS_AS(nin_fuse(a, a, ConvLayer(8, 2, 3)), ShapeError);
}

TEST_CASE("clone_input_conv examples")
{
    gen::Engine e(45);
    const ConvLayer l = random_conv(e, 3, 4, 3, 2);
    const ConvLayer c = clone_input_conv(l);
    CHECK(c.in_channels == 6);
    CHECK(c.weights.size() == 2 * l.weights.size());
    CHECK(c.bias.size() == l.bias.size());
    CHECK(c.param_count() == l.param_count() + l.weights.size());

    const Tensor x = gen::image(e, 3, 8, 10);
    const Tensor ref = conv2d(x, l);
    const Tensor twice = conv2d(concat_channels(x, x), c);
    const Tensor once = conv2d(concat_channels(x, Tensor(3, 8, 10)), c);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(std::abs(twice.values()[i] - 2.0 * ref.values()[i]) <= 1e-6);
        CHECK(once.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-14));
    }
    CHECK_THROWS_AS(clone_input_conv(ConvLayer(4, 2, 3)), ShapeError);
}

TEST_CASE("relu and sigmoid")
{
    Tensor t(1, 1, 3);
    t(0, 0, 0) = -1;
    t(0, 0, 1) = 0;
    t(0, 0, 2) = 2;
    const Tensor r = relu(t);
    CHECK(r(0, 0, 0) == 0.0);
    CHECK(r(0, 0, 2) == 2.0);
    const Tensor s = sigmoid(t);
    CHECK(s(0, 0, 1) == 0.5);
    CHECK(s(0, 0, 2) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}
