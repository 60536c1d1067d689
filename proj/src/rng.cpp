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


#include "mscsp/rng.hpp"

#include <cmath>
#include <numbers>

#include "mscsp/error.hpp"

namespace mscsp {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t stream) const
{
    return Rng(splitmix64(seed_ ^ splitmix64(stream)));
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

std::size_t Rng::uniform_index(std::size_t n)
{
    if (n == 0)
        throw Error("uniform_index: empty range");
    const std::uint64_t range = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t v = engine_();
    while (v >= limit)
        v = engine_();
    return static_cast<std::size_t>(v % range);
}

long Rng::uniform_int(long lo, long hi)
{
    if (hi < lo)
        throw Error("uniform_int: empty range");
    return lo + static_cast<long>(uniform_index(static_cast<std::size_t>(hi - lo) + 1));
}

bool Rng::bernoulli(double p)
{
    return uniform() < p;
}

double Rng::normal()
{
    // 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0.0))
        throw Error("poisson: mean must be non-negative");
    if (mean == 0.0)
        return 0;
    if (mean > 500.0) {
        const double v = std::round(mean + std::sqrt(mean) * normal());
        return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
    }
    // Knuth's product-of-uniforms method
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

} // namespace mscsp
