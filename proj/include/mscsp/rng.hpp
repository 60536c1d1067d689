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
#include <random>

namespace mscsp {

/// Seedable generator with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; every distribution is implemented here rather than taken from
/// <random>, whose distributions differ across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent generator for sub-stream `stream`; does not advance *this.
    Rng derive(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n); n must be positive.
    std::size_t uniform_index(std::size_t n);
    /// Uniform integer in [lo, hi] inclusive.
    long uniform_int(long lo, long hi);
    bool bernoulli(double p);
    /// Standard normal via Box-Muller (two uniforms per call).
    double normal();
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace mscsp
