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

#include <filesystem>

#include "mscsp/tensor.hpp"

namespace mscsp {

/// Reads a binary 8-bit PGM (P5, 1 channel) or PPM (P6, 3 channels) image,
/// scaled to [0,1].
Tensor read_pnm(const std::filesystem::path& path);

/// Writes a 1-channel tensor as P5 or a 3-channel tensor as P6; values are
/// clamped to [0,1] and rounded to 8 bits.
void write_pnm(const std::filesystem::path& path, const Tensor& image);

} // namespace mscsp
