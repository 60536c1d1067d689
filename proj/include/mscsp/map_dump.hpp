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
#include <iosfwd>
#include <string>

#include "mscsp/codec.hpp"

namespace mscsp {

/// Binary target-map dump:
///
///   "MSCSP1" | rows:u32 | cols:u32 | center | scale | offset_x | offset_y
///
/// All integers and the rows*cols float32 planes are little-endian. The
/// positive mask is not stored; on read it is recovered as center == 1.
inline constexpr char kMapDumpMagic[] = "MSCSP1";

void write_map_dump(std::ostream& out, const TargetMaps& maps);
TargetMaps read_map_dump(std::istream& in, const std::string& source);

void save_map_dump(const std::filesystem::path& path, const TargetMaps& maps);
TargetMaps load_map_dump(const std::filesystem::path& path);

} // namespace mscsp
