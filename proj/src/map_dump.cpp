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


#include "mscsp/map_dump.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace mscsp {

namespace {

constexpr std::size_t kMagicLen = sizeof(kMapDumpMagic) - 1;

void put_u32(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& source)
{
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw ParseError(source, 0, "truncated map dump");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_plane(std::ostream& out, const Grid& g)
{
    for (const double v : g.values())
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Grid get_plane(std::istream& in, std::size_t rows, std::size_t cols, const std::string& source)
{
    Grid g(rows, cols);
    for (auto& v : g.values())
        v = static_cast<double>(std::bit_cast<float>(get_u32(in, source)));
    return g;
}

} // namespace

void write_map_dump(std::ostream& out, const TargetMaps& maps)
{
    maps.check_consistent();
    constexpr auto max = std::numeric_limits<std::uint32_t>::max();
    if (maps.rows() > max || maps.cols() > max)
        throw Error("map dump: dimensions exceed 32 bits");
    out.write(kMapDumpMagic, kMagicLen);
    put_u32(out, static_cast<std::uint32_t>(maps.rows()));
    put_u32(out, static_cast<std::uint32_t>(maps.cols()));
    put_plane(out, maps.center);
    put_plane(out, maps.scale);
    put_plane(out, maps.offset_x);
    put_plane(out, maps.offset_y);
    if (!out)
        throw Error("map dump: write failed");
}

TargetMaps read_map_dump(std::istream& in, const std::string& source)
{
    char magic[kMagicLen];
    if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMapDumpMagic, kMagicLen) != 0)
        throw ParseError(source, 0, "missing MSCSP1 header");
    const std::size_t rows = get_u32(in, source);
    const std::size_t cols = get_u32(in, source);
    if (rows == 0 || cols == 0)
        throw ParseError(source, 0, "map dump has empty dimensions");
    TargetMaps maps;
    maps.center = get_plane(in, rows, cols, source);
    maps.scale = get_plane(in, rows, cols, source);
    maps.offset_x = get_plane(in, rows, cols, source);
    maps.offset_y = get_plane(in, rows, cols, source);
    if (in.peek() != std::char_traits<char>::eof())
        throw ParseError(source, 0, "trailing bytes after map dump");
    maps.positive_mask = Mask(rows, cols);
    for (std::size_t i = 0; i < maps.center.size(); ++i)
        maps.positive_mask[i] = maps.center[i] == 1.0;
    return maps;
}

void save_map_dump(const std::filesystem::path& path, const TargetMaps& maps)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    write_map_dump(out, maps);
}

TargetMaps load_map_dump(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return read_map_dump(in, path.string());
}

} // namespace mscsp
