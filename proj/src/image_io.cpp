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


#include "mscsp/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace mscsp {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in)
{
    std::string tok;
    int ch = 0;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

std::size_t header_number(std::istream& in, const std::filesystem::path& path)
{
    const std::string tok = header_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw Error("'" + path.string() + "': malformed PNM header");
    return std::stoul(tok);
}

} // namespace

Tensor read_pnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    const std::string magic = header_token(in);
    std::size_t channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw Error("'" + path.string() + "': only binary P5/P6 images are supported");
    const std::size_t width = header_number(in, path);
    const std::size_t height = header_number(in, path);
    const std::size_t maxval = header_number(in, path);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 255)
        throw Error("'" + path.string() + "': unsupported PNM dimensions or depth");

    std::vector<unsigned char> raw(width * height * channels);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw Error("'" + path.string() + "': truncated pixel data");

    Tensor out(channels, height, width);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            for (std::size_t c = 0; c < channels; ++c)
                out(c, y, x) = std::min(1.0, raw[(y * width + x) * channels + c] * scale);
    return out;
}

void write_pnm(const std::filesystem::path& path, const Tensor& image)
{
    if (image.channels() != 1 && image.channels() != 3)
        throw Error("write_pnm: image must have 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << (image.channels() == 1 ? "P5" : "P6") << "\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> raw(image.size());
    std::size_t i = 0;
    for (std::size_t y = 0; y < image.height(); ++y)
        for (std::size_t x = 0; x < image.width(); ++x)
            for (std::size_t c = 0; c < image.channels(); ++c)
                raw[i++] = static_cast<unsigned char>(std::lround(std::clamp(image(c, y, x), 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw Error("write failed for '" + path.string() + "'");
}

} // namespace mscsp
