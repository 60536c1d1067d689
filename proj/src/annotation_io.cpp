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


#include "mscsp/annotation_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mscsp {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::optional<double> parse_number(std::string_view token)
{
    if (token.empty())
        return std::nullopt;
    if (token.front() == '+')
        token.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        return std::nullopt;
    return v;
}

Label parse_label(std::string_view token)
{
    if (token == "person")
        return Label::person;
    if (token == "people")
        return Label::people;
    if (token == "person_unsure" || token == "person?")
        return Label::person_unsure;
    if (token == "cyclist")
        return Label::cyclist;
    throw Error("unknown label '" + std::string(token) + "'");
}

namespace {

std::vector<std::string> split_ws(const std::string& line)
{
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;)
        out.push_back(tok);
    return out;
}

bool skippable(const std::string& line)
{
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

double number_field(const std::string& token, const char* what, const std::string& source, std::size_t line)
{
    const auto v = parse_number(token);
    if (!v || !std::isfinite(*v))
        throw ParseError(source, line, std::string("malformed ") + what + " '" + token + "'");
    return *v;
}

BBox box_fields(const std::vector<std::string>& f, std::size_t first, const std::string& source, std::size_t line)
{
    const double x = number_field(f[first], "x", source, line);
    const double y = number_field(f[first + 1], "y", source, line);
    const double w = number_field(f[first + 2], "width", source, line);
    const double h = number_field(f[first + 3], "height", source, line);
    if (!(w > 0.0))
        throw ParseError(source, line, "non-positive width");
    if (!(h > 0.0))
        throw ParseError(source, line, "non-positive height");
    return BBox{x, y, w, h};
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw Error("write failed for '" + path.string() + "'");
}

} // namespace

std::vector<Annotation> parse_annotations(std::istream& in, const std::string& source)
{
    std::vector<Annotation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line))
            continue;
        const auto f = split_ws(line);
        if (f.size() != 6)
            throw ParseError(source, lineno, "expected 6 fields (label x y w h occlusion), got " + std::to_string(f.size()));
        Annotation a;
        try {
            a.label = parse_label(f[0]);
        } catch (const Error& e) {
            throw ParseError(source, lineno, e.what());
        }
        a.box = box_fields(f, 1, source, lineno);
        if (f[5] == "0")
            a.occlusion = Occlusion::none;
        else if (f[5] == "1")
            a.occlusion = Occlusion::partial;
        else if (f[5] == "2")
            a.occlusion = Occlusion::heavy;
        else
            throw ParseError(source, lineno, "invalid occlusion level '" + f[5] + "'");
        out.push_back(a);
    }
    return out;
}

std::string format_annotations(const std::vector<Annotation>& anns)
{
    std::string out;
    for (const auto& a : anns) {
        out += to_string(a.label);
        for (const double v : {a.box.x, a.box.y, a.box.w, a.box.h})
            out += ' ' + format_number(v);
        out += ' ' + std::to_string(static_cast<int>(a.occlusion)) + '\n';
    }
    return out;
}

AnnotationFile read_annotation_file(const std::filesystem::path& path)
{
    std::istringstream in(read_text(path));
    return {path.stem().string(), parse_annotations(in, path.string())};
}

void write_annotation_file(const std::filesystem::path& path, const std::vector<Annotation>& anns)
{
    write_text(path, format_annotations(anns));
}

namespace {

std::vector<std::filesystem::path> text_files(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw Error("not a directory: '" + dir.string() + "'");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

FrameAnnotations read_annotation_dir(const std::filesystem::path& dir)
{
    FrameAnnotations out;
    for (const auto& p : text_files(dir)) {
        auto file = read_annotation_file(p);
        out.emplace(std::move(file.frame_id), std::move(file.annotations));
    }
    return out;
}

void write_annotation_dir(const std::filesystem::path& dir, const FrameAnnotations& frames)
{
    std::filesystem::create_directories(dir);
    for (const auto& [frame, anns] : frames)
        write_annotation_file(dir / (frame + ".txt"), anns);
}

FrameDetections parse_detections(std::istream& in, const std::string& source)
{
    FrameDetections out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line))
            continue;
        const auto f = split_ws(line);
        if (f.size() != 6)
            throw ParseError(source, lineno, "expected 6 fields (frame_id x y w h score), got " + std::to_string(f.size()));
        Detection d;
        d.box = box_fields(f, 1, source, lineno);
        d.score = number_field(f[5], "score", source, lineno);
        if (d.score < 0.0 || d.score > 1.0)
            throw ParseError(source, lineno, "score outside [0,1]");
        out[f[0]].push_back(d);
    }
    return out;
}

FrameDetections read_detection_file(const std::filesystem::path& path)
{
    std::istringstream in(read_text(path));
    return parse_detections(in, path.string());
}

std::string format_detections(const FrameDetections& dets)
{
    std::string out;
    for (const auto& [frame, list] : dets) {
        for (const auto& d : list) {
            out += frame;
            for (const double v : {d.box.x, d.box.y, d.box.w, d.box.h, d.score})
                out += ' ' + format_number(v);
            out += '\n';
        }
    }
    return out;
}

FrameAnnotations fuse_annotation_sets(const FrameAnnotations& vis, const FrameAnnotations& ir)
{
    for (const auto& [frame, _] : ir)
        if (!vis.contains(frame))
            throw Error("frame '" + frame + "' present only in the IR annotations");
    FrameAnnotations out;
    for (const auto& [frame, vis_anns] : vis) {
        const auto it = ir.find(frame);
        if (it == ir.end())
            throw Error("frame '" + frame + "' present only in the VIS annotations");
        const auto& ir_anns = it->second;
        if (vis_anns.size() != ir_anns.size())
            throw Error("line-count mismatch in frame '" + frame + "': VIS " + std::to_string(vis_anns.size()) +
                        ", IR " + std::to_string(ir_anns.size()));
        auto& fused = out[frame];
        for (std::size_t i = 0; i < vis_anns.size(); ++i)
            fused.push_back({union_box(vis_anns[i].box, ir_anns[i].box), vis_anns[i].label, vis_anns[i].occlusion});
    }
    return out;
}

FrameAnnotations fuse_annotation_dirs(const std::filesystem::path& vis_dir, const std::filesystem::path& ir_dir)
{
    return fuse_annotation_sets(read_annotation_dir(vis_dir), read_annotation_dir(ir_dir));
}

} // namespace mscsp
