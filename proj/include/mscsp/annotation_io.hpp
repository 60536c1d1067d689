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
#include <string_view>
#include <vector>

#include "mscsp/evaluator.hpp"
#include "mscsp/geometry.hpp"

namespace mscsp {

/// `%.6g` rendering used by every text output.
std::string format_number(double v);

/// Strict double parse of a whole token; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view token);

Label parse_label(std::string_view token);

/// Annotation lines: `label x y w h occlusion`, occlusion in {0,1,2}.
/// Blank lines and lines starting with '#' are skipped.
std::vector<Annotation> parse_annotations(std::istream& in, const std::string& source);
std::string format_annotations(const std::vector<Annotation>& anns);

struct AnnotationFile {
    std::string frame_id; // file stem
    std::vector<Annotation> annotations;
};

AnnotationFile read_annotation_file(const std::filesystem::path& path);
void write_annotation_file(const std::filesystem::path& path, const std::vector<Annotation>& anns);

/// Reads every `*.txt` file in `dir`, keyed by stem.
FrameAnnotations read_annotation_dir(const std::filesystem::path& dir);
void write_annotation_dir(const std::filesystem::path& dir, const FrameAnnotations& frames);

/// Detection lines: `frame_id x y w h score`, score in [0,1].
FrameDetections parse_detections(std::istream& in, const std::string& source);
FrameDetections read_detection_file(const std::filesystem::path& path);
std::string format_detections(const FrameDetections& dets);

/// Unions the i-th VIS box with the i-th IR box of each frame; label and
/// occlusion come from VIS. Frame sets and per-frame counts must agree.
FrameAnnotations fuse_annotation_sets(const FrameAnnotations& vis, const FrameAnnotations& ir);
FrameAnnotations fuse_annotation_dirs(const std::filesystem::path& vis_dir, const std::filesystem::path& ir_dir);

} // namespace mscsp
