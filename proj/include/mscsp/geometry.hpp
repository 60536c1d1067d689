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

#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mscsp {

/// Axis-aligned box in pixel coordinates: (x, y) is the top-left corner.
/// Real-valued so that rescaling compositions never round.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double right() const noexcept { return x + w; }
    double bottom() const noexcept { return y + h; }
    double area() const noexcept { return w * h; }
    double center_x() const noexcept { return x + 0.5 * w; }
    double center_y() const noexcept { return y + 0.5 * h; }
    bool valid() const noexcept { return w > 0.0 && h > 0.0; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Throws mscsp::Error unless w > 0 and h > 0.
BBox make_box(double x, double y, double w, double h);

enum class Label { person, people, person_unsure, cyclist };
enum class Occlusion { none = 0, partial = 1, heavy = 2 };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Occlusion occlusion) noexcept;

struct Annotation {
    BBox box;
    Label label = Label::person;
    Occlusion occlusion = Occlusion::none;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Height/occlusion filter defining an evaluation subset. Heights are inclusive
/// on both ends.
struct SubsetSpec {
    std::string name;
    double min_height = 0.0;
    double max_height = std::numeric_limits<double>::infinity();
    std::set<Occlusion> allowed_occlusion{Occlusion::none, Occlusion::partial, Occlusion::heavy};

    void validate() const;

    friend bool operator==(const SubsetSpec&, const SubsetSpec&) = default;
};

/// Pedestrians at least 55 px tall with no or partial occlusion.
SubsetSpec reasonable_subset();
/// Every pedestrian regardless of height and occlusion.
SubsetSpec all_subset();

enum class GtClass { evaluate, ignore };

double iou(const BBox& a, const BBox& b) noexcept;

/// Intersection over the area of `det`; used for ignore-region matching.
double ioa(const BBox& det, const BBox& region) noexcept;

/// Smallest axis-aligned box containing both inputs.
BBox union_box(const BBox& vis, const BBox& ir) noexcept;

/// Non-person labels and out-of-subset pedestrians are ignore regions.
GtClass classify(const Annotation& ann, const SubsetSpec& spec) noexcept;

inline constexpr double kPedestrianAspectRatio = 0.41;

/// Width of a pedestrian box of height `h` under the fixed aspect ratio.
double width_from_height(double h, double aspect_ratio = kPedestrianAspectRatio);

} // namespace mscsp
