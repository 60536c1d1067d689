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


#include "mscsp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "mscsp/error.hpp"

namespace mscsp {

BBox make_box(double x, double y, double w, double h)
{
    if (!(w > 0.0))
        throw Error("non-positive width");
    if (!(h > 0.0))
        throw Error("non-positive height");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h))
        throw Error("non-finite box coordinate");
    return BBox{x, y, w, h};
}

std::string_view to_string(Label label) noexcept
{
    switch (label) {
    case Label::person: return "person";
    case Label::people: return "people";
    case Label::person_unsure: return "person_unsure";
    case Label::cyclist: return "cyclist";
    }
    return "?";
}

std::string_view to_string(Occlusion occlusion) noexcept
{
    switch (occlusion) {
    case Occlusion::none: return "none";
    case Occlusion::partial: return "partial";
    case Occlusion::heavy: return "heavy";
    }
    return "?";
}

void SubsetSpec::validate() const
{
    if (!(min_height >= 0.0) || !(min_height <= max_height))
        throw Error("subset '" + name + "': require 0 <= min_height <= max_height");
}

SubsetSpec reasonable_subset()
{
    SubsetSpec spec;
    spec.name = "Reasonable";
    spec.min_height = 55.0;
    spec.allowed_occlusion = {Occlusion::none, Occlusion::partial};
    return spec;
}

SubsetSpec all_subset()
{
    SubsetSpec spec;
    spec.name = "All";
    return spec;
}

namespace {

// Areas are taken from corner differences so that iou(a, a) and ioa(a, a)
// are exactly 1 under floating point.
double corner_area(const BBox& b) noexcept
{
    return (b.right() - b.x) * (b.bottom() - b.y);
}

double intersection_area(const BBox& a, const BBox& b) noexcept
{
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0)
        return 0.0;
    return iw * ih;
}

} // namespace

double iou(const BBox& a, const BBox& b) noexcept
{
    const double inter = intersection_area(a, b);
    if (inter == 0.0)
        return 0.0;
    const double uni = corner_area(a) + corner_area(b) - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double ioa(const BBox& det, const BBox& region) noexcept
{
    const double inter = intersection_area(det, region);
    return std::clamp(inter / corner_area(det), 0.0, 1.0);
}

BBox union_box(const BBox& vis, const BBox& ir) noexcept
{
    const double left = std::min(vis.x, ir.x);
    const double top = std::min(vis.y, ir.y);
    const double right = std::max(vis.right(), ir.right());
    const double bottom = std::max(vis.bottom(), ir.bottom());
    return BBox{left, top, right - left, bottom - top};
}

GtClass classify(const Annotation& ann, const SubsetSpec& spec) noexcept
{
    if (ann.label != Label::person)
        return GtClass::ignore;
    const double h = ann.box.h;
    if (h < spec.min_height || h > spec.max_height)
        return GtClass::ignore;
    if (!spec.allowed_occlusion.contains(ann.occlusion))
        return GtClass::ignore;
    return GtClass::evaluate;
}

double width_from_height(double h, double aspect_ratio)
{
    if (!(h > 0.0))
        throw Error("width_from_height: height must be positive");
    return aspect_ratio * h;
}

} // namespace mscsp
