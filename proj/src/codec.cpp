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


#include "mscsp/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mscsp {

void TargetMaps::check_consistent() const
{
    require_same_shape(center, scale, "TargetMaps scale");
    require_same_shape(center, offset_x, "TargetMaps offset_x");
    require_same_shape(center, offset_y, "TargetMaps offset_y");
    if (!positive_mask.empty())
        require_same_shape(center, positive_mask, "TargetMaps positive_mask");
}

void CodecConfig::validate() const
{
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (stride < 1)
        throw Error("codec: stride must be >= 1");
    if (!open_unit(confidence_threshold))
        throw Error("codec: confidence_threshold must lie in (0,1)");
    if (!open_unit(nms_threshold))
        throw Error("codec: nms_threshold must lie in (0,1)");
    if (!open_unit(aspect_ratio))
        throw Error("codec: aspect_ratio must lie in (0,1)");
    if (!(gaussian_sigma_factor > 0.0))
        throw Error("codec: gaussian_sigma_factor must be positive");
    if (regression_radius < 0)
        throw Error("codec: regression_radius must be >= 0");
}

std::pair<std::size_t, std::size_t> feature_shape(const ImageSize& size, int stride)
{
    const auto s = static_cast<std::size_t>(stride);
    if (size.width == 0 || size.height == 0)
        throw Error("image size must be positive");
    if (size.width % s != 0 || size.height % s != 0)
        throw Error("image size " + std::to_string(size.height) + "x" + std::to_string(size.width) +
                    " is not divisible by stride " + std::to_string(stride));
    return {size.height / s, size.width / s};
}

namespace {

struct CellHit {
    std::size_t row;
    std::size_t col;
    double offset_x;
    double offset_y;
    double log_height;
};

void splat_gaussian(Grid& center, std::size_t row, std::size_t col, double sigma_x, double sigma_y)
{
    const auto rows = static_cast<long>(center.rows());
    const auto cols = static_cast<long>(center.cols());
    const long rx = static_cast<long>(std::ceil(3.0 * sigma_x));
    const long ry = static_cast<long>(std::ceil(3.0 * sigma_y));
    const double inv_x = 1.0 / (2.0 * sigma_x * sigma_x);
    const double inv_y = 1.0 / (2.0 * sigma_y * sigma_y);
    const long r0 = static_cast<long>(row);
    const long c0 = static_cast<long>(col);
    for (long r = std::max(0L, r0 - ry); r <= std::min(rows - 1, r0 + ry); ++r) {
        const double dy = static_cast<double>(r - r0);
        for (long c = std::max(0L, c0 - rx); c <= std::min(cols - 1, c0 + rx); ++c) {
            const double dx = static_cast<double>(c - c0);
            const double g = std::exp(-(dx * dx * inv_x + dy * dy * inv_y));
            double& cell = center(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            cell = std::max(cell, g);
        }
    }
}

} // namespace

TargetMaps encode_targets(const std::vector<Annotation>& anns, const ImageSize& size, const CodecConfig& cfg)
{
    cfg.validate();
    const auto [rows, cols] = feature_shape(size, cfg.stride);
    TargetMaps maps(rows, cols);
    const double stride = cfg.stride;
    const double width = static_cast<double>(size.width);
    const double height = static_cast<double>(size.height);

    std::vector<CellHit> hits;
    for (const auto& ann : anns) {
        if (ann.label != Label::person)
            continue;
        const BBox& b = ann.box;
        if (!b.valid())
            throw Error("encode: invalid box");
        if (b.x < 0.0 || b.y < 0.0 || b.right() > width || b.bottom() > height)
            throw Error("encode: annotation crosses the image boundary");
        if (b.h < 2.0 * stride)
            throw Error("encode: box height " + std::to_string(b.h) + " is below 2*stride");

        const double fx = b.center_x() / stride;
        const double fy = b.center_y() / stride;
        const auto col = std::min(static_cast<std::size_t>(std::floor(fx)), cols - 1);
        const auto row = std::min(static_cast<std::size_t>(std::floor(fy)), rows - 1);
        hits.push_back({row, col, fx - static_cast<double>(col), fy - static_cast<double>(row), std::log(b.h)});

        const double sigma_x = std::max(1.0, cfg.gaussian_sigma_factor * b.w / stride);
        const double sigma_y = std::max(1.0, cfg.gaussian_sigma_factor * b.h / stride);
        splat_gaussian(maps.center, row, col, sigma_x, sigma_y);
    }

    if (cfg.regression_radius > 0) {
        const long rad = cfg.regression_radius;
        for (const auto& hit : hits) {
            for (long dr = -rad; dr <= rad; ++dr) {
                for (long dc = -rad; dc <= rad; ++dc) {
                    const long r = static_cast<long>(hit.row) + dr;
                    const long c = static_cast<long>(hit.col) + dc;
                    if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols))
                        continue;
                    maps.scale(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hit.log_height;
                }
            }
        }
    }

    // positives are written last so a neighbourhood never overrides a center
    for (const auto& hit : hits) {
        maps.center(hit.row, hit.col) = 1.0;
        maps.scale(hit.row, hit.col) = hit.log_height;
        maps.offset_x(hit.row, hit.col) = hit.offset_x;
        maps.offset_y(hit.row, hit.col) = hit.offset_y;
        maps.positive_mask(hit.row, hit.col) = 1;
    }
    return maps;
}

namespace {

bool is_local_peak(const Grid& g, std::size_t row, std::size_t col)
{
    const double v = g(row, col);
    const std::size_t r0 = row > 0 ? row - 1 : row;
    const std::size_t c0 = col > 0 ? col - 1 : col;
    const std::size_t r1 = std::min(row + 1, g.rows() - 1);
    const std::size_t c1 = std::min(col + 1, g.cols() - 1);
    for (std::size_t r = r0; r <= r1; ++r)
        for (std::size_t c = c0; c <= c1; ++c)
            if (g(r, c) > v)
                return false;
    return true;
}

} // namespace

std::vector<Detection> decode_detections(const TargetMaps& pred, const ImageSize& size, const CodecConfig& cfg)
{
    cfg.validate();
    pred.check_consistent();
    const auto [rows, cols] = feature_shape(size, cfg.stride);
    if (pred.rows() != rows || pred.cols() != cols)
        throw ShapeError("decode: map shape does not match image size and stride");

    const double stride = cfg.stride;
    std::vector<Detection> candidates;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double score = pred.center(r, c);
            if (!(score >= cfg.confidence_threshold))
                continue;
            if (cfg.peak_filter && !is_local_peak(pred.center, r, c))
                continue;
            const double cx = stride * (static_cast<double>(c) + pred.offset_x(r, c));
            const double cy = stride * (static_cast<double>(r) + pred.offset_y(r, c));
            const double h = std::exp(pred.scale(r, c));
            const double w = cfg.aspect_ratio * h;
            candidates.push_back({BBox{cx - 0.5 * w, cy - 0.5 * h, w, h}, std::clamp(score, 0.0, 1.0)});
        }
    }
    return nms(candidates, cfg.nms_threshold);
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error("nms: threshold must lie in (0,1)");
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

    std::vector<Detection> kept;
    for (const std::size_t i : order) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(),
                                            [&](const Detection& k) { return iou(k.box, dets[i].box) > threshold; });
        if (!suppressed)
            kept.push_back(dets[i]);
    }
    return kept;
}

} // namespace mscsp
