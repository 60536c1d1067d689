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
#include <vector>

#include "mscsp/geometry.hpp"
#include "mscsp/grid.hpp"

namespace mscsp {

/// Input image dimensions in pixels.
struct ImageSize {
    std::size_t width = 0;
    std::size_t height = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// The three output planes of the detection head at 1/stride resolution.
///
/// `scale` holds ln(box height in input pixels) at positive cells and 0
/// elsewhere; `offset_x`/`offset_y` hold the sub-cell position of the box
/// center. The same structure carries network predictions, in which case
/// `positive_mask` is unused.
struct TargetMaps {
    Grid center;
    Grid scale;
    Grid offset_x;
    Grid offset_y;
    Mask positive_mask;

    TargetMaps() = default;
    TargetMaps(std::size_t rows, std::size_t cols)
        : center(rows, cols), scale(rows, cols), offset_x(rows, cols), offset_y(rows, cols),
          positive_mask(rows, cols) {}

    std::size_t rows() const noexcept { return center.rows(); }
    std::size_t cols() const noexcept { return center.cols(); }

    /// Throws ShapeError unless all planes share one shape.
    void check_consistent() const;
};

struct CodecConfig {
    int stride = 4;
    double confidence_threshold = 0.01;
    double nms_threshold = 0.3;
    double aspect_ratio = kPedestrianAspectRatio;
    /// Gaussian sigma per axis = max(1, factor * box extent in feature cells).
    double gaussian_sigma_factor = 1.0 / 8.0;
    /// Cells around each positive that also receive the scale target.
    int regression_radius = 0;
    /// Keep only candidates that are maxima of their 3x3 neighbourhood.
    bool peak_filter = true;

    void validate() const;

    friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

struct Detection {
    BBox box;
    double score = 0.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Feature-map shape for an input of `size`; throws when not divisible by the stride.
std::pair<std::size_t, std::size_t> feature_shape(const ImageSize& size, int stride);

/// Builds the center/scale/offset training targets. Only `person` annotations
/// produce positives; other labels are skipped.
TargetMaps encode_targets(const std::vector<Annotation>& anns, const ImageSize& size, const CodecConfig& cfg);

/// Converts predicted maps into scored boxes sorted by descending score.
std::vector<Detection> decode_detections(const TargetMaps& pred, const ImageSize& size, const CodecConfig& cfg);

/// Greedy non-maximum suppression; ties in score keep input order.
std::vector<Detection> nms(const std::vector<Detection>& dets, double threshold);

} // namespace mscsp
