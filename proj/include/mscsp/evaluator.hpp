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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mscsp/codec.hpp"
#include "mscsp/geometry.hpp"
#include "mscsp/rng.hpp"

namespace mscsp {

inline constexpr double kMatchIou = 0.5;
inline constexpr double kIgnoreIoa = 0.5;

enum class Disposition { tp, fp, ignored };

struct GroundTruth {
    Annotation annotation;
    GtClass cls = GtClass::evaluate;
};

struct MatchEntry {
    std::size_t detection = 0;           // index into the frame's detection list
    std::optional<std::size_t> gt;       // matched GT (TP) or absorbing ignore region
    Disposition disposition = Disposition::fp;
    double score = 0.0;
};

/// Per-frame matching outcome. `matches` is in descending score order.
struct FrameResult {
    std::string frame_id;
    std::vector<MatchEntry> matches;
    std::size_t misses = 0;
    std::size_t evaluate_gt = 0;
};

struct MatchParams {
    double iou_threshold = kMatchIou;
    double ignore_ioa_threshold = kIgnoreIoa;

    friend bool operator==(const MatchParams&, const MatchParams&) = default;
};

/// Greedy by descending score (stable for ties): each detection takes the
/// best-IoU unmatched evaluate-class GT at IoU >= 0.5, else is absorbed by an
/// ignore region at IoA >= 0.5, else is a false positive.
FrameResult match_frame(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                        const MatchParams& params = {}, std::string frame_id = {});

struct CurvePoint {
    double threshold = 0.0; // lowest score included at this point
    double fppi = 0.0;
    double miss_rate = 1.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Miss rate against false positives per image, ascending in fppi. Points
/// sharing an fppi value collapse to the one with the lowest miss rate.
struct MrFppiCurve {
    std::vector<CurvePoint> points;
};

/// A frame's detections and classified ground truth.
struct FrameInput {
    std::string frame_id;
    std::vector<Detection> detections;
    std::vector<GroundTruth> gts;
};

/// Sweeps the score threshold over every distinct detection score. Throws
/// when no evaluate-class GT exists.
MrFppiCurve mr_fppi_curve(const std::vector<FrameInput>& frames, const MatchParams& params = {});

struct LogAverageRange {
    double lo = 1e-2;
    double hi = 1e0;
    int samples = 9;
};

/// Geometric mean (in percent) of stepwise miss rates at log-spaced FPPI
/// references; each sample is clamped to at least 1e-4.
double log_average_mr(const MrFppiCurve& curve, const LogAverageRange& range = {});

/// Half-open height interval [lo, hi).
struct SizeBin {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const SizeBin&, const SizeBin&) = default;
};

std::vector<SizeBin> default_size_bins();
std::vector<Occlusion> default_occlusion_bins();

SubsetSpec size_bin_spec(const SizeBin& bin);
SubsetSpec occlusion_bin_spec(Occlusion level);

struct SubsetResult {
    std::string name;
    std::size_t evaluate_gt = 0;
    std::optional<double> log_average_mr; // absent when the subset has no GT
    MrFppiCurve curve;
};

struct EvalReport {
    std::size_t frames = 0;
    std::vector<SubsetResult> subsets;
    std::vector<SubsetResult> size_bins;
    std::vector<SubsetResult> occlusion_bins;
};

using FrameDetections = std::map<std::string, std::vector<Detection>>;
using FrameAnnotations = std::map<std::string, std::vector<Annotation>>;

/// Evaluates every subset and bin. Detection frames must be a subset of the
/// annotated frames; frames without detections contribute none.
EvalReport evaluate(const FrameDetections& dets, const FrameAnnotations& gts, const std::vector<SubsetSpec>& specs,
                    const std::vector<SizeBin>& size_bins, const std::vector<Occlusion>& occlusion_bins,
                    const MatchParams& params = {});

SubsetResult evaluate_subset(const FrameDetections& dets, const FrameAnnotations& gts, const SubsetSpec& spec,
                             const MatchParams& params = {});

/// Plain-text table of a report.
std::string format_report(const EvalReport& report);

/// CSV with header `fppi,miss_rate`.
std::string format_curve_csv(const MrFppiCurve& curve);

struct IndexEntry {
    std::string frame_id;
    bool has_pedestrian = false;
};

/// Draws n frames with replacement, each from the pedestrian class with
/// probability 0.5.
std::vector<std::string> balanced_sample(const std::vector<IndexEntry>& index, std::size_t n, Rng& rng);

} // namespace mscsp
