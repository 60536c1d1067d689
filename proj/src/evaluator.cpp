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


#include "mscsp/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace mscsp {

FrameResult match_frame(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                        const MatchParams& params, std::string frame_id)
{
    FrameResult out;
    out.frame_id = std::move(frame_id);

    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

    std::vector<bool> taken(gts.size(), false);
    for (const auto& gt : gts)
        out.evaluate_gt += gt.cls == GtClass::evaluate;

    for (const std::size_t d : order) {
        const BBox& box = dets[d].box;
        MatchEntry entry{d, std::nullopt, Disposition::fp, dets[d].score};

        double best = params.iou_threshold;
        std::optional<std::size_t> best_gt;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gts[g].cls != GtClass::evaluate || taken[g])
                continue;
            const double o = iou(box, gts[g].annotation.box);
            if (o >= best && (!best_gt || o > best)) {
                best = o;
                best_gt = g;
            }
        }
        if (best_gt) {
            taken[*best_gt] = true;
            entry.gt = best_gt;
            entry.disposition = Disposition::tp;
        } else {
            for (std::size_t g = 0; g < gts.size(); ++g) {
                if (gts[g].cls == GtClass::ignore && ioa(box, gts[g].annotation.box) >= params.ignore_ioa_threshold) {
                    entry.gt = g;
                    entry.disposition = Disposition::ignored;
                    break;
                }
            }
        }
        out.matches.push_back(entry);
    }

    std::size_t matched = 0;
    for (const auto& m : out.matches)
        matched += m.disposition == Disposition::tp;
    out.misses = out.evaluate_gt - matched;
    return out;
}

MrFppiCurve mr_fppi_curve(const std::vector<FrameInput>& frames, const MatchParams& params)
{
    if (frames.empty())
        throw Error("mr_fppi_curve: no frames");

    struct Scored {
        double score;
        Disposition disposition;
    };
    std::vector<Scored> all;
    std::size_t total_gt = 0;
    for (const auto& f : frames) {
        const FrameResult r = match_frame(f.detections, f.gts, params, f.frame_id);
        total_gt += r.evaluate_gt;
        for (const auto& m : r.matches)
            all.push_back({m.score, m.disposition});
    }
    if (total_gt == 0)
        throw Error("empty ground truth");

    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

    const double n_frames = static_cast<double>(frames.size());
    const double n_gt = static_cast<double>(total_gt);
    MrFppiCurve curve;
    auto push = [&](double threshold, std::size_t fp, std::size_t tp) {
        const CurvePoint p{threshold, static_cast<double>(fp) / n_frames, 1.0 - static_cast<double>(tp) / n_gt};
        if (!curve.points.empty() && curve.points.back().fppi == p.fppi)
            curve.points.back() = p;
        else
            curve.points.push_back(p);
    };

    if (all.empty()) {
        push(std::numeric_limits<double>::infinity(), 0, 0);
        return curve;
    }

    std::size_t fp = 0;
    std::size_t tp = 0;
    std::size_t i = 0;
    while (i < all.size()) {
        const double t = all[i].score;
        for (; i < all.size() && all[i].score == t; ++i) {
            fp += all[i].disposition == Disposition::fp;
            tp += all[i].disposition == Disposition::tp;
        }
        push(t, fp, tp);
    }
    return curve;
}

double log_average_mr(const MrFppiCurve& curve, const LogAverageRange& range)
{
    if (curve.points.empty())
        throw Error("log_average_mr: empty curve");
    if (!(range.lo > 0.0 && range.lo < range.hi) || range.samples < 2)
        throw Error("log_average_mr: invalid reference range");

    const double a = std::log10(range.lo);
    const double b = std::log10(range.hi);
    double highest = 0.0;
    for (const auto& p : curve.points)
        highest = std::max(highest, p.miss_rate);

    double log_sum = 0.0;
    for (int i = 0; i < range.samples; ++i) {
        const double ref = std::pow(10.0, a + (b - a) * i / (range.samples - 1));
        double mr = highest;
        for (const auto& p : curve.points)
            if (p.fppi <= ref)
                mr = p.miss_rate;
        log_sum += std::log(std::max(mr, 1e-4));
    }
    return std::exp(log_sum / range.samples) * 100.0;
}

std::vector<SizeBin> default_size_bins()
{
    const double inf = std::numeric_limits<double>::infinity();
    return {{20.0, 40.0}, {40.0, 60.0}, {60.0, 80.0}, {80.0, inf}};
}

std::vector<Occlusion> default_occlusion_bins()
{
    return {Occlusion::none, Occlusion::partial, Occlusion::heavy};
}

namespace {

std::string format_height(double v)
{
    if (std::isinf(v))
        return "inf";
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

SubsetSpec size_bin_spec(const SizeBin& bin)
{
    SubsetSpec s;
    s.name = "[" + format_height(bin.lo) + "," + format_height(bin.hi) + ")";
    s.min_height = bin.lo;
    // the largest double below hi makes the inclusive bound half-open
    s.max_height = std::isinf(bin.hi) ? bin.hi : std::nextafter(bin.hi, -std::numeric_limits<double>::infinity());
    s.validate();
    return s;
}

SubsetSpec occlusion_bin_spec(Occlusion level)
{
    SubsetSpec s;
    s.name = std::string(to_string(level));
    s.allowed_occlusion = {level};
    return s;
}

SubsetResult evaluate_subset(const FrameDetections& dets, const FrameAnnotations& gts, const SubsetSpec& spec,
                             const MatchParams& params)
{
    spec.validate();
    for (const auto& [frame, _] : dets)
        if (!gts.contains(frame))
            throw Error("detections reference unknown frame '" + frame + "'");

    std::vector<FrameInput> frames;
    SubsetResult result;
    result.name = spec.name;
    for (const auto& [frame, anns] : gts) {
        FrameInput in;
        in.frame_id = frame;
        if (auto it = dets.find(frame); it != dets.end())
            in.detections = it->second;
        for (const auto& a : anns) {
            const GtClass cls = classify(a, spec);
            result.evaluate_gt += cls == GtClass::evaluate;
            in.gts.push_back({a, cls});
        }
        frames.push_back(std::move(in));
    }
    if (result.evaluate_gt > 0) {
        result.curve = mr_fppi_curve(frames, params);
        result.log_average_mr = log_average_mr(result.curve);
    }
    return result;
}

EvalReport evaluate(const FrameDetections& dets, const FrameAnnotations& gts, const std::vector<SubsetSpec>& specs,
                    const std::vector<SizeBin>& size_bins, const std::vector<Occlusion>& occlusion_bins,
                    const MatchParams& params)
{
    EvalReport report;
    report.frames = gts.size();
    for (const auto& s : specs)
        report.subsets.push_back(evaluate_subset(dets, gts, s, params));
    for (const auto& b : size_bins)
        report.size_bins.push_back(evaluate_subset(dets, gts, size_bin_spec(b), params));
    for (const auto o : occlusion_bins)
        report.occlusion_bins.push_back(evaluate_subset(dets, gts, occlusion_bin_spec(o), params));
    return report;
}

namespace {

void table(std::ostringstream& os, const std::string& title, const std::vector<SubsetResult>& rows)
{
    if (rows.empty())
        return;
    os << title << "\n";
    os << "  " << std::left << std::setw(16) << "name" << std::right << std::setw(8) << "gt" << std::setw(12)
       << "MR [%]" << "\n";
    for (const auto& r : rows) {
        os << "  " << std::left << std::setw(16) << r.name << std::right << std::setw(8) << r.evaluate_gt
           << std::setw(12);
        if (r.log_average_mr) {
            std::ostringstream v;
            v << std::fixed << std::setprecision(2) << *r.log_average_mr;
            os << v.str();
        } else {
            os << "n/a";
        }
        os << "\n";
    }
}

} // namespace

std::string format_report(const EvalReport& report)
{
    std::ostringstream os;
    os << "frames: " << report.frames << "\n";
    os << "log-average miss rate over FPPI [1e-2, 1e0]\n";
    table(os, "subsets", report.subsets);
    table(os, "size bins", report.size_bins);
    table(os, "occlusion bins", report.occlusion_bins);
    return os.str();
}

std::string format_curve_csv(const MrFppiCurve& curve)
{
    std::ostringstream os;
    os << std::setprecision(6) << "fppi,miss_rate\n";
    for (const auto& p : curve.points)
        os << p.fppi << ',' << p.miss_rate << '\n';
    return os.str();
}

std::vector<std::string> balanced_sample(const std::vector<IndexEntry>& index, std::size_t n, Rng& rng)
{
    std::vector<const std::string*> with;
    std::vector<const std::string*> without;
    for (const auto& e : index)
        (e.has_pedestrian ? with : without).push_back(&e.frame_id);

    std::vector<std::string> out;
    if (n == 0)
        return out;
    if (with.empty())
        throw Error("balanced_sample: no frames with pedestrians");
    if (without.empty())
        throw Error("balanced_sample: no frames without pedestrians");
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pool = rng.bernoulli(0.5) ? with : without;
        out.push_back(*pool[rng.uniform_index(pool.size())]);
    }
    return out;
}

} // namespace mscsp
