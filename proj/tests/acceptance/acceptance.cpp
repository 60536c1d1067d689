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


// Acceptance gate. One PASS/FAIL line per criterion; the process exits
// non-zero when any criterion fails. Tolerances and runtime limits are the
// constants below and are not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "mscsp/annotation_io.hpp"
#include "mscsp/augment.hpp"
#include "mscsp/codec.hpp"
#include "mscsp/config.hpp"
#include "mscsp/evaluator.hpp"
#include "mscsp/fusion.hpp"
#include "mscsp/loss.hpp"
#include "mscsp/map_dump.hpp"
#include "oracles.hpp"

using namespace mscsp;

namespace {

// codec round trip
constexpr int kCodecImages = 200;
constexpr double kCenterTolPx = 0.5;
constexpr double kHeightRelTol = 1e-9;
constexpr double kSpuriousScore = 0.5;
constexpr double kCodecSeconds = 10.0;

// loss gradients
constexpr int kGradSets = 20;
constexpr std::size_t kGradSide = 8;
constexpr double kFdStep = 1e-6;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradFloor = 1e-5; // below this magnitude the comparison is absolute
constexpr double kGradSeconds = 30.0;

// evaluator oracle
constexpr int kOracleInstances = 500;
constexpr double kOracleTol = 1e-12;
constexpr double kOracleSeconds = 60.0;

// fusion
constexpr double kCloneTol = 1e-6;
constexpr double kFusionSeconds = 20.0;

// augmentation
constexpr int kAugDraws = 10000;
constexpr double kFreqTol = 0.02;
constexpr double kAugSeconds = 60.0;

// I/O
constexpr int kIoInstances = 100;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            pass = false;
        notes.push_back(std::string(ok ? "ok " : "FAILED ") + what);
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ------------------------------------------------------------------------

Outcome codec_round_trip()
{
    Outcome out;
    gen::Engine e(1001);
    const ImageSize size{480, 384};
    const CodecConfig cfg;
    int boxes = 0;
    int recovered = 0;
    int spurious = 0;
    double worst_center = 0.0;
    double worst_height = 0.0;
    for (int img = 0; img < kCodecImages; ++img) {
        const int want = gen::integer(e, 1, 5);
        const auto anns = gen::pedestrians(e, size, want, 8.0, 160.0, 8.0);
        const auto dets = decode_detections(encode_targets(anns, size, cfg), size, cfg);
        std::vector<bool> used(dets.size(), false);
        for (const auto& a : anns) {
            ++boxes;
            for (std::size_t d = 0; d < dets.size(); ++d) {
                const double dc = std::max(std::abs(dets[d].box.center_x() - a.box.center_x()),
                                           std::abs(dets[d].box.center_y() - a.box.center_y()));
                const double dh = std::abs(dets[d].box.h - a.box.h) / a.box.h;
                if (!used[d] && dc <= kCenterTolPx && dh <= kHeightRelTol) {
                    used[d] = true;
                    ++recovered;
                    worst_center = std::max(worst_center, dc);
                    worst_height = std::max(worst_height, dh);
                    break;
                }
            }
        }
        for (std::size_t d = 0; d < dets.size(); ++d)
            spurious += !used[d] && dets[d].score > kSpuriousScore;
    }
    out.require(recovered == boxes, std::to_string(recovered) + "/" + std::to_string(boxes) + " boxes recovered");
    out.require(spurious == 0, std::to_string(spurious) + " spurious detections above 0.5");
    out.notes.push_back("max center error " + fmt("%.3g px", worst_center) + ", max rel. height error " +
                        fmt("%.3g", worst_height));
    return out;
}

// ------------------------------------------------------------------------

Outcome loss_gradients()
{
    Outcome out;
    gen::Engine e(1002);
    const LossConfig cfg;
    double worst = 0.0;
    std::size_t entries = 0;
    for (int set = 0; set < kGradSets; ++set) {
        // target from real boxes on a 32x32 image, so the map is 8x8
        TargetMaps target = encode_targets(gen::pedestrians(e, {32, 32}, gen::integer(e, 0, 3), 8.0, 24.0, 8.0),
                                           {32, 32}, {});
        TargetMaps pred(kGradSide, kGradSide);
        for (std::size_t i = 0; i < pred.center.size(); ++i) {
            pred.center[i] = gen::real(e, 0.02, 0.98);
            auto residual = [&] {
                const double mag = gen::coin(e) ? gen::real(e, 0.0, 0.95) : gen::real(e, 1.05, 3.0);
                return gen::coin(e) ? mag : -mag;
            };
            pred.scale[i] = target.scale[i] + residual();
            pred.offset_x[i] = target.offset_x[i] + residual();
            pred.offset_y[i] = target.offset_y[i] + residual();
        }
        const LossResult r = total_loss(pred, target, cfg);
        const Grid* grads[] = {&r.grad_center, &r.grad_scale, &r.grad_offset_x, &r.grad_offset_y};
        for (int k = 0; k < 4; ++k) {
            auto plane = [k](TargetMaps& m) -> Grid& {
                Grid* p[] = {&m.center, &m.scale, &m.offset_x, &m.offset_y};
                return *p[k];
            };
            std::vector<double> x(plane(pred).values().begin(), plane(pred).values().end());
            auto f = [&](const std::vector<double>& v) {
                TargetMaps probe = pred;
                std::copy(v.begin(), v.end(), plane(probe).values().begin());
                return total_loss(probe, target, cfg).total;
            };
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double fd = oracle::central_difference(f, x, i, kFdStep);
                worst = std::max(worst, oracle::relative_error((*grads[k])[i], fd, kGradFloor));
                ++entries;
            }
        }
    }
    out.require(worst <= kGradRelTol, "max relative error " + fmt("%.3g", worst) + " over " +
                                          std::to_string(entries) + " entries");
    return out;
}

// ------------------------------------------------------------------------

Outcome evaluator_oracle()
{
    Outcome out;
    gen::Engine e(1003);
    int curve_mismatch = 0;
    int mr_mismatch = 0;
    std::size_t points = 0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const auto frames = gen::micro_instance(e, 5, 6, 8);
        const MrFppiCurve c = mr_fppi_curve(frames);
        const auto ref = oracle::curve(frames);
        bool same = c.points.size() == ref.size();
        for (std::size_t k = 0; same && k < ref.size(); ++k)
            same = std::abs(c.points[k].fppi - ref[k].fppi) <= kOracleTol &&
                   std::abs(c.points[k].miss_rate - ref[k].miss_rate) <= kOracleTol;
        curve_mismatch += !same;
        points += ref.size();
        mr_mismatch += std::abs(log_average_mr(c) - oracle::log_average(ref)) > kOracleTol;
    }
    out.require(curve_mismatch == 0, std::to_string(curve_mismatch) + " curve mismatches (" +
                                         std::to_string(points) + " oracle points)");
    out.require(mr_mismatch == 0, std::to_string(mr_mismatch) + " log-average MR mismatches");
    return out;
}

// ------------------------------------------------------------------------

Outcome protocol_constants()
{
    Outcome out;
    const SubsetSpec r = reasonable_subset();
    auto ped = [](double h) { return Annotation{{0, 0, 0.41 * h, h}, Label::person, Occlusion::none}; };
    out.require(classify(ped(54), r) == GtClass::ignore && classify(ped(55), r) == GtClass::evaluate &&
                    classify(ped(56), r) == GtClass::evaluate,
                "Reasonable heights {54,55,56} -> {ignore,evaluate,evaluate}");

    const CodecConfig cfg;
    out.require(cfg.confidence_threshold == 0.01 && cfg.nms_threshold == 0.3 && cfg.aspect_ratio == 0.41,
                "default confidence 0.01, NMS 0.3, aspect 0.41");

    // confidence: 0.01 kept, just below dropped
    TargetMaps m(10, 10);
    m.center(2, 2) = 0.01;
    m.scale(2, 2) = std::log(20.0);
    m.center(7, 7) = std::nextafter(0.01, 0.0);
    m.scale(7, 7) = std::log(20.0);
    const auto conf = decode_detections(m, {40, 40}, cfg);
    out.require(conf.size() == 1 && conf[0].score == 0.01, "confidence threshold 0.01 is inclusive");

    // aspect: width is 0.41 * height
    out.require(!conf.empty() && std::abs(conf[0].box.w - 0.41 * 20.0) <= 1e-12 &&
                    std::abs(conf[0].box.h - 20.0) <= 1e-12,
                "decoded width = 0.41 * height");

    // NMS: two boxes with equal height h centered 8 px apart overlap with
    // IoU (w - 8) / (w + 8); pick h on either side of IoU 0.3.
    auto pair_kept = [&](double iou_target) {
        const double w = 8.0 * (1.0 + iou_target) / (1.0 - iou_target);
        const double h = w / 0.41;
        TargetMaps n(20, 20);
        n.center(10, 8) = 0.9;
        n.center(10, 10) = 0.8;
        n.scale(10, 8) = n.scale(10, 10) = std::log(h);
        return decode_detections(n, {80, 80}, cfg).size();
    };
    out.require(pair_kept(0.31) == 1, "IoU 0.31 > 0.3 suppresses the weaker box");
    out.require(pair_kept(0.29) == 2, "IoU 0.29 <= 0.3 keeps both boxes");
    return out;
}

// ------------------------------------------------------------------------

Outcome fusion_shapes()
{
    Outcome out;
    gen::Engine e(1005);
    const BackboneSpec spec;
    int shape_ok = 0;
    int shape_total = 0;
    for (const Topology t : kAllTopologies) {
        const FusionGraph g = build_fusion_graph(t, spec, 7);
        for (const auto& [h, w] : {std::pair<std::size_t, std::size_t>{64, 80}, {128, 160}}) {
            const TargetMaps m = forward(g, gen::image(e, 3, h, w), gen::image(e, 1, h, w));
            bool ok = true;
            for (const Grid* p : {&m.center, &m.scale, &m.offset_x, &m.offset_y})
                ok = ok && p->rows() == h / 4 && p->cols() == w / 4;
            shape_ok += ok;
            ++shape_total;
        }
    }
    out.require(shape_ok == shape_total, std::to_string(shape_ok) + "/" + std::to_string(shape_total) +
                                              " topology x size cases give (H/4 x W/4) maps");

    // Input-Fusion clone rule on the graph's own entry layer
    const FusionGraph input = build_fusion_graph(Topology::InputFusion, spec, 7);
    const ConvLayer& six = input.vis.at(0);
    ConvLayer three(3, six.out_channels, six.kernel, six.stride);
    bool halves_equal = six.in_channels == 6;
    for (std::size_t o = 0; o < six.out_channels; ++o)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t ky = 0; ky < six.kernel; ++ky)
                for (std::size_t kx = 0; kx < six.kernel; ++kx) {
                    three.weight(o, i, ky, kx) = six.weight(o, i, ky, kx);
                    halves_equal = halves_equal && six.weight(o, i, ky, kx) == six.weight(o, i + 3, ky, kx);
                }
    bool zero_bias = true;
    for (const double b : six.bias)
        zero_bias = zero_bias && b == 0.0;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Tensor x = gen::image(e, 3, 64, 80);
        const Tensor doubled = conv2d(concat_channels(x, x), six);
        const Tensor single = conv2d(x, three);
        for (std::size_t i = 0; i < single.size(); ++i)
            worst = std::max(worst, std::abs(doubled.values()[i] - 2.0 * single.values()[i]));
    }
    out.require(halves_equal && zero_bias && worst <= kCloneTol,
                "Input-Fusion clone linearity, max deviation " + fmt("%.3g", worst));

    // SparseFusion with zero IR equals the VIS-only path of the same weights
    const FusionGraph sparse = build_fusion_graph(Topology::SparseFusion, spec, 7);
    bool bitwise = true;
    for (const auto& [h, w] : {std::pair<std::size_t, std::size_t>{64, 80}, {128, 160}}) {
        const Tensor vis = gen::image(e, 3, h, w);
        const TargetMaps a = forward(sparse, vis, Tensor(1, h, w));
        const TargetMaps b = forward(sparse, vis, gen::image(e, 1, h, w), {true});
        for (const auto& [p, q] : {std::pair{&a.center, &b.center}, {&a.scale, &b.scale},
                                   {&a.offset_x, &b.offset_x}, {&a.offset_y, &b.offset_y}})
            bitwise = bitwise && p->values().size() == q->values().size() &&
                      std::memcmp(p->values().data(), q->values().data(), p->values().size_bytes()) == 0;
    }
    out.require(bitwise, "SparseFusion with zero IR is bit-identical to the VIS path");

    const std::size_t late = param_count(build_fusion_graph(Topology::LateFusion, spec, 7));
    const std::size_t halfway = param_count(build_fusion_graph(Topology::HalfwayFusion, spec, 7));
    const std::size_t baseline = param_count(build_fusion_graph(Topology::LateFusionBaseline, spec, 7));
    out.require(late > halfway, "param_count LateFusion " + std::to_string(late) + " > HalfwayFusion " +
                                    std::to_string(halfway));
    out.require(halfway > baseline, "param_count HalfwayFusion " + std::to_string(halfway) +
                                        " > LateFusionBaseline " + std::to_string(baseline));
    return out;
}

// ------------------------------------------------------------------------

Outcome augmentation()
{
    Outcome out;
    gen::Engine e(1006);
    const Rng master(2024);
    AugmentConfig cfg;
    cfg.target_height = 24;
    cfg.target_width = 32;

    const ImagePair small = gen::image_pair(e, 8, 8, 0);
    int masked_vis = 0;
    int masked_ir = 0;
    int masked_none = 0;
    int noise_vis = 0;
    int noise_ir = 0;
    for (int i = 0; i < kAugDraws; ++i) {
        Rng r = master.derive(static_cast<std::uint64_t>(i));
        ParamLog log;
        random_masking(small, cfg, r, &log);
        masked_vis += log[0].modality == "vis";
        masked_ir += log[0].modality == "ir";
        masked_none += log[0].modality == "none";
        Rng n = master.derive(static_cast<std::uint64_t>(kAugDraws + i));
        ParamLog nlog;
        inject_noise(small, cfg, n, &nlog);
        noise_vis += nlog[0].applied;
        noise_ir += nlog[1].applied;
    }
    const double fn = masked_none / static_cast<double>(kAugDraws);
    const double fv = masked_vis / static_cast<double>(kAugDraws);
    const double fi = masked_ir / static_cast<double>(kAugDraws);
    out.require(std::abs(fn - 0.5) <= kFreqTol && std::abs(fv - 0.25) <= kFreqTol && std::abs(fi - 0.25) <= kFreqTol,
                "masking frequencies (none, vis, ir) = (" + fmt("%.4f", fn) + ", " + fmt("%.4f", fv) + ", " +
                    fmt("%.4f", fi) + ")");
    const double rv = noise_vis / static_cast<double>(kAugDraws);
    const double ri = noise_ir / static_cast<double>(kAugDraws);
    out.require(std::abs(rv - 0.2) <= kFreqTol && std::abs(ri - 0.2) <= kFreqTol,
                "noise application rate VIS " + fmt("%.4f", rv) + ", IR " + fmt("%.4f", ri));

    // sync erasing: same rectangle in both modalities, and the changed pixels
    // of each modality stay inside it
    AugmentConfig sync = cfg;
    sync.erase.mode = SyncMode::sync;
    int applied = 0;
    int identical = 0;
    for (int i = 0; i < 2000; ++i) {
        const ImagePair p = gen::image_pair(e, 24, 32, 0);
        Rng r = master.derive(static_cast<std::uint64_t>(3 * kAugDraws + i));
        ParamLog log;
        const ImagePair o = random_erasing(p, sync, r, &log);
        if (!log[0].applied && !log[1].applied)
            continue;
        ++applied;
        bool same = log[0].applied && log[1].applied && log[0].values == log[1].values;
        const auto x0 = static_cast<std::size_t>(log[0].get("x"));
        const auto y0 = static_cast<std::size_t>(log[0].get("y"));
        const auto x1 = x0 + static_cast<std::size_t>(log[0].get("w"));
        const auto y1 = y0 + static_cast<std::size_t>(log[0].get("h"));
        for (std::size_t y = 0; y < 24; ++y)
            for (std::size_t x = 0; x < 32; ++x) {
                const bool inside = x >= x0 && x < x1 && y >= y0 && y < y1;
                if (!inside)
                    same = same && o.ir(0, y, x) == p.ir(0, y, x) && o.vis(0, y, x) == p.vis(0, y, x);
            }
        identical += same;
    }
    out.require(applied > 0 && identical == applied, "sync erasing identical in " + std::to_string(identical) + "/" +
                                                         std::to_string(applied) + " applied cases");

    // geometric: identical parameters in the log, and an IR image equal to
    // VIS channel 0 stays equal to it after the transform
    int geo_same = 0;
    const int geo_trials = 500;
    for (int i = 0; i < geo_trials; ++i) {
        ImagePair p = gen::image_pair(e, static_cast<std::size_t>(gen::integer(e, 10, 60)),
                                      static_cast<std::size_t>(gen::integer(e, 10, 60)), 0);
        std::copy(p.vis.channel(0).begin(), p.vis.channel(0).end(), p.ir.values().begin());
        Rng r = master.derive(static_cast<std::uint64_t>(4 * kAugDraws + i));
        ParamLog log;
        const ImagePair o = geometric_augment(p, cfg, r, &log);
        const bool logs = log.size() == 2 && log[0].values == log[1].values;
        const bool pixels = std::equal(o.ir.values().begin(), o.ir.values().end(), o.vis.channel(0).begin());
        geo_same += logs && pixels;
    }
    out.require(geo_same == geo_trials, "geometric parameters identical across modalities in " +
                                            std::to_string(geo_same) + "/" + std::to_string(geo_trials) + " cases");

    // determinism: every stage list twice under the same seed
    const std::vector<std::vector<std::string>> pipelines{
        {"geometric"},
        {"geometric", "erasing-sync", "masking"},
        {"erasing-async", "noise-sync"},
        {"noise-async", "masking", "geometric", "erasing"},
        {"masking", "erasing-sync", "noise"},
    };
    int det_ok = 0;
    for (std::size_t k = 0; k < pipelines.size(); ++k) {
        std::vector<AugmentStage> stages;
        for (const auto& s : pipelines[k])
            stages.push_back(parse_stage(s));
        const ImagePair p = gen::image_pair(e, 40, 48);
        ParamLog l1;
        ParamLog l2;
        const ImagePair a = apply_pipeline(p, cfg, stages, master.derive(99 + k), &l1);
        const ImagePair b = apply_pipeline(p, cfg, stages, master.derive(99 + k), &l2);
        const bool bytes =
            a.vis.size() == b.vis.size() && a.ir.size() == b.ir.size() &&
            std::memcmp(a.vis.values().data(), b.vis.values().data(), a.vis.values().size_bytes()) == 0 &&
            std::memcmp(a.ir.values().data(), b.ir.values().data(), a.ir.values().size_bytes()) == 0 &&
            a.annotations == b.annotations && format_params(l1) == format_params(l2);
        det_ok += bytes;
    }
    out.require(det_ok == static_cast<int>(pipelines.size()),
                std::to_string(det_ok) + "/" + std::to_string(pipelines.size()) + " pipelines byte-equal on rerun");
    return out;
}

// ------------------------------------------------------------------------

Outcome io_round_trips()
{
    Outcome out;
    gen::Engine e(1007);
    int ann_ok = 0;
    int det_ok = 0;
    int cfg_ok = 0;
    int dump_ok = 0;
    for (int i = 0; i < kIoInstances; ++i) {
        const auto anns = gen::printable_annotations(e);
        std::istringstream a(format_annotations(anns));
        ann_ok += parse_annotations(a, "a") == anns;

        const auto dets = gen::printable_detections(e);
        std::istringstream d(format_detections(dets));
        det_ok += parse_detections(d, "d") == dets;

        const RunConfig c = gen::run_config(e);
        std::istringstream ct(format_config(c));
        cfg_ok += parse_config(ct, "c") == c;

        const TargetMaps m = gen::float_maps(e, static_cast<std::size_t>(gen::integer(e, 1, 32)),
                                             static_cast<std::size_t>(gen::integer(e, 1, 32)));
        std::stringstream bin;
        write_map_dump(bin, m);
        const TargetMaps back = read_map_dump(bin, "m");
        dump_ok += back.center == m.center && back.scale == m.scale && back.offset_x == m.offset_x &&
                   back.offset_y == m.offset_y && back.positive_mask == m.positive_mask;
    }
    const std::string n = "/" + std::to_string(kIoInstances);
    out.require(ann_ok == kIoInstances, "annotation files " + std::to_string(ann_ok) + n);
    out.require(det_ok == kIoInstances, "detection files " + std::to_string(det_ok) + n);
    out.require(cfg_ok == kIoInstances, "config files " + std::to_string(cfg_ok) + n);
    out.require(dump_ok == kIoInstances, "map dumps " + std::to_string(dump_ok) + n);

    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "mscsp_acceptance_fuse";
    fs::remove_all(root);
    write_annotation_dir(root / "vis", {{"frame", {{{10, 10, 20, 40}, Label::person, Occlusion::none}}}});
    write_annotation_dir(root / "ir", {{"frame", {{{12, 8, 20, 44}, Label::person, Occlusion::none}}}});
    const FrameAnnotations fused = fuse_annotation_dirs(root / "vis", root / "ir");
    fs::remove_all(root);
    out.require(fused.size() == 1 && fused.begin()->second.size() == 1 &&
                    fused.begin()->second[0].box == BBox{10, 8, 22, 44},
                "fuse-annotations (10,10,20,40) + (12,8,20,44) -> (10,8,22,44)");
    return out;
}

// ------------------------------------------------------------------------

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds; // 0 = no limit
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"codec round-trip", codec_round_trip, kCodecSeconds},
        {"loss gradient check", loss_gradients, kGradSeconds},
        {"evaluator oracle", evaluator_oracle, kOracleSeconds},
        {"protocol constants", protocol_constants, 0.0},
        {"fusion shape suite", fusion_shapes, kFusionSeconds},
        {"augmentation distribution suite", augmentation, kAugSeconds},
        {"I/O round-trips", io_round_trips, 0.0},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o.require(false, std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0.0)
            o.require(secs < c.limit_seconds, "runtime " + fmt("%.2f s", secs) + " < " + fmt("%.0f s", c.limit_seconds));
        else
            o.notes.push_back("runtime " + fmt("%.2f s", secs));
        std::printf("%s %s\n", o.pass ? "PASS" : "FAIL", c.name);
        for (const auto& n : o.notes)
            std::printf("    %s\n", n.c_str());
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
