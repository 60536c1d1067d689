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


#include "mscsp/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mscsp {

namespace {

void check_unit_range(const Tensor& t, const char* what)
{
    for (const double v : t.values())
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(std::string("image pair: ") + what + " values must lie in [0,1]");
}

void check_probability(double p, const char* what)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(std::string("augment: ") + what + " must lie in [0,1]");
}

} // namespace

void ImagePair::validate() const
{
    if (vis.channels() != 3)
        throw ShapeError("image pair: VIS must have 3 channels");
    if (ir.channels() != 1)
        throw ShapeError("image pair: IR must have 1 channel");
    if (!vis.same_spatial(ir))
        throw ShapeError("image pair: VIS and IR must share spatial dimensions");
    if (vis.height() == 0 || vis.width() == 0)
        throw ShapeError("image pair: empty image");
    check_unit_range(vis, "VIS");
    check_unit_range(ir, "IR");
}

std::string_view to_string(SyncMode mode) noexcept
{
    return mode == SyncMode::sync ? "sync" : "async";
}

std::string_view to_string(NoiseModel model) noexcept
{
    switch (model) {
    case NoiseModel::none: return "none";
    case NoiseModel::gaussian: return "gaussian";
    case NoiseModel::poisson: return "poisson";
    case NoiseModel::salt_pepper: return "salt_pepper";
    }
    return "?";
}

SyncMode parse_sync_mode(std::string_view text)
{
    if (text == "sync")
        return SyncMode::sync;
    if (text == "async")
        return SyncMode::async;
    throw Error("unknown sync mode '" + std::string(text) + "'");
}

NoiseModel parse_noise_model(std::string_view text)
{
    for (const auto m : {NoiseModel::none, NoiseModel::gaussian, NoiseModel::poisson, NoiseModel::salt_pepper})
        if (to_string(m) == text)
            return m;
    throw Error("unknown noise model '" + std::string(text) + "'");
}

void AugmentConfig::validate() const
{
    if (target_height == 0 || target_width == 0)
        throw Error("augment: target size must be positive");
    check_probability(erase.probability, "erase probability");
    check_probability(mask.probability, "mask probability");
    check_probability(mask.split_vis, "mask split_vis");
    check_probability(noise.probability, "noise probability");
    check_probability(flip_probability, "flip probability");
    check_probability(noise.sp_fraction, "salt-and-pepper fraction");
    if (!(erase.area_min > 0.0 && erase.area_min <= erase.area_max && erase.area_max <= 1.0))
        throw Error("augment: erase area range must satisfy 0 < min <= max <= 1");
    if (!(erase.aspect_min > 0.0 && erase.aspect_min <= erase.aspect_max))
        throw Error("augment: erase aspect range must satisfy 0 < min <= max");
    if (!(rescale_min > 0.0 && rescale_min <= rescale_max))
        throw Error("augment: rescale range must satisfy 0 < min <= max");
    if (!(noise.gaussian_sigma >= 0.0) || !(noise.poisson_peak > 0.0))
        throw Error("augment: noise sigma must be >= 0 and poisson peak > 0");
}

double ParamRecord::get(std::string_view key) const
{
    for (const auto& [k, v] : values)
        if (k == key)
            return v;
    throw Error("param record " + stage + "/" + modality + " has no key '" + std::string(key) + "'");
}

std::string format_params(const ParamLog& log)
{
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& rec : log) {
        if (!first)
            os << ' ';
        first = false;
        os << rec.stage << '/' << rec.modality << ":applied=" << (rec.applied ? 1 : 0);
        for (const auto& [k, v] : rec.values)
            os << ',' << k << '=' << v;
    }
    return os.str();
}

// ---------------------------------------------------------------- geometric

GeometricParams draw_geometric(std::size_t width, std::size_t height, const AugmentConfig& cfg, Rng& rng)
{
    GeometricParams p;
    p.flip = rng.bernoulli(cfg.flip_probability);
    p.scale = rng.uniform(cfg.rescale_min, cfg.rescale_max);
    p.scaled_width = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(width) * p.scale)));
    p.scaled_height =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(height) * p.scale)));

    auto place = [&](std::size_t scaled, std::size_t target) -> long {
        const long s = static_cast<long>(scaled);
        const long t = static_cast<long>(target);
        return s > t ? -rng.uniform_int(0, s - t) : rng.uniform_int(0, t - s);
    };
    p.offset_x = place(p.scaled_width, cfg.target_width);
    p.offset_y = place(p.scaled_height, cfg.target_height);
    return p;
}

Tensor resize_bilinear(const Tensor& input, std::size_t height, std::size_t width)
{
    if (height == 0 || width == 0)
        throw Error("resize: target size must be positive");
    if (height == input.height() && width == input.width())
        return input;
    auto taps = [](std::size_t in, std::size_t out) {
        std::vector<std::pair<std::size_t, double>> t(out);
        const double ratio = static_cast<double>(in) / static_cast<double>(out);
        for (std::size_t o = 0; o < out; ++o) {
            const double src = std::clamp((static_cast<double>(o) + 0.5) * ratio - 0.5, 0.0, static_cast<double>(in - 1));
            const auto lo = static_cast<std::size_t>(std::floor(src));
            t[o] = {lo, src - static_cast<double>(lo)};
        }
        return t;
    };
    const auto ty = taps(input.height(), height);
    const auto tx = taps(input.width(), width);
    const std::size_t last_y = input.height() - 1;
    const std::size_t last_x = input.width() - 1;
    Tensor out(input.channels(), height, width);
    for (std::size_t c = 0; c < input.channels(); ++c) {
        for (std::size_t y = 0; y < height; ++y) {
            const auto [y0, fy] = ty[y];
            const std::size_t y1 = std::min(y0 + 1, last_y);
            for (std::size_t x = 0; x < width; ++x) {
                const auto [x0, fx] = tx[x];
                const std::size_t x1 = std::min(x0 + 1, last_x);
                const double top = input(c, y0, x0) * (1.0 - fx) + input(c, y0, x1) * fx;
                const double bottom = input(c, y1, x0) * (1.0 - fx) + input(c, y1, x1) * fx;
                out(c, y, x) = std::clamp(top * (1.0 - fy) + bottom * fy, 0.0, 1.0);
            }
        }
    }
    return out;
}

namespace {

Tensor flip_horizontal(const Tensor& input)
{
    Tensor out(input.channels(), input.height(), input.width());
    const std::size_t w = input.width();
    for (std::size_t c = 0; c < input.channels(); ++c)
        for (std::size_t y = 0; y < input.height(); ++y)
            for (std::size_t x = 0; x < w; ++x)
                out(c, y, x) = input(c, y, w - 1 - x);
    return out;
}

Tensor place_on_canvas(const Tensor& scaled, long offset_x, long offset_y, std::size_t height, std::size_t width)
{
    Tensor out(scaled.channels(), height, width);
    for (std::size_t c = 0; c < scaled.channels(); ++c) {
        for (std::size_t y = 0; y < height; ++y) {
            const long sy = static_cast<long>(y) - offset_y;
            if (sy < 0 || sy >= static_cast<long>(scaled.height()))
                continue;
            for (std::size_t x = 0; x < width; ++x) {
                const long sx = static_cast<long>(x) - offset_x;
                if (sx < 0 || sx >= static_cast<long>(scaled.width()))
                    continue;
                out(c, y, x) = scaled(c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
            }
        }
    }
    return out;
}

Tensor transform_image(const Tensor& img, const GeometricParams& p, const AugmentConfig& cfg)
{
    const Tensor flipped = p.flip ? flip_horizontal(img) : img;
    const Tensor scaled = resize_bilinear(flipped, p.scaled_height, p.scaled_width);
    return place_on_canvas(scaled, p.offset_x, p.offset_y, cfg.target_height, cfg.target_width);
}

ParamRecord geometric_record(const GeometricParams& p, const char* modality)
{
    return {"geometric",
            modality,
            true,
            {{"flip", p.flip ? 1.0 : 0.0},
             {"scale", p.scale},
             {"scaled_w", static_cast<double>(p.scaled_width)},
             {"scaled_h", static_cast<double>(p.scaled_height)},
             {"offset_x", static_cast<double>(p.offset_x)},
             {"offset_y", static_cast<double>(p.offset_y)}}};
}

} // namespace

BBox transform_box(const BBox& box, const GeometricParams& params, std::size_t src_width, std::size_t src_height)
{
    const double sx = static_cast<double>(params.scaled_width) / static_cast<double>(src_width);
    const double sy = static_cast<double>(params.scaled_height) / static_cast<double>(src_height);
    const double x = params.flip ? static_cast<double>(src_width) - box.right() : box.x;
    return BBox{x * sx + static_cast<double>(params.offset_x), box.y * sy + static_cast<double>(params.offset_y),
                box.w * sx, box.h * sy};
}

ImagePair apply_geometric(const ImagePair& pair, const GeometricParams& params, const AugmentConfig& cfg)
{
    pair.validate();
    ImagePair out;
    out.vis = transform_image(pair.vis, params, cfg);
    out.ir = transform_image(pair.ir, params, cfg);

    const double frame_w = static_cast<double>(cfg.target_width);
    const double frame_h = static_cast<double>(cfg.target_height);
    for (const auto& ann : pair.annotations) {
        const BBox t = transform_box(ann.box, params, pair.vis.width(), pair.vis.height());
        const double left = std::max(0.0, t.x);
        const double top = std::max(0.0, t.y);
        const double right = std::min(frame_w, t.right());
        const double bottom = std::min(frame_h, t.bottom());
        if (right - left <= 0.0 || bottom - top < 2.0)
            continue;
        const bool clipped = left != t.x || top != t.y || right != t.right() || bottom != t.bottom();
        out.annotations.push_back(
            {clipped ? BBox{left, top, right - left, bottom - top} : t, ann.label, ann.occlusion});
    }
    return out;
}

ImagePair geometric_augment(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log)
{
    cfg.validate();
    pair.validate();
    const GeometricParams p = draw_geometric(pair.vis.width(), pair.vis.height(), cfg, rng);
    if (log) {
        log->push_back(geometric_record(p, "vis"));
        log->push_back(geometric_record(p, "ir"));
    }
    return apply_geometric(pair, p, cfg);
}

// ------------------------------------------------------------------ erasing

namespace {

struct Rect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t w = 0;
    std::size_t h = 0;
};

// One Random Erasing draw: Bernoulli, then up to 100 attempts at a rectangle.
std::optional<Rect> draw_erase_rect(std::size_t width, std::size_t height, const EraseConfig& cfg, Rng& rng)
{
    if (!rng.bernoulli(cfg.probability))
        return std::nullopt;
    const double area = static_cast<double>(width * height);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double target = rng.uniform(cfg.area_min, cfg.area_max) * area;
        const double aspect = rng.uniform(cfg.aspect_min, cfg.aspect_max);
        const auto h = static_cast<std::size_t>(std::lround(std::sqrt(target * aspect)));
        const auto w = static_cast<std::size_t>(std::lround(std::sqrt(target / aspect)));
        if (w == 0 || h == 0 || w >= width || h >= height)
            continue;
        Rect r;
        r.y = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(height - h)));
        r.x = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(width - w)));
        r.w = w;
        r.h = h;
        return r;
    }
    return std::nullopt;
}

void erase(Tensor& img, const Rect& r, Rng& rng)
{
    for (std::size_t c = 0; c < img.channels(); ++c)
        for (std::size_t y = r.y; y < r.y + r.h; ++y)
            for (std::size_t x = r.x; x < r.x + r.w; ++x)
                img(c, y, x) = rng.uniform();
}

ParamRecord erase_record(const std::optional<Rect>& r, const char* modality)
{
    ParamRecord rec{"erasing", modality, r.has_value(), {}};
    if (r)
        rec.values = {{"x", static_cast<double>(r->x)},
                      {"y", static_cast<double>(r->y)},
                      {"w", static_cast<double>(r->w)},
                      {"h", static_cast<double>(r->h)}};
    return rec;
}

} // namespace

ImagePair random_erasing(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log)
{
    cfg.validate();
    pair.validate();
    ImagePair out = pair;
    const std::size_t w = pair.vis.width();
    const std::size_t h = pair.vis.height();

    std::optional<Rect> vis_rect;
    std::optional<Rect> ir_rect;
    if (cfg.erase.mode == SyncMode::sync) {
        vis_rect = draw_erase_rect(w, h, cfg.erase, rng);
        ir_rect = vis_rect;
        if (vis_rect) {
            erase(out.vis, *vis_rect, rng);
            erase(out.ir, *ir_rect, rng);
        }
    } else {
        vis_rect = draw_erase_rect(w, h, cfg.erase, rng);
        if (vis_rect)
            erase(out.vis, *vis_rect, rng);
        ir_rect = draw_erase_rect(w, h, cfg.erase, rng);
        if (ir_rect)
            erase(out.ir, *ir_rect, rng);
    }
    if (log) {
        log->push_back(erase_record(vis_rect, "vis"));
        log->push_back(erase_record(ir_rect, "ir"));
    }
    return out;
}

// ------------------------------------------------------------------ masking

ImagePair random_masking(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log)
{
    cfg.validate();
    pair.validate();
    ImagePair out = pair;
    const char* target = "none";
    if (rng.bernoulli(cfg.mask.probability)) {
        if (rng.bernoulli(cfg.mask.split_vis)) {
            std::fill(out.vis.values().begin(), out.vis.values().end(), 0.0);
            target = "vis";
        } else {
            std::fill(out.ir.values().begin(), out.ir.values().end(), 0.0);
            target = "ir";
        }
    }
    if (log)
        log->push_back({"masking", target, std::string_view(target) != "none", {}});
    return out;
}

// -------------------------------------------------------------------- noise

void salt_and_pepper(Tensor& image, double fraction, Rng& rng)
{
    const std::size_t pixels = image.plane_size();
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pixels)));
    std::vector<std::size_t> idx(pixels);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates: the first `count` entries become a uniform sample
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.uniform_index(pixels - i);
        std::swap(idx[i], idx[j]);
        const double v = rng.bernoulli(0.5) ? 1.0 : 0.0;
        for (std::size_t c = 0; c < image.channels(); ++c)
            image.channel(c)[idx[i]] = v;
    }
}

namespace {

void apply_noise(Tensor& img, NoiseModel model, const NoiseConfig& cfg, Rng& rng)
{
    switch (model) {
    case NoiseModel::none:
        return;
    case NoiseModel::gaussian:
        for (auto& v : img.values())
            v = std::clamp(v + cfg.gaussian_sigma * rng.normal(), 0.0, 1.0);
        return;
    case NoiseModel::poisson:
        for (auto& v : img.values())
            v = std::clamp(static_cast<double>(rng.poisson(v * cfg.poisson_peak)) / cfg.poisson_peak, 0.0, 1.0);
        return;
    case NoiseModel::salt_pepper:
        salt_and_pepper(img, cfg.sp_fraction, rng);
        return;
    }
}

} // namespace

ImagePair inject_noise(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log)
{
    cfg.validate();
    pair.validate();
    const NoiseConfig& nc = cfg.noise;
    ImagePair out = pair;

    bool vis_on = false;
    bool ir_on = false;
    if (nc.mode == SyncMode::sync) {
        const bool on = rng.bernoulli(nc.probability);
        vis_on = on && nc.vis_model != NoiseModel::none;
        ir_on = on && nc.ir_model != NoiseModel::none;
    } else {
        vis_on = nc.vis_model != NoiseModel::none && rng.bernoulli(nc.probability);
        ir_on = nc.ir_model != NoiseModel::none && rng.bernoulli(nc.probability);
    }
    if (vis_on)
        apply_noise(out.vis, nc.vis_model, nc, rng);
    if (ir_on)
        apply_noise(out.ir, nc.ir_model, nc, rng);
    if (log) {
        log->push_back({"noise", "vis", vis_on, {{"model", static_cast<double>(nc.vis_model)}}});
        log->push_back({"noise", "ir", ir_on, {{"model", static_cast<double>(nc.ir_model)}}});
    }
    return out;
}

// ----------------------------------------------------------------- pipeline

AugmentStage parse_stage(std::string_view name)
{
    if (name == "geometric")
        return {StageKind::geometric, std::nullopt};
    if (name == "masking")
        return {StageKind::masking, std::nullopt};
    if (name == "erasing")
        return {StageKind::erasing, std::nullopt};
    if (name == "erasing-sync")
        return {StageKind::erasing, SyncMode::sync};
    if (name == "erasing-async")
        return {StageKind::erasing, SyncMode::async};
    if (name == "noise")
        return {StageKind::noise, std::nullopt};
    if (name == "noise-sync")
        return {StageKind::noise, SyncMode::sync};
    if (name == "noise-async")
        return {StageKind::noise, SyncMode::async};
    throw Error("invalid augmentation stage '" + std::string(name) + "'");
}

std::string to_string(const AugmentStage& stage)
{
    std::string base;
    switch (stage.kind) {
    case StageKind::geometric: base = "geometric"; break;
    case StageKind::erasing: base = "erasing"; break;
    case StageKind::masking: base = "masking"; break;
    case StageKind::noise: base = "noise"; break;
    }
    if (stage.mode)
        base += "-" + std::string(to_string(*stage.mode));
    return base;
}

ImagePair apply_pipeline(const ImagePair& pair, const AugmentConfig& cfg, const std::vector<AugmentStage>& stages,
                         const Rng& rng, ParamLog* log)
{
    cfg.validate();
    pair.validate();
    std::vector<AugmentStage> order = stages;
    std::stable_partition(order.begin(), order.end(),
                          [](const AugmentStage& s) { return s.kind == StageKind::geometric; });

    ImagePair cur = pair;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Rng stage_rng = rng.derive(i);
        AugmentConfig stage_cfg = cfg;
        if (order[i].mode) {
            stage_cfg.erase.mode = *order[i].mode;
            stage_cfg.noise.mode = *order[i].mode;
        }
        switch (order[i].kind) {
        case StageKind::geometric: cur = geometric_augment(cur, stage_cfg, stage_rng, log); break;
        case StageKind::erasing: cur = random_erasing(cur, stage_cfg, stage_rng, log); break;
        case StageKind::masking: cur = random_masking(cur, stage_cfg, stage_rng, log); break;
        case StageKind::noise: cur = inject_noise(cur, stage_cfg, stage_rng, log); break;
        }
    }
    return cur;
}

} // namespace mscsp
