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


#include "mscsp/loss.hpp"

#include <algorithm>
#include <cmath>

namespace mscsp {

void LossConfig::validate() const
{
    if (focal_gamma < 0.0 || negative_beta < 0.0 || weight_center < 0.0 || weight_scale < 0.0 ||
        weight_offset < 0.0 || smooth_l1_delta < 0.0)
        throw Error("loss: configuration values must be non-negative");
    if (!(epsilon > 0.0))
        throw Error("loss: epsilon must be positive");
}

LossTerm center_focal_loss(const Grid& pred, const TargetMaps& target, const LossConfig& cfg)
{
    cfg.validate();
    require_same_shape(pred, target.center, "center_focal_loss");
    require_same_shape(pred, target.positive_mask, "center_focal_loss mask");

    std::size_t positives = 0;
    for (const auto m : target.positive_mask.values())
        positives += m != 0;
    const double norm = 1.0 / static_cast<double>(std::max<std::size_t>(1, positives));
    const double gamma = cfg.focal_gamma;
    const double lo = cfg.epsilon;
    const double hi = 1.0 - cfg.epsilon;

    LossTerm out{0.0, Grid(pred.rows(), pred.cols())};
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double raw = pred[i];
        const double p = std::clamp(raw, lo, hi);
        const bool clamped = p != raw;
        double value = 0.0;
        double grad = 0.0;
        if (target.positive_mask[i]) {
            const double q = 1.0 - p;
            const double lp = std::log(p);
            value = -std::pow(q, gamma) * lp;
            grad = gamma * std::pow(q, gamma - 1.0) * lp - std::pow(q, gamma) / p;
        } else {
            const double w = std::pow(1.0 - target.center[i], cfg.negative_beta);
            const double lq = std::log(1.0 - p);
            value = -w * std::pow(p, gamma) * lq;
            grad = -w * (gamma * std::pow(p, gamma - 1.0) * lq - std::pow(p, gamma) / (1.0 - p));
        }
        sum += value;
        out.gradient[i] = clamped ? 0.0 : grad * norm;
    }
    out.value = sum * norm;
    return out;
}

LossTerm smooth_l1(const Grid& pred, const Grid& target, const Mask& mask, double delta)
{
    require_same_shape(pred, target, "smooth_l1");
    require_same_shape(pred, mask, "smooth_l1 mask");
    if (!(delta > 0.0))
        throw Error("smooth_l1: delta must be positive");

    std::size_t count = 0;
    for (const auto m : mask.values())
        count += m != 0;
    LossTerm out{0.0, Grid(pred.rows(), pred.cols())};
    if (count == 0)
        return out;

    const double norm = 1.0 / static_cast<double>(count);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!mask[i])
            continue;
        const double d = pred[i] - target[i];
        const double ad = std::abs(d);
        if (ad < delta) {
            sum += 0.5 * d * d / delta;
            out.gradient[i] = d / delta * norm;
        } else {
            sum += ad - 0.5 * delta;
            out.gradient[i] = (d > 0.0 ? 1.0 : -1.0) * norm;
        }
    }
    out.value = sum * norm;
    return out;
}

namespace {

Grid scaled(const Grid& g, double factor)
{
    Grid out = g;
    for (auto& v : out.values())
        v *= factor;
    return out;
}

} // namespace

LossResult total_loss(const TargetMaps& pred, const TargetMaps& target, const LossConfig& cfg)
{
    pred.check_consistent();
    target.check_consistent();
    require_same_shape(pred.center, target.center, "total_loss");

    const LossTerm center = center_focal_loss(pred.center, target, cfg);
    const LossTerm scale = smooth_l1(pred.scale, target.scale, target.positive_mask, cfg.smooth_l1_delta);
    const LossTerm off_x = smooth_l1(pred.offset_x, target.offset_x, target.positive_mask, cfg.smooth_l1_delta);
    const LossTerm off_y = smooth_l1(pred.offset_y, target.offset_y, target.positive_mask, cfg.smooth_l1_delta);

    LossResult r;
    r.center = center.value;
    r.scale = scale.value;
    r.offset = off_x.value + off_y.value;
    r.total = cfg.weight_center * r.center + cfg.weight_scale * r.scale + cfg.weight_offset * r.offset;
    r.grad_center = scaled(center.gradient, cfg.weight_center);
    r.grad_scale = scaled(scale.gradient, cfg.weight_scale);
    r.grad_offset_x = scaled(off_x.gradient, cfg.weight_offset);
    r.grad_offset_y = scaled(off_y.gradient, cfg.weight_offset);
    return r;
}

} // namespace mscsp
