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

#include "mscsp/codec.hpp"
#include "mscsp/grid.hpp"

namespace mscsp {

/// Weights and shape parameters of the detection objective. Predictions are
/// probabilities for the center map; a trainer applies its own squashing.
struct LossConfig {
    double focal_gamma = 2.0;
    double negative_beta = 4.0;
    double weight_center = 0.01;
    double weight_scale = 1.0;
    double weight_offset = 0.1;
    double smooth_l1_delta = 1.0;
    double epsilon = 1e-12;

    void validate() const;

    friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

struct LossTerm {
    double value = 0.0;
    Grid gradient;
};

/// Component values are unweighted; gradients are of `total`.
struct LossResult {
    double total = 0.0;
    double center = 0.0;
    double scale = 0.0;
    double offset = 0.0;
    Grid grad_center;
    Grid grad_scale;
    Grid grad_offset_x;
    Grid grad_offset_y;
};

/// Focal binary cross-entropy over the center map, normalized by the number
/// of positives (at least 1). Negatives are down-weighted by (1 - t)^beta
/// where t is the Gaussian target.
LossTerm center_focal_loss(const Grid& pred, const TargetMaps& target, const LossConfig& cfg);

/// Smooth-L1 averaged over masked cells; an empty mask gives 0.
LossTerm smooth_l1(const Grid& pred, const Grid& target, const Mask& mask, double delta);

/// Weighted sum of the center, scale and offset terms. The offset term sums
/// the x and y smooth-L1 averages.
LossResult total_loss(const TargetMaps& pred, const TargetMaps& target, const LossConfig& cfg);

} // namespace mscsp
