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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mscsp/geometry.hpp"
#include "mscsp/rng.hpp"
#include "mscsp/tensor.hpp"

namespace mscsp {

/// Aligned VIS (3 channels) and IR (1 channel) images with values in [0,1],
/// sharing one annotation list.
struct ImagePair {
    Tensor vis;
    Tensor ir;
    std::vector<Annotation> annotations;

    void validate() const;

    friend bool operator==(const ImagePair&, const ImagePair&) = default;
};

enum class SyncMode { sync, async };
enum class NoiseModel { none, gaussian, poisson, salt_pepper };

std::string_view to_string(SyncMode mode) noexcept;
std::string_view to_string(NoiseModel model) noexcept;
SyncMode parse_sync_mode(std::string_view text);
/// Throws on unknown names.
NoiseModel parse_noise_model(std::string_view text);

struct EraseConfig {
    double probability = 0.5;
    double area_min = 0.02;
    double area_max = 0.4;
    double aspect_min = 0.3;
    double aspect_max = 1.0 / 0.3;
    SyncMode mode = SyncMode::sync;

    friend bool operator==(const EraseConfig&, const EraseConfig&) = default;
};

struct MaskConfig {
    double probability = 0.5;
    /// Share of masking events that blank VIS rather than IR.
    double split_vis = 0.5;

    friend bool operator==(const MaskConfig&, const MaskConfig&) = default;
};

struct NoiseConfig {
    double probability = 0.2;
    NoiseModel vis_model = NoiseModel::gaussian;
    NoiseModel ir_model = NoiseModel::poisson;
    SyncMode mode = SyncMode::async;
    double gaussian_sigma = 0.05;
    double poisson_peak = 30.0;
    double sp_fraction = 0.02;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct AugmentConfig {
    std::size_t target_height = 384;
    std::size_t target_width = 480;
    EraseConfig erase;
    MaskConfig mask;
    NoiseConfig noise;
    double flip_probability = 0.5;
    double rescale_min = 0.4;
    double rescale_max = 1.5;

    void validate() const;

    friend bool operator==(const AugmentConfig&, const AugmentConfig&) = default;
};

/// One drawn parameter set, for audit logs and alignment checks.
struct ParamRecord {
    std::string stage;
    std::string modality;
    bool applied = false;
    std::vector<std::pair<std::string, double>> values;

    /// Throws when `key` is absent.
    double get(std::string_view key) const;

    friend bool operator==(const ParamRecord&, const ParamRecord&) = default;
};

using ParamLog = std::vector<ParamRecord>;

/// Single-line rendering of a log, `stage/modality:key=value,...` separated by spaces.
std::string format_params(const ParamLog& log);

/// Shared geometric transform. `offset_x/y` place the rescaled image's origin
/// in the output frame: negative values crop, positive values pave.
struct GeometricParams {
    bool flip = false;
    double scale = 1.0;
    std::size_t scaled_width = 0;
    std::size_t scaled_height = 0;
    long offset_x = 0;
    long offset_y = 0;

    friend bool operator==(const GeometricParams&, const GeometricParams&) = default;
};

GeometricParams draw_geometric(std::size_t width, std::size_t height, const AugmentConfig& cfg, Rng& rng);

/// Applies `params` to both modalities and every box. Boxes are clipped to the
/// frame and dropped when fewer than 2 px tall remain.
ImagePair apply_geometric(const ImagePair& pair, const GeometricParams& params, const AugmentConfig& cfg);

/// The unclipped image of `box` under `params` for a source of width `src_width`.
BBox transform_box(const BBox& box, const GeometricParams& params, std::size_t src_width, std::size_t src_height);

Tensor resize_bilinear(const Tensor& input, std::size_t height, std::size_t width);

ImagePair geometric_augment(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log = nullptr);
ImagePair random_erasing(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log = nullptr);
ImagePair random_masking(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log = nullptr);
ImagePair inject_noise(const ImagePair& pair, const AugmentConfig& cfg, Rng& rng, ParamLog* log = nullptr);

/// Sets exactly round(fraction * H * W) distinct pixel locations to 0 or 1.
void salt_and_pepper(Tensor& image, double fraction, Rng& rng);

enum class StageKind { geometric, erasing, masking, noise };

struct AugmentStage {
    StageKind kind = StageKind::geometric;
    /// Overrides the configured sync mode for erasing/noise stages.
    std::optional<SyncMode> mode;

    friend bool operator==(const AugmentStage&, const AugmentStage&) = default;
};

/// Accepts geometric, erasing, erasing-sync, erasing-async, masking, noise,
/// noise-sync, noise-async.
AugmentStage parse_stage(std::string_view name);
std::string to_string(const AugmentStage& stage);

/// Runs `stages` in order, with geometric moved to the front. Stage i draws
/// from `rng.derive(i)`, so appending a stage never changes earlier draws.
ImagePair apply_pipeline(const ImagePair& pair, const AugmentConfig& cfg, const std::vector<AugmentStage>& stages,
                         const Rng& rng, ParamLog* log = nullptr);

} // namespace mscsp
