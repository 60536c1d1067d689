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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mscsp/codec.hpp"
#include "mscsp/tensor.hpp"

namespace mscsp {

enum class Topology { InputFusion, LateFusionBaseline, SparseFusion, HalfwayFusion, LateFusion, VisOnly, IrOnly };

inline constexpr Topology kAllTopologies[] = {
    Topology::InputFusion, Topology::LateFusionBaseline, Topology::SparseFusion, Topology::HalfwayFusion,
    Topology::LateFusion,  Topology::VisOnly,            Topology::IrOnly,
};

/// CLI spelling, e.g. "late-fusion".
std::string_view to_string(Topology topology) noexcept;
std::optional<Topology> parse_topology(std::string_view name) noexcept;

struct StageSpec {
    std::size_t out_channels = 0;
    int stride = 1;

    friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

/// Five 3x3 convolution stages. Stages 3..5 feed the detection head and must
/// sit at cumulative strides 8, 16, 16.
struct BackboneSpec {
    std::vector<StageSpec> stages{{8, 2}, {16, 2}, {32, 2}, {64, 2}, {64, 1}};
    std::size_t head_channels = 32;

    void validate() const;
    std::vector<int> cumulative_strides() const;

    friend bool operator==(const BackboneSpec&, const BackboneSpec&) = default;
};

inline constexpr std::size_t kStageCount = 5;
inline constexpr std::size_t kFirstHeadStage = 2; // zero-based index of stage 3
inline constexpr int kOutputStride = 4;

/// Fixed bilinear upsampling followed by L2 normalization with a learnable
/// per-channel scale.
struct DeconvBlock {
    int factor = 2;
    std::vector<double> scale;
};

struct DetectionHead {
    ConvLayer feature;   // 3x3 over the concatenated upsampled maps
    ConvLayer center;    // 1x1 -> 1
    ConvLayer scale;     // 1x1 -> 1
    ConvLayer offset;    // 1x1 -> 2
};

/// Weights and wiring of one fusion topology.
///
/// `vis` and `ir` hold per-modality stages; for HalfwayFusion they stop after
/// stage 3 and `shared` holds stages 4 and 5. `fusion_blocks` holds one NiN
/// block per fused level. `deconv` is in head-concatenation order.
struct FusionGraph {
    Topology topology = Topology::VisOnly;
    BackboneSpec spec;
    std::uint64_t seed = 0;
    std::vector<ConvLayer> vis;
    std::vector<ConvLayer> ir;
    std::vector<ConvLayer> shared;
    std::vector<ConvLayer> fusion_blocks;
    std::vector<DeconvBlock> deconv;
    DetectionHead head;

    std::size_t backbone_count() const noexcept;
    std::size_t head_input_channels() const noexcept { return head.feature.in_channels; }
};

/// Deterministic graph construction: weights uniform in +-1/sqrt(fan_in),
/// biases zero, L2 scales 10.
FusionGraph build_fusion_graph(Topology topology, const BackboneSpec& spec, std::uint64_t seed);

struct ForwardOptions {
    /// SparseFusion only: run the VIS stream without the IR additions.
    bool skip_ir_contribution = false;
};

struct TraceEntry {
    std::string name;
    std::size_t channels;
    std::size_t height;
    std::size_t width;
};

struct ForwardResult {
    TargetMaps maps;
    std::vector<TraceEntry> trace;
};

/// `vis` has 3 channels; `ir` has 1 (replicated to 3) or 3 channels. Both must
/// share spatial dimensions divisible by the backbone's final stride.
TargetMaps forward(const FusionGraph& graph, const Tensor& vis, const Tensor& ir, const ForwardOptions& opts = {});
ForwardResult forward_traced(const FusionGraph& graph, const Tensor& vis, const Tensor& ir,
                             const ForwardOptions& opts = {});

std::size_t param_count(const FusionGraph& graph) noexcept;

/// Plain-text per-layer summary with the total parameter count.
std::string summarize(const FusionGraph& graph);

} // namespace mscsp
