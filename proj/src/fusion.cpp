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


#include "mscsp/fusion.hpp"

#include <cmath>
#include <sstream>

#include "mscsp/rng.hpp"

namespace mscsp {

std::string_view to_string(Topology topology) noexcept
{
    switch (topology) {
    case Topology::InputFusion: return "input-fusion";
    case Topology::LateFusionBaseline: return "late-fusion-baseline";
    case Topology::SparseFusion: return "sparse-fusion";
    case Topology::HalfwayFusion: return "halfway-fusion";
    case Topology::LateFusion: return "late-fusion";
    case Topology::VisOnly: return "vis-only";
    case Topology::IrOnly: return "ir-only";
    }
    return "?";
}

std::optional<Topology> parse_topology(std::string_view name) noexcept
{
    for (const Topology t : kAllTopologies)
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

void BackboneSpec::validate() const
{
    if (stages.size() != kStageCount)
        throw Error("backbone: exactly 5 stages are required");
    for (const auto& s : stages) {
        if (s.out_channels == 0)
            throw Error("backbone: stage channel counts must be positive");
        if (s.stride != 1 && s.stride != 2)
            throw Error("backbone: stage strides must be 1 or 2");
    }
    if (head_channels == 0)
        throw Error("backbone: head_channels must be positive");
    const auto cum = cumulative_strides();
    if (cum[2] != 8 || cum[3] != 16 || cum[4] != 16)
        throw Error("backbone: cumulative strides of stages 3-5 must be 8, 16, 16");
}

std::vector<int> BackboneSpec::cumulative_strides() const
{
    std::vector<int> out;
    int acc = 1;
    for (const auto& s : stages) {
        acc *= s.stride;
        out.push_back(acc);
    }
    return out;
}

std::size_t FusionGraph::backbone_count() const noexcept
{
    return static_cast<std::size_t>(!vis.empty()) + static_cast<std::size_t>(!ir.empty());
}

namespace {

class Initializer {
public:
    explicit Initializer(std::uint64_t seed) : rng_(seed) {}

    ConvLayer conv(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride = 1)
    {
        ConvLayer layer(in, out, kernel, stride);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in * kernel * kernel));
        for (auto& w : layer.weights)
            w = rng_.uniform(-bound, bound);
        return layer;
    }

    std::vector<ConvLayer> stages(const BackboneSpec& spec, std::size_t first, std::size_t last, std::size_t in)
    {
        std::vector<ConvLayer> out;
        for (std::size_t s = first; s < last; ++s) {
            out.push_back(conv(in, spec.stages[s].out_channels, 3, static_cast<std::size_t>(spec.stages[s].stride)));
            in = spec.stages[s].out_channels;
        }
        return out;
    }

private:
    Rng rng_;
};

std::size_t level_channels(const BackboneSpec& spec, std::size_t level)
{
    return spec.stages[kFirstHeadStage + level].out_channels;
}

int level_factor(const BackboneSpec& spec, std::size_t level)
{
    return spec.cumulative_strides()[kFirstHeadStage + level] / kOutputStride;
}

} // namespace

FusionGraph build_fusion_graph(Topology topology, const BackboneSpec& spec, std::uint64_t seed)
{
    spec.validate();
    FusionGraph g;
    g.topology = topology;
    g.spec = spec;
    g.seed = seed;
    Initializer init(seed);
    constexpr std::size_t levels = kStageCount - kFirstHeadStage;

    // (modality-major) list of levels feeding the head, as indices into the spec
    std::vector<std::size_t> head_levels{0, 1, 2};

    switch (topology) {
    case Topology::VisOnly:
        g.vis = init.stages(spec, 0, kStageCount, 3);
        break;
    case Topology::IrOnly:
        g.ir = init.stages(spec, 0, kStageCount, 3);
        break;
    case Topology::InputFusion: {
        const ConvLayer first = init.conv(3, spec.stages[0].out_channels, 3, static_cast<std::size_t>(spec.stages[0].stride));
        g.vis.push_back(clone_input_conv(first));
        auto rest = init.stages(spec, 1, kStageCount, spec.stages[0].out_channels);
        g.vis.insert(g.vis.end(), rest.begin(), rest.end());
        break;
    }
    case Topology::LateFusionBaseline:
        g.vis = init.stages(spec, 0, kStageCount, 3);
        g.ir = init.stages(spec, 0, kStageCount, 3);
        head_levels = {0, 1, 2, 0, 1, 2};
        break;
    case Topology::SparseFusion:
        g.vis = init.stages(spec, 0, kStageCount, 3);
        g.ir = init.stages(spec, 0, kStageCount, 3);
        break;
    case Topology::HalfwayFusion: {
        g.vis = init.stages(spec, 0, kFirstHeadStage + 1, 3);
        g.ir = init.stages(spec, 0, kFirstHeadStage + 1, 3);
        const std::size_t c = level_channels(spec, 0);
        g.fusion_blocks.push_back(init.conv(2 * c, c, 1));
        g.shared = init.stages(spec, kFirstHeadStage + 1, kStageCount, c);
        break;
    }
    case Topology::LateFusion:
        g.vis = init.stages(spec, 0, kStageCount, 3);
        g.ir = init.stages(spec, 0, kStageCount, 3);
        for (std::size_t l = 0; l < levels; ++l) {
            const std::size_t c = level_channels(spec, l);
            g.fusion_blocks.push_back(init.conv(2 * c, c, 1));
        }
        break;
    }

    std::size_t head_in = 0;
    for (const std::size_t l : head_levels) {
        const std::size_t c = level_channels(spec, l);
        g.deconv.push_back({level_factor(spec, l), std::vector<double>(c, 10.0)});
        head_in += c;
    }
    g.head.feature = init.conv(head_in, spec.head_channels, 3);
    g.head.center = init.conv(spec.head_channels, 1, 1);
    g.head.scale = init.conv(spec.head_channels, 1, 1);
    g.head.offset = init.conv(spec.head_channels, 2, 1);
    return g;
}

namespace {

class Runner {
public:
    explicit Runner(std::vector<TraceEntry>* trace) : trace_(trace) {}

    Tensor stage(const Tensor& x, const ConvLayer& layer, const std::string& name)
    {
        return record(relu(conv2d(x, layer)), name);
    }

    Tensor record(Tensor t, const std::string& name)
    {
        if (trace_)
            trace_->push_back({name, t.channels(), t.height(), t.width()});
        return t;
    }

private:
    std::vector<TraceEntry>* trace_;
};

Tensor as_three_channel(const Tensor& ir)
{
    if (ir.channels() == 3)
        return ir;
    if (ir.channels() != 1)
        throw ShapeError("forward: IR input must have 1 or 3 channels");
    Tensor out(3, ir.height(), ir.width());
    for (std::size_t c = 0; c < 3; ++c)
        std::copy(ir.values().begin(), ir.values().end(), out.channel(c).begin());
    return out;
}

void check_input(const Tensor& t, int final_stride, const char* what)
{
    const auto s = static_cast<std::size_t>(final_stride);
    if (t.height() == 0 || t.width() == 0 || t.height() % s != 0 || t.width() % s != 0)
        throw ShapeError(std::string("forward: ") + what + " spatial size must be a positive multiple of " +
                         std::to_string(final_stride));
}

std::string stage_name(const char* branch, std::size_t s)
{
    return std::string(branch) + ".stage" + std::to_string(s + 1);
}

} // namespace

ForwardResult forward_traced(const FusionGraph& graph, const Tensor& vis, const Tensor& ir, const ForwardOptions& opts)
{
    const Topology topo = graph.topology;
    const bool uses_vis = topo != Topology::IrOnly;
    const bool uses_ir = topo != Topology::VisOnly;
    const int final_stride = graph.spec.cumulative_strides().back();
    if (opts.skip_ir_contribution && topo != Topology::SparseFusion)
        throw Error("forward: skip_ir_contribution applies to sparse-fusion only");

    if (uses_vis) {
        check_input(vis, final_stride, "VIS");
        if (vis.channels() != 3)
            throw ShapeError("forward: VIS input must have 3 channels");
    }
    Tensor ir3;
    if (uses_ir) {
        check_input(ir, final_stride, "IR");
        ir3 = as_three_channel(ir);
    }
    if (uses_vis && uses_ir && !vis.same_spatial(ir))
        throw ShapeError("forward: VIS and IR spatial dimensions differ");

    ForwardResult result;
    Runner run(&result.trace);
    std::vector<Tensor> levels;

    auto run_stream = [&](Tensor x, const std::vector<ConvLayer>& stages, const char* branch) {
        std::vector<Tensor> outs;
        for (std::size_t s = 0; s < stages.size(); ++s) {
            x = run.stage(x, stages[s], stage_name(branch, s));
            outs.push_back(x);
        }
        return outs;
    };

    switch (topo) {
    case Topology::VisOnly: {
        auto outs = run_stream(vis, graph.vis, "vis");
        levels.assign(outs.begin() + kFirstHeadStage, outs.end());
        break;
    }
    case Topology::IrOnly: {
        auto outs = run_stream(ir3, graph.ir, "ir");
        levels.assign(outs.begin() + kFirstHeadStage, outs.end());
        break;
    }
    case Topology::InputFusion: {
        auto outs = run_stream(run.record(concat_channels(vis, ir3), "input.stacked"), graph.vis, "fused");
        levels.assign(outs.begin() + kFirstHeadStage, outs.end());
        break;
    }
    case Topology::LateFusionBaseline: {
        auto v = run_stream(vis, graph.vis, "vis");
        auto r = run_stream(ir3, graph.ir, "ir");
        levels.assign(v.begin() + kFirstHeadStage, v.end());
        levels.insert(levels.end(), r.begin() + kFirstHeadStage, r.end());
        break;
    }
    case Topology::SparseFusion: {
        Tensor v = vis;
        Tensor r = ir3;
        for (std::size_t s = 0; s < kStageCount; ++s) {
            v = run.stage(v, graph.vis[s], stage_name("vis", s));
            if (!opts.skip_ir_contribution) {
                r = run.stage(r, graph.ir[s], stage_name("ir", s));
                v = run.record(add(v, r), "add" + std::to_string(s + 1));
            }
            if (s >= kFirstHeadStage)
                levels.push_back(v);
        }
        break;
    }
    case Topology::HalfwayFusion: {
        auto v = run_stream(vis, graph.vis, "vis");
        auto r = run_stream(ir3, graph.ir, "ir");
        Tensor x = run.record(nin_fuse(v.back(), r.back(), graph.fusion_blocks[0]), "fuse3");
        levels.push_back(x);
        for (std::size_t s = 0; s < graph.shared.size(); ++s) {
            x = run.stage(x, graph.shared[s], stage_name("shared", kFirstHeadStage + 1 + s));
            levels.push_back(x);
        }
        break;
    }
    case Topology::LateFusion: {
        auto v = run_stream(vis, graph.vis, "vis");
        auto r = run_stream(ir3, graph.ir, "ir");
        for (std::size_t l = 0; l < graph.fusion_blocks.size(); ++l)
            levels.push_back(run.record(nin_fuse(v[kFirstHeadStage + l], r[kFirstHeadStage + l], graph.fusion_blocks[l]),
                                        "fuse" + std::to_string(kFirstHeadStage + l + 1)));
        break;
    }
    }

    if (levels.size() != graph.deconv.size())
        throw Error("forward: graph wiring is inconsistent");

    Tensor concat;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto& block = graph.deconv[l];
        Tensor up = run.record(l2_normalize(upsample(levels[l], block.factor), block.scale),
                               "deconv" + std::to_string(l + 1));
        concat = concat.empty() ? std::move(up) : concat_channels(concat, up);
    }
    result.trace.push_back({"head.concat", concat.channels(), concat.height(), concat.width()});

    const Tensor feat = run.stage(concat, graph.head.feature, "head.feature");
    const Tensor center = sigmoid(conv2d(feat, graph.head.center));
    const Tensor scale = conv2d(feat, graph.head.scale);
    const Tensor offset = conv2d(feat, graph.head.offset);

    TargetMaps& maps = result.maps;
    maps.center = Grid(center.height(), center.width());
    maps.scale = Grid(center.height(), center.width());
    maps.offset_x = Grid(center.height(), center.width());
    maps.offset_y = Grid(center.height(), center.width());
    std::copy(center.values().begin(), center.values().end(), maps.center.values().begin());
    std::copy(scale.values().begin(), scale.values().end(), maps.scale.values().begin());
    const auto ox = offset.channel(0);
    const auto oy = offset.channel(1);
    std::copy(ox.begin(), ox.end(), maps.offset_x.values().begin());
    std::copy(oy.begin(), oy.end(), maps.offset_y.values().begin());
    return result;
}

TargetMaps forward(const FusionGraph& graph, const Tensor& vis, const Tensor& ir, const ForwardOptions& opts)
{
    return forward_traced(graph, vis, ir, opts).maps;
}

std::size_t param_count(const FusionGraph& graph) noexcept
{
    std::size_t total = 0;
    for (const auto* group : {&graph.vis, &graph.ir, &graph.shared, &graph.fusion_blocks})
        for (const auto& layer : *group)
            total += layer.param_count();
    for (const auto& block : graph.deconv)
        total += block.scale.size();
    total += graph.head.feature.param_count() + graph.head.center.param_count() + graph.head.scale.param_count() +
             graph.head.offset.param_count();
    return total;
}

namespace {

void describe(std::ostringstream& os, const std::string& name, const ConvLayer& layer)
{
    os << "  " << name << ": conv" << layer.kernel << "x" << layer.kernel << " " << layer.in_channels << "->"
       << layer.out_channels << " stride " << layer.stride << ", params " << layer.param_count() << "\n";
}

} // namespace

std::string summarize(const FusionGraph& graph)
{
    std::ostringstream os;
    os << "topology: " << to_string(graph.topology) << "\n";
    os << "seed: " << graph.seed << "\n";
    os << "backbone instances: " << graph.backbone_count() << "\n";
    os << "layers:\n";
    for (std::size_t s = 0; s < graph.vis.size(); ++s)
        describe(os, stage_name(graph.topology == Topology::InputFusion ? "fused" : "vis", s), graph.vis[s]);
    for (std::size_t s = 0; s < graph.ir.size(); ++s)
        describe(os, stage_name("ir", s), graph.ir[s]);
    for (std::size_t s = 0; s < graph.shared.size(); ++s)
        describe(os, stage_name("shared", kFirstHeadStage + 1 + s), graph.shared[s]);
    for (std::size_t b = 0; b < graph.fusion_blocks.size(); ++b)
        describe(os, "nin" + std::to_string(b + 1), graph.fusion_blocks[b]);
    for (std::size_t d = 0; d < graph.deconv.size(); ++d)
        os << "  deconv" << d + 1 << ": bilinear x" << graph.deconv[d].factor << " + l2norm("
           << graph.deconv[d].scale.size() << "), params " << graph.deconv[d].scale.size() << "\n";
    describe(os, "head.feature", graph.head.feature);
    describe(os, "head.center", graph.head.center);
    describe(os, "head.scale", graph.head.scale);
    describe(os, "head.offset", graph.head.offset);
    os << "head input channels: " << graph.head_input_channels() << "\n";
    os << "params: " << param_count(graph) << "\n";
    return os.str();
}

} // namespace mscsp
