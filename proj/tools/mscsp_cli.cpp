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


// Batch command-line front end: encode, decode, simulate, augment, evaluate,
// fuse-annotations, plot.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mscsp/annotation_io.hpp"
#include "mscsp/augment.hpp"
#include "mscsp/codec.hpp"
#include "mscsp/config.hpp"
#include "mscsp/evaluator.hpp"
#include "mscsp/fusion.hpp"
#include "mscsp/image_io.hpp"
#include "mscsp/map_dump.hpp"
#include "mscsp/plot.hpp"

namespace fs = std::filesystem;
using namespace mscsp;

namespace {

RunConfig config_or_default(const std::string& path)
{
    return path.empty() ? RunConfig{} : load_config(path);
}

/// "HxW", e.g. 384x480.
ImageSize parse_size(const std::string& text)
{
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw Error("size '" + text + "' must look like HEIGHTxWIDTH");
    try {
        std::size_t used_h = 0;
        std::size_t used_w = 0;
        const auto h = std::stoul(text.substr(0, x), &used_h);
        const auto w = std::stoul(text.substr(x + 1), &used_w);
        if (used_h != x || used_w != text.size() - x - 1 || h == 0 || w == 0)
            throw Error("");
        return ImageSize{w, h};
    } catch (const std::exception&) {
        throw Error("size '" + text + "' must look like HEIGHTxWIDTH");
    }
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << text;
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_file(out_path, text);
}

// ------------------------------------------------------------------ encode

struct EncodeArgs {
    std::string ann;
    std::string size;
    std::string config;
    std::string out;
};

int run_encode(const EncodeArgs& a)
{
    const RunConfig cfg = config_or_default(a.config);
    const ImageSize size = a.size.empty() ? cfg.input : parse_size(a.size);
    const auto file = read_annotation_file(a.ann);
    const TargetMaps maps = encode_targets(file.annotations, size, cfg.codec);
    save_map_dump(a.out, maps);
    std::size_t positives = 0;
    for (const auto m : maps.positive_mask.values())
        positives += m;
    std::cout << "maps: " << maps.rows() << "x" << maps.cols() << ", positives: " << positives << "\n";
    return 0;
}

// ------------------------------------------------------------------ decode

struct DecodeArgs {
    std::string maps;
    std::string frame;
    std::string config;
    std::string out;
};

int run_decode(const DecodeArgs& a)
{
    const RunConfig cfg = config_or_default(a.config);
    const TargetMaps maps = load_map_dump(a.maps);
    const auto stride = static_cast<std::size_t>(cfg.codec.stride);
    const ImageSize size{maps.cols() * stride, maps.rows() * stride};
    FrameDetections dets;
    dets[a.frame.empty() ? fs::path(a.maps).stem().string() : a.frame] = decode_detections(maps, size, cfg.codec);
    emit(a.out, format_detections(dets));
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string topology;
    std::string input = "64x80";
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

Tensor random_image(std::size_t channels, const ImageSize& size, Rng& rng)
{
    Tensor t(channels, size.height, size.width);
    for (auto& v : t.values())
        v = rng.uniform();
    return t;
}

int run_simulate(const SimulateArgs& a)
{
    const RunConfig cfg = config_or_default(a.config);
    const auto topo = parse_topology(a.topology);
    if (!topo)
        throw Error("unknown topology '" + a.topology + "'");
    const ImageSize size = parse_size(a.input);
    const std::uint64_t seed = a.seed.value_or(cfg.seed);

    const FusionGraph graph = build_fusion_graph(*topo, cfg.backbone, seed);
    Rng input_rng = Rng(seed).derive(1);
    const Tensor vis = random_image(3, size, input_rng);
    const Tensor ir = random_image(1, size, input_rng);
    const ForwardResult result = forward_traced(graph, vis, ir);

    std::ostringstream os;
    os << summarize(graph);
    os << "input: " << size.height << "x" << size.width << "\n";
    os << "activations:\n";
    for (const auto& t : result.trace)
        os << "  " << t.name << ": " << t.channels << "x" << t.height << "x" << t.width << "\n";
    os << "head maps: " << result.maps.rows() << "x" << result.maps.cols() << "\n";
    double mean = 0.0;
    for (const double v : result.maps.center.values())
        mean += v;
    mean /= static_cast<double>(result.maps.center.size());
    os << "center mean: " << format_number(mean) << "\n";
    emit(a.out, os.str());
    return 0;
}

// ----------------------------------------------------------------- augment

struct AugmentArgs {
    std::string input;
    std::string out;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string stages;
    std::string dump_params;
};

int run_augment(const AugmentArgs& a)
{
    RunConfig cfg = config_or_default(a.config);
    if (!a.stages.empty()) {
        cfg.stages.clear();
        std::istringstream is(a.stages);
        for (std::string tok; std::getline(is, tok, ',');)
            cfg.stages.push_back(parse_stage(tok));
    }
    const std::uint64_t seed = a.seed.value_or(cfg.seed);
    const fs::path in_dir(a.input);
    const fs::path out_dir(a.out);

    std::vector<std::string> stems;
    if (!fs::is_directory(in_dir / "vis"))
        throw Error("'" + (in_dir / "vis").string() + "' is not a directory");
    for (const auto& e : fs::directory_iterator(in_dir / "vis"))
        if (e.is_regular_file() && e.path().extension() == ".ppm")
            stems.push_back(e.path().stem().string());
    std::sort(stems.begin(), stems.end());
    for (const auto& s : stems)
        if (!fs::exists(in_dir / "ir" / (s + ".pgm")))
            throw Error("frame '" + s + "' has no IR image");

    fs::create_directories(out_dir / "vis");
    fs::create_directories(out_dir / "ir");
    fs::create_directories(out_dir / "ann");

    const Rng master(seed);
    std::vector<std::string> audit(stems.size());
    std::vector<std::string> errors(stems.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < stems.size(); i = next++) {
            try {
                const auto& s = stems[i];
                ImagePair pair;
                pair.vis = read_pnm(in_dir / "vis" / (s + ".ppm"));
                pair.ir = read_pnm(in_dir / "ir" / (s + ".pgm"));
                if (const auto ann = in_dir / "ann" / (s + ".txt"); fs::exists(ann))
                    pair.annotations = read_annotation_file(ann).annotations;
                ParamLog log;
                const ImagePair out = apply_pipeline(pair, cfg.augment, cfg.stages, master.derive(i), &log);
                write_pnm(out_dir / "vis" / (s + ".ppm"), out.vis);
                write_pnm(out_dir / "ir" / (s + ".pgm"), out.ir);
                write_annotation_file(out_dir / "ann" / (s + ".txt"), out.annotations);
                audit[i] = s + " " + format_params(log);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (!e.empty())
            throw Error(e);

    if (!a.dump_params.empty()) {
        std::string text;
        for (const auto& line : audit)
            text += line + "\n";
        write_file(a.dump_params, text);
    }
    std::cout << "augmented " << stems.size() << " pairs\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string dets;
    std::string ann;
    std::vector<std::string> subsets;
    std::string config;
    std::string curves;
    std::string out;
};

std::string curve_file_name(const std::string& name)
{
    std::string out;
    for (const char c : name)
        out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
    return out + ".csv";
}

int run_evaluate(const EvaluateArgs& a)
{
    RunConfig cfg = config_or_default(a.config);
    if (!a.subsets.empty()) {
        cfg.subsets.clear();
        for (const auto& s : a.subsets)
            cfg.subsets.push_back(parse_subset(s));
    }
    const FrameDetections dets = read_detection_file(a.dets);
    const FrameAnnotations gts = read_annotation_dir(a.ann);
    const EvalReport report = evaluate(dets, gts, cfg.subsets, cfg.size_bins, cfg.occlusion_bins, cfg.match);
    emit(a.out, format_report(report));

    if (!a.curves.empty()) {
        const fs::path dir(a.curves);
        fs::create_directories(dir);
        for (const auto* group : {&report.subsets, &report.size_bins, &report.occlusion_bins})
            for (const auto& r : *group)
                if (r.log_average_mr)
                    write_file(dir / curve_file_name(r.name), format_curve_csv(r.curve));
    }
    return 0;
}

// -------------------------------------------------------- fuse-annotations

struct FuseArgs {
    std::string vis;
    std::string ir;
    std::string out;
};

int run_fuse(const FuseArgs& a)
{
    const FrameAnnotations fused = fuse_annotation_dirs(a.vis, a.ir);
    write_annotation_dir(a.out, fused);
    std::cout << "fused " << fused.size() << " frames\n";
    return 0;
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
    std::vector<std::string> curves;
    std::string title;
    std::string out;
};

int run_plot(const PlotArgs& a)
{
    std::vector<NamedCurve> curves;
    for (const auto& spec : a.curves) {
        const auto eq = spec.find('=');
        const fs::path path = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
        const std::string name = eq == std::string::npos ? path.stem().string() : spec.substr(0, eq);
        curves.push_back({name, read_curve_csv(path)});
    }
    emit(a.out, render_svg_plot(curves, a.title));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Anchor-free multispectral pedestrian detection toolkit"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto* encode = app.add_subcommand("encode", "Annotations -> MSCSP1 target-map dump");
    encode->add_option("--ann", enc.ann, "Annotation file")->required();
    encode->add_option("--size", enc.size, "Image size HEIGHTxWIDTH (default: config input size)");
    encode->add_option("--config", enc.config, "Run configuration file");
    encode->add_option("--out", enc.out, "Output map dump")->required();

    DecodeArgs dec;
    auto* decode = app.add_subcommand("decode", "MSCSP1 map dump -> detection file");
    decode->add_option("--maps", dec.maps, "Map dump")->required();
    decode->add_option("--frame", dec.frame, "Frame id (default: dump file stem)");
    decode->add_option("--config", dec.config, "Run configuration file");
    decode->add_option("--out", dec.out, "Output detection file (default: stdout)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Forward pass of a fusion topology with random weights");
    simulate->add_option("--topology", sim.topology, "input-fusion, late-fusion-baseline, sparse-fusion, "
                                                     "halfway-fusion, late-fusion, vis-only, ir-only")
        ->required();
    simulate->add_option("--input", sim.input, "Input size HEIGHTxWIDTH");
    simulate->add_option("--seed", sim.seed, "Initialization seed (default: config seed)");
    simulate->add_option("--config", sim.config, "Run configuration file");
    simulate->add_option("--out", sim.out, "Report file (default: stdout)");

    AugmentArgs aug;
    auto* augment = app.add_subcommand("augment", "Augment a directory of VIS/IR pairs");
    augment->add_option("--input", aug.input, "Directory with vis/*.ppm, ir/*.pgm, optional ann/*.txt")->required();
    augment->add_option("--out", aug.out, "Output directory")->required();
    augment->add_option("--config", aug.config, "Run configuration file");
    augment->add_option("--seed", aug.seed, "Master seed (default: config seed)");
    augment->add_option("--stages", aug.stages, "Comma-separated stage list (default: config)");
    augment->add_option("--dump-params", aug.dump_params, "Write drawn parameters, one line per image");

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Log-average miss rate of detections");
    evaluate_cmd->add_option("--dets", ev.dets, "Detection file")->required();
    evaluate_cmd->add_option("--ann", ev.ann, "Annotation directory")->required();
    evaluate_cmd->add_option("--subset", ev.subsets, "reasonable, all, or name:min:max:occ|occ (repeatable)");
    evaluate_cmd->add_option("--config", ev.config, "Run configuration file");
    evaluate_cmd->add_option("--curves", ev.curves, "Directory for per-subset CSV curves");
    evaluate_cmd->add_option("--out", ev.out, "Report file (default: stdout)");

    FuseArgs fu;
    auto* fuse = app.add_subcommand("fuse-annotations", "Union paired VIS/IR annotations");
    fuse->add_option("--vis", fu.vis, "VIS annotation directory")->required();
    fuse->add_option("--ir", fu.ir, "IR annotation directory")->required();
    fuse->add_option("--out", fu.out, "Output directory")->required();

    PlotArgs pl;
    auto* plot = app.add_subcommand("plot", "Render MR-FPPI curves as SVG");
    plot->add_option("--curve", pl.curves, "NAME=curve.csv (repeatable)")->required();
    plot->add_option("--title", pl.title, "Figure title");
    plot->add_option("--out", pl.out, "Output SVG (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*encode)
            return run_encode(enc);
        if (*decode)
            return run_decode(dec);
        if (*simulate)
            return run_simulate(sim);
        if (*augment)
            return run_augment(aug);
        if (*evaluate_cmd)
            return run_evaluate(ev);
        if (*fuse)
            return run_fuse(fu);
        if (*plot)
            return run_plot(pl);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: " << msg << "\n";
        return 1;
    }
    return 1;
}
