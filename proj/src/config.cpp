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


#include "mscsp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mscsp/annotation_io.hpp"

namespace mscsp {

namespace {

// Shortest text that parses back to the same double.
std::string exact_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    if (trim(s).empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view v)
{
    const auto d = parse_number(v);
    if (!d || std::isnan(*d))
        throw Error("expected a number, got '" + std::string(v) + "'");
    return *d;
}

template <typename Int>
Int to_int(std::string_view v)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error("expected an integer, got '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw Error("expected true/false, got '" + std::string(v) + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F render)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ',';
        out += render(items[i]);
    }
    return out;
}

Occlusion parse_occlusion_name(std::string_view v)
{
    for (const auto o : {Occlusion::none, Occlusion::partial, Occlusion::heavy})
        if (to_string(o) == v)
            return o;
    throw Error("unknown occlusion level '" + std::string(v) + "'");
}

struct Key {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <typename Member>
Key real(Member member)
{
    return {[member](const RunConfig& c) { return exact_number(std::invoke(member, c)); },
            [member](RunConfig& c, std::string_view v) { std::invoke(member, c) = to_double(v); }};
}

// clang-format off
#define MSCSP_REAL(path) real([](auto& c) -> auto& { return c.path; })
// clang-format on

template <typename Int, typename Member>
Key integer(Member member)
{
    return {[member](const RunConfig& c) { return std::to_string(std::invoke(member, c)); },
            [member](RunConfig& c, std::string_view v) { std::invoke(member, c) = to_int<Int>(v); }};
}

#define MSCSP_INT(type, path) integer<type>([](auto& c) -> auto& { return c.path; })

const std::map<std::string, Key>& key_table()
{
    static const std::map<std::string, Key> table = {
        {"input.height", MSCSP_INT(std::size_t, input.height)},
        {"input.width", MSCSP_INT(std::size_t, input.width)},
        {"seed", MSCSP_INT(std::uint64_t, seed)},

        {"codec.stride", MSCSP_INT(int, codec.stride)},
        {"codec.confidence_threshold", MSCSP_REAL(codec.confidence_threshold)},
        {"codec.nms_threshold", MSCSP_REAL(codec.nms_threshold)},
        {"codec.aspect_ratio", MSCSP_REAL(codec.aspect_ratio)},
        {"codec.gaussian_sigma_factor", MSCSP_REAL(codec.gaussian_sigma_factor)},
        {"codec.regression_radius", MSCSP_INT(int, codec.regression_radius)},
        {"codec.peak_filter",
         {[](const RunConfig& c) { return std::string(c.codec.peak_filter ? "true" : "false"); },
          [](RunConfig& c, std::string_view v) { c.codec.peak_filter = to_bool(v); }}},

        {"loss.focal_gamma", MSCSP_REAL(loss.focal_gamma)},
        {"loss.negative_beta", MSCSP_REAL(loss.negative_beta)},
        {"loss.weight_center", MSCSP_REAL(loss.weight_center)},
        {"loss.weight_scale", MSCSP_REAL(loss.weight_scale)},
        {"loss.weight_offset", MSCSP_REAL(loss.weight_offset)},
        {"loss.smooth_l1_delta", MSCSP_REAL(loss.smooth_l1_delta)},
        {"loss.epsilon", MSCSP_REAL(loss.epsilon)},

        {"augment.target_height", MSCSP_INT(std::size_t, augment.target_height)},
        {"augment.target_width", MSCSP_INT(std::size_t, augment.target_width)},
        {"augment.flip_probability", MSCSP_REAL(augment.flip_probability)},
        {"augment.rescale_min", MSCSP_REAL(augment.rescale_min)},
        {"augment.rescale_max", MSCSP_REAL(augment.rescale_max)},
        {"augment.erase.probability", MSCSP_REAL(augment.erase.probability)},
        {"augment.erase.area_min", MSCSP_REAL(augment.erase.area_min)},
        {"augment.erase.area_max", MSCSP_REAL(augment.erase.area_max)},
        {"augment.erase.aspect_min", MSCSP_REAL(augment.erase.aspect_min)},
        {"augment.erase.aspect_max", MSCSP_REAL(augment.erase.aspect_max)},
        {"augment.erase.mode",
         {[](const RunConfig& c) { return std::string(to_string(c.augment.erase.mode)); },
          [](RunConfig& c, std::string_view v) { c.augment.erase.mode = parse_sync_mode(v); }}},
        {"augment.mask.probability", MSCSP_REAL(augment.mask.probability)},
        {"augment.mask.split_vis", MSCSP_REAL(augment.mask.split_vis)},
        {"augment.noise.probability", MSCSP_REAL(augment.noise.probability)},
        {"augment.noise.vis_model",
         {[](const RunConfig& c) { return std::string(to_string(c.augment.noise.vis_model)); },
          [](RunConfig& c, std::string_view v) { c.augment.noise.vis_model = parse_noise_model(v); }}},
        {"augment.noise.ir_model",
         {[](const RunConfig& c) { return std::string(to_string(c.augment.noise.ir_model)); },
          [](RunConfig& c, std::string_view v) { c.augment.noise.ir_model = parse_noise_model(v); }}},
        {"augment.noise.mode",
         {[](const RunConfig& c) { return std::string(to_string(c.augment.noise.mode)); },
          [](RunConfig& c, std::string_view v) { c.augment.noise.mode = parse_sync_mode(v); }}},
        {"augment.noise.gaussian_sigma", MSCSP_REAL(augment.noise.gaussian_sigma)},
        {"augment.noise.poisson_peak", MSCSP_REAL(augment.noise.poisson_peak)},
        {"augment.noise.sp_fraction", MSCSP_REAL(augment.noise.sp_fraction)},
        {"augment.stages",
         {[](const RunConfig& c) { return join(c.stages, [](const AugmentStage& s) { return to_string(s); }); },
          [](RunConfig& c, std::string_view v) {
              c.stages.clear();
              for (const auto tok : split(v, ','))
                  c.stages.push_back(parse_stage(tok));
          }}},

        {"backbone.channels",
         {[](const RunConfig& c) {
              return join(c.backbone.stages, [](const StageSpec& s) { return std::to_string(s.out_channels); });
          },
          [](RunConfig& c, std::string_view v) {
              const auto toks = split(v, ',');
              c.backbone.stages.resize(toks.size());
              for (std::size_t i = 0; i < toks.size(); ++i)
                  c.backbone.stages[i].out_channels = to_int<std::size_t>(toks[i]);
          }}},
        {"backbone.strides",
         {[](const RunConfig& c) {
              return join(c.backbone.stages, [](const StageSpec& s) { return std::to_string(s.stride); });
          },
          [](RunConfig& c, std::string_view v) {
              const auto toks = split(v, ',');
              c.backbone.stages.resize(toks.size());
              for (std::size_t i = 0; i < toks.size(); ++i)
                  c.backbone.stages[i].stride = to_int<int>(toks[i]);
          }}},
        {"backbone.head_channels", MSCSP_INT(std::size_t, backbone.head_channels)},

        {"eval.subsets",
         {[](const RunConfig& c) { return join(c.subsets, format_subset); },
          [](RunConfig& c, std::string_view v) {
              c.subsets.clear();
              for (const auto tok : split(v, ','))
                  c.subsets.push_back(parse_subset(tok));
          }}},
        {"eval.size_bins",
         {[](const RunConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.size_bins.size(); ++i) {
                  if (i == 0)
                      out = exact_number(c.size_bins[i].lo);
                  out += ',' + exact_number(c.size_bins[i].hi);
              }
              return out;
          },
          [](RunConfig& c, std::string_view v) {
              const auto toks = split(v, ',');
              if (toks.size() == 1)
                  throw Error("size bins need at least two edges");
              c.size_bins.clear();
              for (std::size_t i = 0; i + 1 < toks.size(); ++i)
                  c.size_bins.push_back({to_double(toks[i]), to_double(toks[i + 1])});
          }}},
        {"eval.occlusion_bins",
         {[](const RunConfig& c) {
              return join(c.occlusion_bins, [](Occlusion o) { return std::string(to_string(o)); });
          },
          [](RunConfig& c, std::string_view v) {
              c.occlusion_bins.clear();
              for (const auto tok : split(v, ','))
                  c.occlusion_bins.push_back(parse_occlusion_name(tok));
          }}},
        {"eval.iou_threshold", MSCSP_REAL(match.iou_threshold)},
        {"eval.ignore_ioa_threshold", MSCSP_REAL(match.ignore_ioa_threshold)},

        {"train.learning_rate", MSCSP_REAL(training.learning_rate)},
        {"train.epochs", MSCSP_INT(int, training.epochs)},
        {"train.samples_per_epoch", MSCSP_INT(int, training.samples_per_epoch)},
        {"train.batch_size", MSCSP_INT(int, training.batch_size)},
    };
    return table;
}

#undef MSCSP_REAL
#undef MSCSP_INT

} // namespace

SubsetSpec parse_subset(std::string_view text)
{
    if (text == "reasonable")
        return reasonable_subset();
    if (text == "all")
        return all_subset();
    const auto parts = split(text, ':');
    if (parts.size() != 4 || parts[0].empty())
        throw Error("subset '" + std::string(text) + "': expected reasonable, all, or name:min:max:occ|occ");
    SubsetSpec s;
    s.name = std::string(parts[0]);
    s.min_height = to_double(parts[1]);
    s.max_height = to_double(parts[2]);
    s.allowed_occlusion.clear();
    for (const auto occ : split(parts[3], '|'))
        s.allowed_occlusion.insert(parse_occlusion_name(occ));
    s.validate();
    return s;
}

std::string format_subset(const SubsetSpec& spec)
{
    std::string out = spec.name + ":" + exact_number(spec.min_height) + ":" + exact_number(spec.max_height) + ":";
    bool first = true;
    for (const auto o : spec.allowed_occlusion) {
        if (!first)
            out += '|';
        first = false;
        out += to_string(o);
    }
    return out;
}

void RunConfig::validate() const
{
    if (input.width == 0 || input.height == 0)
        throw Error("config: input size must be positive");
    if (codec.stride > 0 && (input.width % static_cast<std::size_t>(codec.stride) != 0 ||
                             input.height % static_cast<std::size_t>(codec.stride) != 0))
        throw Error("config: input size must be a multiple of the codec stride");
    codec.validate();
    loss.validate();
    augment.validate();
    backbone.validate();
    for (const auto& s : subsets)
        s.validate();
    for (const auto& b : size_bins)
        if (!(b.lo >= 0.0 && b.lo < b.hi))
            throw Error("config: size bin edges must be increasing and non-negative");
    if (!(match.iou_threshold > 0.0 && match.iou_threshold <= 1.0) ||
        !(match.ignore_ioa_threshold > 0.0 && match.ignore_ioa_threshold <= 1.0))
        throw Error("config: matching thresholds must lie in (0,1]");
}

RunConfig parse_config(std::istream& in, const std::string& source)
{
    RunConfig cfg;
    const auto& table = key_table();
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source, lineno, "expected 'key = value'");
        const std::string key(trim(t.substr(0, eq)));
        const auto value = trim(t.substr(eq + 1));
        const auto it = table.find(key);
        if (it == table.end())
            throw ParseError(source, lineno, "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ParseError(source, lineno, "duplicate key '" + key + "'");
        try {
            it->second.set(cfg, value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(source, lineno, key + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ParseError(source, 0, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return parse_config(in, path.string());
}

std::string format_config(const RunConfig& cfg)
{
    std::string out;
    for (const auto& [key, entry] : key_table())
        out += key + " = " + entry.get(cfg) + "\n";
    return out;
}

} // namespace mscsp
