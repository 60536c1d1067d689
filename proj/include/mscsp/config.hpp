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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mscsp/augment.hpp"
#include "mscsp/codec.hpp"
#include "mscsp/evaluator.hpp"
#include "mscsp/fusion.hpp"
#include "mscsp/loss.hpp"

namespace mscsp {

/// Training schedule of the reference detector. Recorded for provenance only;
/// nothing in this library trains.
struct TrainingReference {
    double learning_rate = 1e-4; // Adam
    int epochs = 100;
    int samples_per_epoch = 2000;
    int batch_size = 12;

    friend bool operator==(const TrainingReference&, const TrainingReference&) = default;
};

struct RunConfig {
    ImageSize input{480, 384};
    std::uint64_t seed = 0;
    CodecConfig codec;
    LossConfig loss;
    AugmentConfig augment;
    std::vector<AugmentStage> stages{{StageKind::geometric, std::nullopt}};
    BackboneSpec backbone;
    std::vector<SubsetSpec> subsets{reasonable_subset(), all_subset()};
    std::vector<SizeBin> size_bins = default_size_bins();
    std::vector<Occlusion> occlusion_bins = default_occlusion_bins();
    MatchParams match;
    TrainingReference training;

    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// `key = value` lines; '#' comments. Unknown or repeated keys are errors,
/// absent keys keep their defaults.
RunConfig parse_config(std::istream& in, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

/// `reasonable`, `all`, or `name:min_height:max_height:occ|occ...`.
SubsetSpec parse_subset(std::string_view text);
std::string format_subset(const SubsetSpec& spec);

} // namespace mscsp
