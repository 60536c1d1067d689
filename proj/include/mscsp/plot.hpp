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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mscsp/evaluator.hpp"

namespace mscsp {

/// Parses a `fppi,miss_rate` CSV as written by format_curve_csv.
MrFppiCurve parse_curve_csv(std::istream& in, const std::string& source);
MrFppiCurve read_curve_csv(const std::filesystem::path& path);

struct NamedCurve {
    std::string name;
    MrFppiCurve curve;
};

/// SVG figure of miss rate against FPPI on log-log axes, one stepwise line per
/// curve; legend entries carry the log-average miss rate.
std::string render_svg_plot(const std::vector<NamedCurve>& curves, const std::string& title = "");

} // namespace mscsp
