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


#include "mscsp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mscsp/annotation_io.hpp"

namespace mscsp {

MrFppiCurve parse_curve_csv(std::istream& in, const std::string& source)
{
    MrFppiCurve curve;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!header) {
            if (line != "fppi,miss_rate")
                throw ParseError(source, lineno, "expected header 'fppi,miss_rate'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(source, lineno, "expected two comma-separated values");
        const auto fppi = parse_number(std::string_view(line).substr(0, comma));
        const auto mr = parse_number(std::string_view(line).substr(comma + 1));
        if (!fppi || !mr || *fppi < 0.0 || *mr < 0.0 || *mr > 1.0)
            throw ParseError(source, lineno, "malformed curve point");
        curve.points.push_back({0.0, *fppi, *mr});
    }
    if (!header)
        throw ParseError(source, 0, "empty curve file");
    return curve;
}

MrFppiCurve read_curve_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return parse_curve_csv(in, path.string());
}

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr double kFppiMin = 1e-3;
constexpr double kFppiMax = 1e1;
constexpr double kMrMin = 1e-2;
constexpr double kMrMax = 1.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

double px(double fppi)
{
    const double f = std::clamp(fppi, kFppiMin, kFppiMax);
    const double t = (std::log10(f) - std::log10(kFppiMin)) / (std::log10(kFppiMax) - std::log10(kFppiMin));
    return kLeft + t * (kWidth - kLeft - kRight);
}

double py(double mr)
{
    const double m = std::clamp(mr, kMrMin, kMrMax);
    const double t = (std::log10(m) - std::log10(kMrMin)) / (std::log10(kMrMax) - std::log10(kMrMin));
    return kHeight - kBottom - t * (kHeight - kTop - kBottom);
}

std::string num(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string escape(const std::string& s)
{
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg_plot(const std::vector<NamedCurve>& curves, const std::string& title)
{
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
           << "</text>\n";

    // decade grid
    for (int e = -3; e <= 1; ++e) {
        const double x = px(std::pow(10.0, e));
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(kHeight - kBottom) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">10^"
           << e << "</text>\n";
    }
    for (const double m : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        const double y = py(m);
        os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
           << num(y) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << m
           << "</text>\n";
    }
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
       << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
       << "\" text-anchor=\"middle\">false positives per image</text>\n";
    os << "<text transform=\"translate(18," << num((kTop + kHeight - kBottom) / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">miss rate</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* color = kPalette[i % std::size(kPalette)];
        if (!c.curve.points.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            double prev_mr = c.curve.points.front().miss_rate;
            os << num(px(kFppiMin)) << "," << num(py(prev_mr));
            for (const auto& p : c.curve.points) {
                os << " " << num(px(p.fppi)) << "," << num(py(prev_mr));
                os << " " << num(px(p.fppi)) << "," << num(py(p.miss_rate));
                prev_mr = p.miss_rate;
            }
            os << " " << num(px(kFppiMax)) << "," << num(py(prev_mr)) << "\"/>\n";
        }
        const double ly = kTop + 16 + 18 * static_cast<double>(i);
        const double lx = kWidth - kRight + 12;
        std::string label = c.name;
        if (!c.curve.points.empty())
            label = num(log_average_mr(c.curve)) + "% " + label;
        os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 20) << "\" y2=\""
           << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << escape(label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace mscsp
