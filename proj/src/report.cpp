#include "aggrum/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace aggrum {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

struct Rgb {
    double r, g, b;
};

Rgb lerp(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

std::string hex(Rgb c) {
    char buf[8];
    auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255)); };
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
    return buf;
}

constexpr Rgb kBlue{0.13, 0.40, 0.67}, kWhite{0.97, 0.97, 0.97}, kRed{0.70, 0.09, 0.17};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepKind kind) {
    std::ostringstream out;
    if (kind == SweepKind::Lambda)
        out << "lambda_z,lambda_w,lambda_zw,bias,squared_distance,independent,l1_from_independent\n";
    else
        out << "u_z,u_w,bias,squared_distance,independent\n";
    for (const auto& r : rows) {
        out << format_number(r.h) << ',' << format_number(r.v) << ',';
        if (kind == SweepKind::Lambda) out << format_number(std::max(0.0, 1.0 - r.h - r.v)) << ',';
        out << opt(r.bias) << ',' << opt(r.squared_distance) << ',' << (r.independent ? 1 : 0);
        if (kind == SweepKind::Lambda) out << ',' << format_number(r.l1_from_independent);
        out << '\n';
    }
    return out.str();
}

std::string minmax_csv(const std::vector<MinMaxRow>& rows) {
    std::ostringstream out;
    out << "lambda_w,lambda_z,max_bias,min_bias,min_abs_bias,independent_bias\n";
    for (const auto& r : rows)
        out << format_number(r.w) << ',' << format_number(r.z) << ',' << format_number(r.max_bias) << ','
            << format_number(r.min_bias) << ',' << format_number(r.min_abs_bias) << ','
            << format_number(r.independent_bias) << '\n';
    return out.str();
}

std::string sweep_svg(const std::vector<SweepRow>& rows, SweepKind kind, HeatmapMeasure measure,
                      const std::string& title) {
    auto value = [&](const SweepRow& r) { return measure == HeatmapMeasure::Bias ? r.bias : r.squared_distance; };
    std::vector<double> hs, vs;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : rows) {
        hs.push_back(r.h);
        vs.push_back(r.v);
        if (auto x = value(r)) {
            lo = std::min(lo, *x);
            hi = std::max(hi, *x);
        }
    }
    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
    };
    uniq(hs);
    uniq(vs);
    auto pos = [](const std::vector<double>& axis, double x) {
        return static_cast<int>(std::lower_bound(axis.begin(), axis.end(), x - 1e-9) - axis.begin());
    };
    const double span = measure == HeatmapMeasure::Bias ? std::max(std::abs(lo), std::abs(hi)) : hi - lo;
    auto color = [&](double x) {
        if (!(span > 0)) return hex(kWhite);
        if (measure == HeatmapMeasure::Bias)
            return hex(x < 0 ? lerp(kWhite, kBlue, -x / span) : lerp(kWhite, kRed, x / span));
        return hex(lerp(kWhite, kRed, (x - lo) / span));
    };

    const int cell = 36, left = 70, top = 50, legend = 90;
    const int cols = static_cast<int>(hs.size()), nrows = static_cast<int>(vs.size());
    const int width = left + cols * cell + legend, height = top + nrows * cell + 60;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">" << xml_escape(title) << "</text>\n";
    std::string outline;
    for (const auto& r : rows) {
        auto x = value(r);
        if (!x) continue;
        const int cx = left + pos(hs, r.h) * cell;
        const int cy = top + (nrows - 1 - pos(vs, r.v)) * cell;
        svg << "<rect x=\"" << cx << "\" y=\"" << cy << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"" << color(*x) << "\"><title>" << format_number(*x) << "</title></rect>\n";
        if (r.independent)
            outline = "<rect x=\"" + std::to_string(cx + 1) + "\" y=\"" + std::to_string(cy + 1) + "\" width=\"" +
                      std::to_string(cell - 2) + "\" height=\"" + std::to_string(cell - 2) +
                      "\" fill=\"none\" stroke=\"#1f4fff\" stroke-width=\"3\"/>\n";
    }
    svg << outline;
    for (int i = 0; i < cols; ++i)
        svg << "<text x=\"" << left + i * cell + cell / 2 << "\" y=\"" << top + nrows * cell + 14
            << "\" text-anchor=\"middle\">" << format_number(hs[static_cast<std::size_t>(i)]) << "</text>\n";
    for (int j = 0; j < nrows; ++j)
        svg << "<text x=\"" << left - 6 << "\" y=\"" << top + (nrows - 1 - j) * cell + cell / 2 + 4
            << "\" text-anchor=\"end\">" << format_number(vs[static_cast<std::size_t>(j)]) << "</text>\n";
    const bool lam = kind == SweepKind::Lambda;
    svg << "<text x=\"" << left + cols * cell / 2 << "\" y=\"" << top + nrows * cell + 34 << "\" text-anchor=\"middle\">"
        << (lam ? "lambda({z})" : "u(z)") << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + nrows * cell / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + nrows * cell / 2 << ")\">" << (lam ? "lambda({w})" : "u(w)") << "</text>\n";

    // Legend bar.
    const int lx = left + cols * cell + 24, steps = 20, lh = 8;
    const double from = measure == HeatmapMeasure::Bias ? -span : lo, to = measure == HeatmapMeasure::Bias ? span : hi;
    for (int s = 0; s < steps; ++s) {
        const double x = std::isfinite(from) ? to - (to - from) * (s + 0.5) / steps : 0.0;
        svg << "<rect x=\"" << lx << "\" y=\"" << top + s * lh << "\" width=\"14\" height=\"" << lh << "\" fill=\""
            << color(x) << "\"/>\n";
    }
    if (std::isfinite(from)) {
        svg << "<text x=\"" << lx + 18 << "\" y=\"" << top + 8 << "\">" << format_number(to) << "</text>\n";
        svg << "<text x=\"" << lx + 18 << "\" y=\"" << top + steps * lh << "\">" << format_number(from) << "</text>\n";
    }
    svg << "<text x=\"" << lx << "\" y=\"" << top - 8 << "\">"
        << (measure == HeatmapMeasure::Bias ? "bias" : "squared distance") << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace aggrum
