#include "lund/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lund/errors.hpp"

namespace lund {

namespace {

// Coarse viridis ramp; linear interpolation between anchors is plenty for
// reading off figure structure.
struct Rgb {
    double r, g, b;
};

constexpr Rgb kRamp[] = {
    {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
    {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
    {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441}, {0.478, 0.821, 0.318},
    {0.741, 0.873, 0.150}, {0.993, 0.906, 0.144},
};

std::string ramp_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const int segs = static_cast<int>(std::size(kRamp)) - 1;
    const double pos = v * segs;
    const int i = std::min(static_cast<int>(pos), segs - 1);
    const double f = pos - i;
    const Rgb c{kRamp[i].r + f * (kRamp[i + 1].r - kRamp[i].r),
                kRamp[i].g + f * (kRamp[i + 1].g - kRamp[i].g),
                kRamp[i].b + f * (kRamp[i + 1].b - kRamp[i].b)};
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(c.r * 255.0)),
                  static_cast<int>(std::lround(c.g * 255.0)),
                  static_cast<int>(std::lround(c.b * 255.0)));
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string col_tick(double v, bool log_form) {
    if (log_form && v > 0.0) {
        const double e = std::log10(v);
        const double r = std::round(e);
        if (std::abs(e - r) < 1e-9) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(r));
            return buf;
        }
    }
    return fmt(v);
}

}  // namespace

std::string render_heatmap(const HeatmapSpec& spec) {
    const std::size_t nr = spec.rows(), nc = spec.cols();
    if (nr == 0 || nc == 0 || spec.cells.size() != nr * nc)
        throw InvalidParameterError("render_heatmap: grid/cells shape mismatch");
    if (!(spec.hi > spec.lo))
        throw InvalidParameterError("render_heatmap: empty color range");

    const double cell = 26.0, left = 78.0, top = 46.0, right = 96.0, bottom = 58.0;
    const double w = left + nc * cell + right;
    const double h = top + nr * cell + bottom;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">"
        << escape(spec.title) << "</text>\n";

    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            const double v = spec.cells[r * nc + c];
            const std::string color =
                std::isfinite(v)
                    ? ramp_color((v - spec.lo) / (spec.hi - spec.lo))
                    : std::string("#b8b8b8");
            out << "<rect x=\"" << left + c * cell << "\" y=\"" << top + r * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << color << "\" stroke=\"white\" stroke-width=\"0.5\"";
            if (std::isfinite(v)) out << "><title>" << fmt(v) << "</title></rect>\n";
            else out << "/>\n";
        }
    }

    // row ticks (all), column ticks (thinned to at most ~12)
    for (std::size_t r = 0; r < nr; ++r)
        out << "<text x=\"" << left - 6 << "\" y=\"" << top + r * cell + cell / 2 + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt(spec.row_values[r]) << "</text>\n";
    const std::size_t step = std::max<std::size_t>(1, (nc + 11) / 12);
    for (std::size_t c = 0; c < nc; c += step)
        out << "<text x=\"" << left + c * cell + cell / 2 << "\" y=\""
            << top + nr * cell + 14
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << col_tick(spec.col_values[c], spec.col_log10) << "</text>\n";
    out << "<text x=\"" << left + nc * cell / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(spec.col_label) << "</text>\n"
        << "<text x=\"18\" y=\"" << top + nr * cell / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 18 "
        << top + nr * cell / 2 << ")\">" << escape(spec.row_label) << "</text>\n";

    // color bar
    const double bx = left + nc * cell + 24.0, bh = nr * cell;
    const int strips = 48;
    for (int i = 0; i < strips; ++i) {
        const double f = 1.0 - (i + 0.5) / strips;
        out << "<rect x=\"" << bx << "\" y=\"" << top + bh * i / strips
            << "\" width=\"14\" height=\"" << bh / strips + 0.5 << "\" fill=\""
            << ramp_color(f) << "\"/>\n";
    }
    out << "<text x=\"" << bx + 18 << "\" y=\"" << top + 8
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(spec.hi)
        << "</text>\n"
        << "<text x=\"" << bx + 18 << "\" y=\"" << top + bh
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(spec.lo)
        << "</text>\n</svg>\n";
    return out.str();
}

std::string render_curves(const CurvePlotSpec& spec) {
    if (spec.series.empty())
        throw InvalidParameterError("render_curves: no series");
    if (!(spec.y_floor > 0.0))
        throw InvalidParameterError("render_curves: y_floor must be positive");

    struct Pt {
        double lx, ly;
    };
    std::vector<std::vector<Pt>> logged(spec.series.size());
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const auto& ser = spec.series[s];
        if (ser.x.size() != ser.y.size())
            throw InvalidParameterError("render_curves: x/y length mismatch");
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!(ser.x[i] > 0.0) || !std::isfinite(ser.x[i]) ||
                !std::isfinite(ser.y[i]))
                continue;
            const double y = std::max(ser.y[i], spec.y_floor);
            if (!(y > 0.0)) continue;
            const Pt p{std::log10(ser.x[i]), std::log10(y)};
            logged[s].push_back(p);
            xmin = std::min(xmin, p.lx);
            xmax = std::max(xmax, p.lx);
            ymin = std::min(ymin, p.ly);
            ymax = std::max(ymax, p.ly);
        }
    }
    if (xmin > xmax) throw InvalidParameterError("render_curves: no finite samples");
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

    const double left = 70.0, top = 40.0, pw = 560.0, ph = 340.0;
    const double w = left + pw + 180.0, h = top + ph + 60.0;
    auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">"
        << escape(spec.title) << "</text>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // decade grid lines
    for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
        out << "<line x1=\"" << px(e) << "\" y1=\"" << top << "\" x2=\"" << px(e)
            << "\" y2=\"" << top + ph << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << px(e) << "\" y=\"" << top + ph + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">1e"
            << e << "</text>\n";
    }
    const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 8.0));
    for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); e += ystep) {
        out << "<line x1=\"" << left << "\" y1=\"" << py(e) << "\" x2=\"" << left + pw
            << "\" y2=\"" << py(e) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << left - 6 << "\" y=\"" << py(e) + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">1e"
            << e << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(spec.x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << top + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        if (logged[s].empty()) continue;
        const auto& ser = spec.series[s];
        out << "<polyline fill=\"none\" stroke=\"" << ser.color
            << "\" stroke-width=\"1.8\"";
        if (ser.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (const Pt& p : logged[s]) out << fmt(px(p.lx)) << "," << fmt(py(p.ly)) << " ";
        out << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
            << left + pw + 40 << "\" y2=\"" << ly << "\" stroke=\"" << ser.color
            << "\" stroke-width=\"1.8\"";
        if (ser.dashed) out << " stroke-dasharray=\"6 4\"";
        out << "/>\n<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(ser.name)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << content;
    if (!f.good()) throw IoError("write failed: " + path);
}

}  // namespace lund
