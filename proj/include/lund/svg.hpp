#pragma once

#include <string>
#include <vector>

namespace lund {

// Grid heatmap: rows indexed by row_values (drawn top to bottom), columns by
// col_values. cells is row-major, rows() * cols() long; NaN renders grey.
struct HeatmapSpec {
    std::string title;
    std::string row_label = "sigma";
    std::string col_label = "t";
    std::vector<double> row_values;
    std::vector<double> col_values;
    std::vector<double> cells;
    double lo = 0.0;  // color ramp range; values clamped
    double hi = 1.0;
    bool col_log10 = true;  // print column ticks as 10^k when k is integral

    std::size_t rows() const { return row_values.size(); }
    std::size_t cols() const { return col_values.size(); }
};

std::string render_heatmap(const HeatmapSpec& spec);

struct CurveSeries {
    std::string name;
    std::string color = "#1f77b4";
    bool dashed = false;
    std::vector<double> x;
    std::vector<double> y;
};

// log10/log10 line plot. Nonpositive or non-finite samples are dropped;
// y values are clamped below at y_floor so decayed curves stay on the page.
struct CurvePlotSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    double y_floor = 1e-16;
    std::vector<CurveSeries> series;
};

std::string render_curves(const CurvePlotSpec& spec);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lund
