#include "lund/point_cloud.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lund/errors.hpp"
#include "lund/simd.hpp"

namespace lund {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        std::size_t b = 0, e = field.size();
        while (b < e && std::isspace(static_cast<unsigned char>(field[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(field[e - 1]))) --e;
        out.push_back(field.substr(b, e - b));
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

PointCloud read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_points_csv: cannot open " + path);

    PointCloud cloud;
    std::string line;
    bool first = true;
    bool has_label_col = false;
    std::size_t ncols = 0;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.empty()) continue;

        if (first) {
            first = false;
            double probe;
            if (!parse_double(fields[0], probe)) {
                // header row; a trailing "label" column marks ground truth
                has_label_col = !fields.empty() && fields.back() == "label";
                ncols = fields.size();
                continue;
            }
            ncols = fields.size();
        }

        if (fields.size() != ncols)
            throw IoError("read_points_csv: ragged row in " + path);

        const std::size_t d = has_label_col ? ncols - 1 : ncols;
        if (cloud.dim == 0) cloud.dim = d;
        for (std::size_t j = 0; j < d; ++j) {
            double v;
            if (!parse_double(fields[j], v))
                throw IoError("read_points_csv: non-numeric field '" + fields[j] +
                              "' in " + path);
            cloud.data.push_back(v);
        }
        if (has_label_col) {
            double v;
            if (!parse_double(fields.back(), v))
                throw IoError("read_points_csv: non-numeric label in " + path);
            cloud.labels.push_back(static_cast<int>(std::lround(v)));
        }
        ++cloud.n;
    }
    if (cloud.n == 0) throw IoError("read_points_csv: no data rows in " + path);
    return cloud;
}

void write_points_csv(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_points_csv: cannot open " + path);
    for (std::size_t j = 0; j < cloud.dim; ++j) {
        if (j) out << ',';
        out << 'x' << j;
    }
    if (cloud.has_labels()) out << ",label";
    out << '\n';

    char buf[32];
    for (std::size_t i = 0; i < cloud.n; ++i) {
        for (std::size_t j = 0; j < cloud.dim; ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", cloud.row(i)[j]);
            out << buf;
        }
        if (cloud.has_labels()) out << ',' << cloud.labels[i];
        out << '\n';
    }
    if (!out) throw IoError("write_points_csv: write failed for " + path);
}

Eigen::MatrixXd pairwise_distances(const PointCloud& cloud) {
    const auto n = static_cast<Eigen::Index>(cloud.n);
    Eigen::MatrixXd d(n, n);
    const auto& k = simd::active();
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::sqrt(k.sqdist(cloud.row(i), cloud.row(j), cloud.dim));
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

}  // namespace lund
