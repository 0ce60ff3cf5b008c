#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lund {

// Dense point set, row-major. labels is either empty or holds one positive
// integer class id per point (ground truth when known).
struct PointCloud {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> data;  // n * dim
    std::vector<int> labels;   // empty or size n

    const double* row(std::size_t i) const { return data.data() + i * dim; }
    double* row(std::size_t i) { return data.data() + i * dim; }

    bool has_labels() const { return !labels.empty(); }
};

// CSV layout: one point per row, dim numeric columns. An optional header may
// declare a final integer column "label"; without a header every column is a
// coordinate.
PointCloud read_points_csv(const std::string& path);
void write_points_csv(const PointCloud& cloud, const std::string& path);

// Full symmetric Euclidean distance matrix with zero diagonal. Quadratic;
// meant for modest n and as the reference oracle for the neighbor search.
Eigen::MatrixXd pairwise_distances(const PointCloud& cloud);

}  // namespace lund
