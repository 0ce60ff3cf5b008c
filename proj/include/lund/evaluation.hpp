#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lund {

struct AccuracyReport {
    double overall = 0.0;  // aligned diagonal mass / n
    double average = 0.0;  // mean class-wise recall under the same alignment
    std::vector<std::pair<int, int>> alignment;  // (true id, predicted id) matches
    Eigen::MatrixXi confusion;                   // K_true x K_pred counts
    std::vector<int> true_ids;                   // confusion row labels, ascending
    std::vector<int> pred_ids;                   // confusion column labels, ascending
};

// Maximum-gain one-to-one assignment; rectangular inputs are zero-padded to
// square internally. Returns the assigned column per row, -1 when a row is
// matched to padding.
std::vector<int> assignment_max(const Eigen::MatrixXd& gain);

// Accuracy of `predicted` against `truth` under the best one-to-one label
// alignment. Label values are arbitrary ints; unmatched labels score zero.
AccuracyReport score(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace lund
