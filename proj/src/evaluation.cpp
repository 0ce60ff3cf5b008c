#include "lund/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "lund/errors.hpp"

namespace lund {

namespace {

// Kuhn-Munkres with potentials, O(n^3), square cost minimization.
// Returns row -> column.
std::vector<int> hungarian_min_square(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

std::vector<int> assignment_max(const Eigen::MatrixXd& gain) {
    const int r = static_cast<int>(gain.rows());
    const int c = static_cast<int>(gain.cols());
    if (r == 0 || c == 0) throw InvalidParameterError("assignment_max: empty matrix");
    const int n = std::max(r, c);
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
    cost.topLeftCorner(r, c) = -gain;
    std::vector<int> asg = hungarian_min_square(cost);
    asg.resize(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i)
        if (asg[static_cast<std::size_t>(i)] >= c) asg[static_cast<std::size_t>(i)] = -1;
    return asg;
}

AccuracyReport score(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.empty() || truth.empty())
        throw InvalidParameterError("score: empty label vector");
    if (predicted.size() != truth.size())
        throw InvalidParameterError("score: label vectors differ in length");
    const std::size_t n = truth.size();

    std::map<int, int> tid, pid;  // label value -> dense index
    for (int v : truth)
        if (!tid.count(v)) tid.emplace(v, 0);
    for (int v : predicted)
        if (!pid.count(v)) pid.emplace(v, 0);
    AccuracyReport rep;
    for (auto& [v, idx] : tid) {
        idx = static_cast<int>(rep.true_ids.size());
        rep.true_ids.push_back(v);
    }
    for (auto& [v, idx] : pid) {
        idx = static_cast<int>(rep.pred_ids.size());
        rep.pred_ids.push_back(v);
    }
    const int kt = static_cast<int>(rep.true_ids.size());
    const int kp = static_cast<int>(rep.pred_ids.size());
    rep.confusion = Eigen::MatrixXi::Zero(kt, kp);
    for (std::size_t i = 0; i < n; ++i)
        rep.confusion(tid.at(truth[i]), pid.at(predicted[i])) += 1;

    const std::vector<int> asg = assignment_max(rep.confusion.cast<double>());
    long matched = 0;
    double recall_sum = 0.0;
    for (int r = 0; r < kt; ++r) {
        const int c = asg[static_cast<std::size_t>(r)];
        const long row_total = rep.confusion.row(r).sum();
        if (c >= 0) {
            matched += rep.confusion(r, c);
            recall_sum += static_cast<double>(rep.confusion(r, c)) /
                          static_cast<double>(row_total);
            rep.alignment.emplace_back(rep.true_ids[static_cast<std::size_t>(r)],
                                       rep.pred_ids[static_cast<std::size_t>(c)]);
        }
    }
    rep.overall = static_cast<double>(matched) / static_cast<double>(n);
    rep.average = recall_sum / static_cast<double>(kt);
    return rep;
}

}  // namespace lund
