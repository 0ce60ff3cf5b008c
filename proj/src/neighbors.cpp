#include "lund/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "lund/errors.hpp"
#include "lund/simd.hpp"
#include "lund/thread_pool.hpp"

namespace lund {
namespace {

using Cand = std::pair<double, std::uint32_t>;  // (squared distance, index)

// Bounded max-heap over (d2, idx); keeps the k smallest in lexicographic
// order, which is exactly the "ties to lower index" rule.
class KBest {
public:
    explicit KBest(std::size_t k) : k_(k) { heap_.reserve(k); }

    bool full() const { return heap_.size() == k_; }
    double worst_d2() const { return heap_.front().first; }
    const Cand& worst() const { return heap_.front(); }

    void offer(double d2, std::uint32_t i) {
        if (!full()) {
            heap_.emplace_back(d2, i);
            std::push_heap(heap_.begin(), heap_.end());
            return;
        }
        if (Cand(d2, i) < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = Cand(d2, i);
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    // ascending (d2, idx)
    std::vector<Cand> sorted() && {
        std::sort(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

private:
    std::size_t k_;
    std::vector<Cand> heap_;
};

class KdTree {
public:
    KdTree(const PointCloud& cloud) : cloud_(cloud), order_(cloud.n) {
        for (std::size_t i = 0; i < cloud.n; ++i) order_[i] = static_cast<std::uint32_t>(i);
        nodes_.reserve(2 * cloud.n / kLeafSize + 2);
        root_ = build(0, cloud.n);
    }

    void query(std::uint32_t self, KBest& best) const {
        descend(root_, cloud_.row(self), self, best);
    }

private:
    static constexpr std::size_t kLeafSize = 24;

    struct Node {
        std::uint32_t begin, end;  // range in order_
        int dim = -1;              // -1 marks a leaf
        double split = 0.0;
        std::int32_t left = -1, right = -1;
    };

    std::int32_t build(std::size_t begin, std::size_t end) {
        Node node;
        node.begin = static_cast<std::uint32_t>(begin);
        node.end = static_cast<std::uint32_t>(end);
        if (end - begin <= kLeafSize) {
            nodes_.push_back(node);
            return static_cast<std::int32_t>(nodes_.size() - 1);
        }

        // split along the widest-spread coordinate
        int dim = 0;
        double best_spread = -1.0;
        for (std::size_t d = 0; d < cloud_.dim; ++d) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = begin; i < end; ++i) {
                const double v = cloud_.row(order_[i])[d];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                dim = static_cast<int>(d);
            }
        }

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid,
                         order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             return cloud_.row(a)[dim] < cloud_.row(b)[dim];
                         });
        node.dim = dim;
        node.split = cloud_.row(order_[mid])[dim];

        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        const std::int32_t l = build(begin, mid);
        const std::int32_t r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    void descend(std::int32_t id, const double* q, std::uint32_t self, KBest& best) const {
        const Node& node = nodes_[id];
        if (node.dim < 0) {
            const auto& kern = simd::active();
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::uint32_t p = order_[i];
                if (p == self) continue;
                best.offer(kern.sqdist(q, cloud_.row(p), cloud_.dim), p);
            }
            return;
        }
        const double delta = q[node.dim] - node.split;
        const std::int32_t near = delta <= 0.0 ? node.left : node.right;
        const std::int32_t far = delta <= 0.0 ? node.right : node.left;
        descend(near, q, self, best);
        // <= keeps boundary ties eligible so the lower-index rule stays exact
        if (!best.full() || delta * delta <= best.worst_d2()) descend(far, q, self, best);
    }

    const PointCloud& cloud_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace

NeighborList knn(const PointCloud& cloud, std::size_t k, KnnMethod method) {
    if (cloud.n == 0) throw InvalidParameterError("knn: empty point cloud");
    if (k < 1 || k >= cloud.n)
        throw InvalidParameterError("knn: need 1 <= k < n, got k=" + std::to_string(k) +
                                    " n=" + std::to_string(cloud.n));

    if (method == KnnMethod::automatic)
        method = cloud.n <= 64 ? KnnMethod::brute : KnnMethod::kdtree;

    NeighborList out;
    out.n = cloud.n;
    out.k = k;
    out.idx.resize(cloud.n * k);
    out.dist.resize(cloud.n * k);

    std::optional<KdTree> storage;
    if (method == KnnMethod::kdtree) storage.emplace(cloud);
    const KdTree* tree = storage ? &*storage : nullptr;

    parallel_for(cloud.n, [&](std::size_t i) {
        KBest best(k);
        if (tree) {
            tree->query(static_cast<std::uint32_t>(i), best);
        } else {
            const auto& kern = simd::active();
            for (std::size_t j = 0; j < cloud.n; ++j) {
                if (j == i) continue;
                best.offer(kern.sqdist(cloud.row(i), cloud.row(j), cloud.dim),
                           static_cast<std::uint32_t>(j));
            }
        }
        auto sorted = std::move(best).sorted();
        for (std::size_t s = 0; s < k; ++s) {
            out.idx[i * k + s] = sorted[s].second;
            out.dist[i * k + s] = std::sqrt(sorted[s].first);
        }
    });
    return out;
}

}  // namespace lund
