#include "pctmi/kdtree.hpp"

#include "pctmi/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pctmi {

KdTree::KdTree(const Matrix& points, std::size_t leaf_size)
    : n_(points.rows()), dims_(points.cols()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (n_ == 0) return;
    if (n_ >= std::numeric_limits<std::uint32_t>::max()) throw InvalidConfigError("too many points for the kd-tree");
    std::vector<std::uint32_t> order(n_);
    std::iota(order.begin(), order.end(), 0u);
    nodes_.reserve(2 * n_ / leaf_size_ + 2);
    build(0, static_cast<std::uint32_t>(n_), order, points);

    perm_ = order;
    pos_of_.assign(n_, 0);
    pts_.resize(n_ * dims_);
    for (std::size_t pos = 0; pos < n_; ++pos) {
        pos_of_[perm_[pos]] = static_cast<std::uint32_t>(pos);
        auto src = points.row(perm_[pos]);
        std::copy(src.begin(), src.end(), pts_.begin() + static_cast<std::ptrdiff_t>(pos * dims_));
    }
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::vector<std::uint32_t>& order,
                            const Matrix& points) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end, 0, 0});
    lo_.resize(lo_.size() + dims_);
    hi_.resize(hi_.size() + dims_);
    double* lo = lo_.data() + static_cast<std::size_t>(id) * dims_;
    double* hi = hi_.data() + static_cast<std::size_t>(id) * dims_;
    for (std::size_t c = 0; c < dims_; ++c) {
        lo[c] = std::numeric_limits<double>::infinity();
        hi[c] = -std::numeric_limits<double>::infinity();
    }
    for (std::uint32_t i = begin; i < end; ++i) {
        auto r = points.row(order[i]);
        for (std::size_t c = 0; c < dims_; ++c) {
            lo[c] = std::min(lo[c], r[c]);
            hi[c] = std::max(hi[c], r[c]);
        }
    }
    if (end - begin <= leaf_size_ || dims_ == 0) return id;

    std::size_t split_dim = 0;
    double spread = -1.0;
    for (std::size_t c = 0; c < dims_; ++c) {
        if (hi[c] - lo[c] > spread) {
            spread = hi[c] - lo[c];
            split_dim = c;
        }
    }
    if (spread <= 0.0) return id;

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return points(a, split_dim) < points(b, split_dim); });
    const std::uint32_t left = build(begin, mid, order, points);
    const std::uint32_t right = build(mid, end, order, points);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::box_distance(std::uint32_t node, const double* q) const {
    const double* lo = lo_.data() + static_cast<std::size_t>(node) * dims_;
    const double* hi = hi_.data() + static_cast<std::size_t>(node) * dims_;
    double d = 0.0;
    for (std::size_t c = 0; c < dims_; ++c) {
        double gap = 0.0;
        if (q[c] < lo[c]) {
            gap = lo[c] - q[c];
        } else if (q[c] > hi[c]) {
            gap = q[c] - hi[c];
        }
        if (gap > d) d = gap;
    }
    return d;
}

// Largest distance from q to any point of the node's box.
double KdTree::box_extent(std::uint32_t node, const double* q) const {
    const double* lo = lo_.data() + static_cast<std::size_t>(node) * dims_;
    const double* hi = hi_.data() + static_cast<std::size_t>(node) * dims_;
    double d = 0.0;
    for (std::size_t c = 0; c < dims_; ++c) {
        const double a = q[c] > lo[c] ? q[c] - lo[c] : lo[c] - q[c];
        const double b = q[c] > hi[c] ? q[c] - hi[c] : hi[c] - q[c];
        d = std::max(d, std::max(a, b));
    }
    return d;
}

void KdTree::knn_search(std::uint32_t node, const double* q, std::uint32_t self, std::vector<double>& best,
                        int k) const {
    const Node& nd = nodes_[node];
    if (nd.left == 0) {
        for (std::uint32_t pos = nd.begin; pos < nd.end; ++pos) {
            if (pos == self) continue;
            const double* p = point(pos);
            const double worst = best.back();
            double d = 0.0;
            std::size_t c = 0;
            for (; c < dims_; ++c) {
                const double diff = p[c] > q[c] ? p[c] - q[c] : q[c] - p[c];
                if (diff > d) {
                    d = diff;
                    if (d >= worst) break;
                }
            }
            if (c < dims_ || d >= worst) continue;
            auto it = std::upper_bound(best.begin(), best.end(), d);
            best.insert(it, d);
            best.pop_back();
        }
        return;
    }
    const double dl = box_distance(nd.left, q);
    const double dr = box_distance(nd.right, q);
    const std::uint32_t first = dl <= dr ? nd.left : nd.right;
    const std::uint32_t second = dl <= dr ? nd.right : nd.left;
    if (std::min(dl, dr) < best.back()) knn_search(first, q, self, best, k);
    if (std::max(dl, dr) < best.back()) knn_search(second, q, self, best, k);
}

double KdTree::kth_distance(std::size_t i, int k) const {
    if (k < 1 || static_cast<std::size_t>(k) >= n_) throw InsufficientSamplesError("k must satisfy 1 <= k < n");
    std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
    const std::uint32_t self = pos_of_[i];
    knn_search(0, point(self), self, best, k);
    return best.back();
}

std::size_t KdTree::count_search(std::uint32_t node, const double* q, double radius) const {
    if (box_distance(node, q) >= radius) return 0;
    const Node& nd = nodes_[node];
    if (box_extent(node, q) < radius) return nd.end - nd.begin;
    if (nd.left == 0) {
        std::size_t count = 0;
        for (std::uint32_t pos = nd.begin; pos < nd.end; ++pos) {
            const double* p = point(pos);
            bool inside = true;
            for (std::size_t c = 0; c < dims_; ++c) {
                const double diff = p[c] > q[c] ? p[c] - q[c] : q[c] - p[c];
                if (diff >= radius) {
                    inside = false;
                    break;
                }
            }
            count += inside ? 1 : 0;
        }
        return count;
    }
    return count_search(nd.left, q, radius) + count_search(nd.right, q, radius);
}

std::size_t KdTree::count_within(std::size_t i, double radius) const {
    if (n_ == 0 || !(radius > 0.0)) return 0;
    const std::uint32_t self = pos_of_[i];
    // The query point is at distance 0 < radius from itself and is always counted once.
    return count_search(0, point(self), radius) - 1;
}

void KdTree::nearest_search(std::uint32_t node, const double* q, std::vector<std::pair<double, std::uint32_t>>& best,
                            int k) const {
    const Node& nd = nodes_[node];
    if (nd.left == 0) {
        for (std::uint32_t pos = nd.begin; pos < nd.end; ++pos) {
            const double* p = point(pos);
            double d = 0.0;
            for (std::size_t c = 0; c < dims_; ++c) {
                const double diff = p[c] > q[c] ? p[c] - q[c] : q[c] - p[c];
                if (diff > d) d = diff;
            }
            const std::pair<double, std::uint32_t> cand{d, perm_[pos]};
            if (cand < best.back()) {
                best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
                best.pop_back();
            }
        }
        return;
    }
    const double dl = box_distance(nd.left, q);
    const double dr = box_distance(nd.right, q);
    const std::uint32_t first = dl <= dr ? nd.left : nd.right;
    const std::uint32_t second = dl <= dr ? nd.right : nd.left;
    // Equal distances may still displace a larger index, so prune only on strict excess.
    if (std::min(dl, dr) <= best.back().first) nearest_search(first, q, best, k);
    if (std::max(dl, dr) <= best.back().first) nearest_search(second, q, best, k);
}

std::vector<std::size_t> KdTree::nearest(std::size_t i, int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > n_) throw InsufficientSamplesError("k must satisfy 1 <= k <= n");
    std::vector<std::pair<double, std::uint32_t>> best(
        static_cast<std::size_t>(k), {std::numeric_limits<double>::infinity(), std::numeric_limits<std::uint32_t>::max()});
    nearest_search(0, point(pos_of_[i]), best, k);
    std::vector<std::size_t> out;
    out.reserve(best.size());
    for (const auto& b : best) out.push_back(b.second);
    return out;
}

std::vector<double> kth_distances(const Matrix& points, int k, NeighborSearch search) {
    const std::size_t n = points.rows();
    if (k < 1 || static_cast<std::size_t>(k) >= n) throw InsufficientSamplesError("k must satisfy 1 <= k < n");
    std::vector<double> out(n);
    if (search == NeighborSearch::KdTree) {
        const KdTree tree(points);
        for (std::size_t i = 0; i < n; ++i) out[i] = tree.kth_distance(i, k);
        return out;
    }
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dist[m++] = max_norm(points.row(i), points.row(j));
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.begin() + static_cast<std::ptrdiff_t>(m));
        out[i] = dist[static_cast<std::size_t>(k - 1)];
    }
    return out;
}

std::vector<std::size_t> counts_within(const Matrix& points, std::span<const double> radii, NeighborSearch search) {
    const std::size_t n = points.rows();
    std::vector<std::size_t> out(n, 0);
    if (search == NeighborSearch::KdTree) {
        const KdTree tree(points);
        for (std::size_t i = 0; i < n; ++i) out[i] = tree.count_within(i, radii[i]);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && max_norm(points.row(i), points.row(j)) < radii[i]) ++c;
        }
        out[i] = c;
    }
    return out;
}

std::vector<std::vector<std::size_t>> nearest_lists(const Matrix& points, int k, NeighborSearch search) {
    const std::size_t n = points.rows();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw InsufficientSamplesError("k must satisfy 1 <= k <= n");
    std::vector<std::vector<std::size_t>> out(n);
    if (search == NeighborSearch::KdTree) {
        const KdTree tree(points);
        for (std::size_t i = 0; i < n; ++i) out[i] = tree.nearest(i, k);
        return out;
    }
    std::vector<std::pair<double, std::size_t>> cand(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cand[j] = {max_norm(points.row(i), points.row(j)), j};
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        out[i].resize(static_cast<std::size_t>(k));
        for (int m = 0; m < k; ++m) out[i][static_cast<std::size_t>(m)] = cand[static_cast<std::size_t>(m)].second;
    }
    return out;
}

}  // namespace pctmi
