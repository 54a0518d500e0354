#pragma once

#include "pctmi/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pctmi {

/// Strategy for neighbour queries. BruteForce is the O(n^2) reference; both produce identical results.
enum class NeighborSearch { KdTree, BruteForce };

/// Static kd-tree over the rows of a matrix, queried under the supremum (max-norm) distance.
/// Queries are by row index of a point stored in the tree; the point itself is never its own neighbour
/// except where stated.
class KdTree {
public:
    explicit KdTree(const Matrix& points, std::size_t leaf_size = 12);

    std::size_t size() const { return n_; }
    std::size_t dims() const { return dims_; }

    /// Distance from row i to its k-th nearest other row.
    double kth_distance(std::size_t i, int k) const;

    /// Number of rows j != i with distance(i, j) < radius.
    std::size_t count_within(std::size_t i, double radius) const;

    /// The k rows closest to row i, row i included, ordered by (distance, index).
    std::vector<std::size_t> nearest(std::size_t i, int k) const;

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::uint32_t left;  // 0 for leaves
        std::uint32_t right;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<std::uint32_t>& order, const Matrix& points);
    const double* point(std::uint32_t pos) const { return pts_.data() + static_cast<std::size_t>(pos) * dims_; }
    double box_distance(std::uint32_t node, const double* q) const;
    double box_extent(std::uint32_t node, const double* q) const;

    void knn_search(std::uint32_t node, const double* q, std::uint32_t self, std::vector<double>& best, int k) const;
    std::size_t count_search(std::uint32_t node, const double* q, double radius) const;
    void nearest_search(std::uint32_t node, const double* q, std::vector<std::pair<double, std::uint32_t>>& best,
                        int k) const;

    std::size_t n_ = 0;
    std::size_t dims_ = 0;
    std::size_t leaf_size_;
    std::vector<double> pts_;             // rows in tree order
    std::vector<std::uint32_t> perm_;     // tree position -> original row
    std::vector<std::uint32_t> pos_of_;   // original row -> tree position
    std::vector<Node> nodes_;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

/// Max-norm distance between two equally sized points.
inline double max_norm(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] > b[c] ? a[c] - b[c] : b[c] - a[c];
        if (diff > d) d = diff;
    }
    return d;
}

/// k-th nearest-neighbour distance of every row (self excluded).
std::vector<double> kth_distances(const Matrix& points, int k, NeighborSearch search = NeighborSearch::KdTree);

/// For every row i, the number of other rows strictly closer than radii[i].
std::vector<std::size_t> counts_within(const Matrix& points, std::span<const double> radii,
                                       NeighborSearch search = NeighborSearch::KdTree);

/// For every row, its k nearest rows (self included) ordered by (distance, index).
std::vector<std::vector<std::size_t>> nearest_lists(const Matrix& points, int k,
                                                    NeighborSearch search = NeighborSearch::KdTree);

}  // namespace pctmi
