#include "pctmi/kdtree.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pctmi;

namespace {

Matrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, bool discrete) {
    Matrix m(n, d);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> u(0, 4);
    for (auto& v : m.data()) v = discrete ? u(rng) : g(rng);
    return m;
}

}  // namespace

TEST(KdTree, MatchesBruteForceOnRandomData) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 20 + rng() % 300;
        const std::size_t d = 1 + rng() % 8;
        const Matrix pts = random_points(rng, n, d, trial % 3 == 0);
        const int k = 1 + static_cast<int>(rng() % 10);
        const auto eps_tree = kth_distances(pts, k, NeighborSearch::KdTree);
        const auto eps_brute = kth_distances(pts, k, NeighborSearch::BruteForce);
        ASSERT_EQ(eps_tree, eps_brute);
        EXPECT_EQ(counts_within(pts, eps_tree, NeighborSearch::KdTree), counts_within(pts, eps_tree, NeighborSearch::BruteForce));
        const int kn = 1 + static_cast<int>(rng() % 6);
        EXPECT_EQ(nearest_lists(pts, kn, NeighborSearch::KdTree), nearest_lists(pts, kn, NeighborSearch::BruteForce));
    }
}

TEST(KdTree, HandBuiltLine) {
    Matrix pts(5, 1);
    for (std::size_t i = 0; i < 5; ++i) pts(i, 0) = static_cast<double>(i * i);  // 0 1 4 9 16
    const KdTree tree(pts, 1);
    EXPECT_EQ(tree.kth_distance(0, 1), 1.0);
    EXPECT_EQ(tree.kth_distance(0, 2), 4.0);
    EXPECT_EQ(tree.kth_distance(2, 1), 3.0);
    EXPECT_EQ(tree.count_within(2, 5.0), 2u);  // 0 and 1; 9 sits exactly at 5
    EXPECT_EQ(tree.count_within(2, 3.0), 0u);  // strict: 1 is at exactly 3
    EXPECT_EQ(tree.nearest(2, 2), (std::vector<std::size_t>{2, 1}));
}

TEST(KdTree, TiesBreakByIndex) {
    Matrix pts(4, 1);
    pts(0, 0) = 0;
    pts(1, 0) = 1;
    pts(2, 0) = -1;
    pts(3, 0) = 5;
    const KdTree tree(pts, 1);
    EXPECT_EQ(tree.nearest(0, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(MaxNorm, Basic) {
    const std::vector<double> a{0, 3, -2};
    const std::vector<double> b{1, 1, 2};
    EXPECT_EQ(max_norm(a, b), 4.0);
    EXPECT_EQ(max_norm(a, a), 0.0);
}
