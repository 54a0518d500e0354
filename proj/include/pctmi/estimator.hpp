#pragma once

#include "pctmi/kdtree.hpp"
#include "pctmi/matrix.hpp"

#include <cstddef>
#include <cstdint>

namespace pctmi {

struct KnnParams {
    int k = 10;
    /// Tie-breaking noise, relative to each column's standard deviation.
    double jitter_scale = 1e-10;
    std::uint64_t seed = 0;
    NeighborSearch search = NeighborSearch::KdTree;
    /// Up to this many samples, the distances of the fixed blocks are precomputed as dense matrices.
    /// Results are identical to the tree search; this only trades memory for speed. 0 disables.
    std::size_t dense_limit = 1500;
};

struct PermutationParams {
    int n_permutations = 100;
    /// Size of the Z-space neighbourhood among which x values are swapped in the conditional test.
    int local_neighbors = 5;
    double alpha = 0.05;

    void validate() const;
};

struct PermutationResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// KSG estimate of I(X;Y) in nats under the max norm: psi(k) + psi(n) - <psi(n_x+1) + psi(n_y+1)>.
/// Columns are standardised and jittered first. Not clipped at zero.
double knn_mi(const Matrix& x, const Matrix& y, const KnnParams& params = {});

/// Frenzel-Pompe estimate of I(X;Y|Z) in nats: psi(k) - <psi(n_xz+1) + psi(n_yz+1) - psi(n_z+1)>.
/// A zero-column z falls back to knn_mi.
double knn_cmi(const Matrix& x, const Matrix& y, const Matrix& z, const KnnParams& params = {});

/// Permutation test of X independent of Y (given Z). The unconditional test permutes x rows freely;
/// the conditional one swaps each x only within its local_neighbors nearest rows in Z-space.
/// p_value = (1 + #{b : stat_b >= statistic}) / (1 + B).
PermutationResult permutation_test(const Matrix& x, const Matrix& y, const Matrix& z, const KnnParams& knn = {},
                                   const PermutationParams& perm = {});

/// Standardises every column to zero mean and unit variance, then adds N(0, jitter_scale^2) noise
/// drawn from a stream seeded by the seed and the column's contents.
Matrix prepare_columns(const Matrix& m, double jitter_scale, std::uint64_t seed);

}  // namespace pctmi
