#include "pctmi/estimator.hpp"

#include "pctmi/errors.hpp"
#include "pctmi/parallel.hpp"
#include "pctmi/seed.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <limits>
#include <optional>
#include <random>

namespace pctmi {

void PermutationParams::validate() const {
    if (n_permutations < 1) throw InvalidConfigError("the permutation test needs at least one permutation");
    if (local_neighbors < 1) throw InvalidConfigError("local_neighbors must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfigError("alpha must lie in (0, 1)");
}

namespace {

// psi(m) for m = 0..n via psi(m + 1) = psi(m) + 1/m; entry 0 is unused.
std::vector<double> digamma_table(std::size_t n) {
    std::vector<double> t(n + 1, 0.0);
    if (n >= 1) t[1] = -boost::math::constants::euler<double>();
    for (std::size_t m = 1; m < n; ++m) t[m + 1] = t[m] + 1.0 / static_cast<double>(m);
    return t;
}

void check_inputs(const Matrix& x, const Matrix& y, const Matrix* z, int k) {
    const std::size_t n = x.rows();
    if (y.rows() != n || (z != nullptr && z->cols() > 0 && z->rows() != n)) {
        throw InvalidDataError("sample matrices must have equal row counts");
    }
    if (x.cols() == 0 || y.cols() == 0) throw InvalidDataError("x and y need at least one column");
    if (k < 1) throw InvalidConfigError("k must be positive");
    if (n <= static_cast<std::size_t>(k)) {
        throw InsufficientSamplesError("need more than k = " + std::to_string(k) + " samples, got " + std::to_string(n));
    }
    auto finite = [](const Matrix& m) {
        return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
    };
    if (!finite(x) || !finite(y) || (z != nullptr && !finite(*z))) throw InvalidDataError("non-finite sample value");
}

std::uint64_t column_hash(const Matrix& m, std::size_t c) {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (std::size_t r = 0; r < m.rows(); ++r) h = combine_seed(h, std::bit_cast<std::uint64_t>(m(r, c)));
    return h;
}

// Estimator state whose y and z parts are fixed while x is swapped between permutation replicates.
class CmiEvaluator {
public:
    CmiEvaluator(Matrix y, Matrix z, const KnnParams& params)
        : y_(std::move(y)), z_(std::move(z)), params_(params), psi_(digamma_table(y_.rows() + 1)) {
        if (y_.rows() <= params_.dense_limit) {
            build_dense();
            return;
        }
        if (conditional()) {
            yz_ = hconcat({&y_, &z_});
            if (params_.search == NeighborSearch::KdTree) {
                yz_tree_.emplace(yz_);
                z_tree_.emplace(z_);
            }
        } else if (params_.search == NeighborSearch::KdTree) {
            y_tree_.emplace(y_);
        }
    }

    bool conditional() const { return z_.cols() > 0; }
    const Matrix& z() const { return z_; }

    double operator()(const Matrix& x) const {
        if (!dense_yz_.empty()) return dense(x);
        const std::size_t n = x.rows();
        const int k = params_.k;
        const Matrix joint = hconcat({&x, &y_, &z_});
        const std::vector<double> eps = kth_distances(joint, k, params_.search);
        if (!conditional()) {
            const auto nx = counts_within(x, eps, params_.search);
            const auto ny = counts(y_tree_, y_, eps);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += psi_[nx[i] + 1] + psi_[ny[i] + 1];
            return psi_[static_cast<std::size_t>(k)] + psi_[n] - acc / static_cast<double>(n);
        }
        const Matrix xz = hconcat({&x, &z_});
        const auto nxz = counts_within(xz, eps, params_.search);
        const auto nyz = counts(yz_tree_, yz_, eps);
        const auto nz = counts(z_tree_, z_, eps);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += psi_[nxz[i] + 1] + psi_[nyz[i] + 1] - psi_[nz[i] + 1];
        return psi_[static_cast<std::size_t>(k)] - acc / static_cast<double>(n);
    }

private:
    // Pairwise max-norm distances of the y (or y,z) block and of the z block, row-major n x n.
    // Built column by column so the inner loops run over contiguous memory.
    void build_dense() {
        const std::size_t n = y_.rows();
        dense_yz_.assign(n * n, 0.0);
        if (conditional()) dense_z_.assign(n * n, 0.0);
        auto accumulate = [n](const Matrix& m, std::vector<double>& out) {
            std::vector<double> col(n);
            for (std::size_t c = 0; c < m.cols(); ++c) {
                for (std::size_t j = 0; j < n; ++j) col[j] = m(j, c);
                for (std::size_t i = 0; i < n; ++i) {
                    double* row = out.data() + i * n;
                    const double v = col[i];
                    for (std::size_t j = 0; j < n; ++j) row[j] = std::max(row[j], std::abs(col[j] - v));
                }
            }
        };
        if (conditional()) {
            accumulate(z_, dense_z_);
            dense_yz_ = dense_z_;
        }
        accumulate(y_, dense_yz_);
    }

    double dense(const Matrix& x) const {
        const std::size_t n = x.rows();
        const auto k = static_cast<std::size_t>(params_.k);
        std::vector<double> xcols(n * x.cols());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            for (std::size_t j = 0; j < n; ++j) xcols[c * n + j] = x(j, c);
        }
        std::vector<double> dx(n);
        std::vector<double> joint(n);
        std::vector<double> best;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(dx.begin(), dx.end(), 0.0);
            for (std::size_t c = 0; c < x.cols(); ++c) {
                const double* col = xcols.data() + c * n;
                const double v = col[i];
                for (std::size_t j = 0; j < n; ++j) dx[j] = std::max(dx[j], std::abs(col[j] - v));
            }
            const double* yz = dense_yz_.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) joint[j] = std::max(dx[j], yz[j]);

            // k smallest distances to other rows, kept sorted.
            best.assign(k, std::numeric_limits<double>::infinity());
            for (std::size_t j = 0; j < n; ++j) {
                if (joint[j] >= best[k - 1] || j == i) continue;
                std::size_t pos = k - 1;
                while (pos > 0 && best[pos - 1] > joint[j]) {
                    best[pos] = best[pos - 1];
                    --pos;
                }
                best[pos] = joint[j];
            }
            const double eps = best[k - 1];
            // Row i itself has distance 0 in every block; remove it from the counts.
            const std::size_t self = 0.0 < eps ? 1 : 0;
            std::size_t c_x = 0;
            std::size_t c_yz = 0;
            if (!conditional()) {
                for (std::size_t j = 0; j < n; ++j) {
                    c_x += dx[j] < eps;
                    c_yz += yz[j] < eps;
                }
                acc += psi_[c_x - self + 1] + psi_[c_yz - self + 1];
                continue;
            }
            const double* zr = dense_z_.data() + i * n;
            std::size_t c_z = 0;
            for (std::size_t j = 0; j < n; ++j) {
                c_x += std::max(dx[j], zr[j]) < eps;
                c_yz += yz[j] < eps;
                c_z += zr[j] < eps;
            }
            acc += psi_[c_x - self + 1] + psi_[c_yz - self + 1] - psi_[c_z - self + 1];
        }
        if (!conditional()) return psi_[k] + psi_[n] - acc / static_cast<double>(n);
        return psi_[k] - acc / static_cast<double>(n);
    }

    std::vector<std::size_t> counts(const std::optional<KdTree>& tree, const Matrix& m,
                                    const std::vector<double>& eps) const {
        if (!tree) return counts_within(m, eps, NeighborSearch::BruteForce);
        std::vector<std::size_t> out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out[i] = tree->count_within(i, eps[i]);
        return out;
    }

    Matrix y_;
    Matrix z_;
    Matrix yz_;
    KnnParams params_;
    std::vector<double> psi_;
    std::optional<KdTree> y_tree_;
    std::optional<KdTree> yz_tree_;
    std::optional<KdTree> z_tree_;
    std::vector<double> dense_yz_;
    std::vector<double> dense_z_;
};

Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& source) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto src = m.row(source[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

// Restricted shuffle: visit rows in random order and give each the first unused x among its
// shuffled Z-space neighbours, falling back to the last candidate when all are taken.
std::vector<std::size_t> local_permutation(const std::vector<std::vector<std::size_t>>& neighbors, std::mt19937_64& rng) {
    const std::size_t n = neighbors.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> used(n, 0);
    std::vector<std::size_t> out(n);
    std::vector<std::size_t> cand;
    for (std::size_t i : order) {
        cand = neighbors[i];
        std::shuffle(cand.begin(), cand.end(), rng);
        std::size_t m = 0;
        while (used[cand[m]] && m + 1 < cand.size()) ++m;
        out[i] = cand[m];
        used[cand[m]] = 1;
    }
    return out;
}

}  // namespace

Matrix prepare_columns(const Matrix& m, double jitter_scale, std::uint64_t seed) {
    Matrix out(m.rows(), m.cols());
    const auto n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) mean += m(r, c);
        mean /= n;
        double var = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
        const double sd = m.rows() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
        std::mt19937_64 rng(combine_seed(seed, column_hash(m, c)));
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = (m(r, c) - mean) * scale + jitter_scale * noise(rng);
    }
    return out;
}

double knn_mi(const Matrix& x, const Matrix& y, const KnnParams& params) {
    check_inputs(x, y, nullptr, params.k);
    const CmiEvaluator eval(prepare_columns(y, params.jitter_scale, params.seed), Matrix(y.rows(), 0), params);
    return eval(prepare_columns(x, params.jitter_scale, params.seed));
}

double knn_cmi(const Matrix& x, const Matrix& y, const Matrix& z, const KnnParams& params) {
    if (z.cols() == 0) return knn_mi(x, y, params);
    check_inputs(x, y, &z, params.k);
    const CmiEvaluator eval(prepare_columns(y, params.jitter_scale, params.seed),
                            prepare_columns(z, params.jitter_scale, params.seed), params);
    return eval(prepare_columns(x, params.jitter_scale, params.seed));
}

PermutationResult permutation_test(const Matrix& x, const Matrix& y, const Matrix& z, const KnnParams& knn,
                                   const PermutationParams& perm) {
    perm.validate();
    check_inputs(x, y, &z, knn.k);
    const bool conditional = z.cols() > 0;
    const Matrix px = prepare_columns(x, knn.jitter_scale, knn.seed);
    const CmiEvaluator eval(prepare_columns(y, knn.jitter_scale, knn.seed),
                            conditional ? prepare_columns(z, knn.jitter_scale, knn.seed) : Matrix(y.rows(), 0), knn);
    PermutationResult result;
    result.statistic = eval(px);

    std::vector<std::vector<std::size_t>> neighbors;
    const std::size_t n = x.rows();
    if (conditional) {
        const int kp = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(perm.local_neighbors), n));
        neighbors = nearest_lists(eval.z(), kp, knn.search);
    }

    const auto replicates = static_cast<std::size_t>(perm.n_permutations);
    std::vector<double> stats(replicates);
    parallel_for(replicates, [&](std::size_t b) {
        std::mt19937_64 rng(combine_seed(knn.seed ^ 0x5eedc0ffeeULL, static_cast<std::uint64_t>(b)));
        std::vector<std::size_t> source;
        if (conditional) {
            source = local_permutation(neighbors, rng);
        } else {
            source.resize(n);
            std::iota(source.begin(), source.end(), 0);
            std::shuffle(source.begin(), source.end(), rng);
        }
        stats[b] = eval(permute_rows(px, source));
    });
    const auto exceed = std::count_if(stats.begin(), stats.end(), [&](double s) { return s >= result.statistic; });
    result.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(replicates));
    return result;
}

}  // namespace pctmi
