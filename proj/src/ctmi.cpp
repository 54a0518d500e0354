#include "pctmi/ctmi.hpp"

#include "pctmi/errors.hpp"
#include "pctmi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace pctmi {

CtmiResult CtmiResult::reversed() const {
    CtmiResult r = *this;
    r.lambda_pq = lambda_qp;
    r.lambda_qp = lambda_pq;
    r.gamma_pq = -gamma_pq;
    return r;
}

double evaluate_config(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config, const KnnParams& knn,
                       std::size_t min_samples) {
    const auto s = build_joint_samples(p, q, config, {}, {true, min_samples});
    return knn_cmi(s.x_rows, s.y_rows, s.z_rows, knn);
}

namespace {

constexpr double kTieTolerance = 1e-12;

// True when a should be preferred over b among near-equal estimates.
bool more_parsimonious(const WindowConfig& a, const WindowConfig& b) {
    const int sa = a.lambda_pq + a.lambda_qp;
    const int sb = b.lambda_pq + b.lambda_qp;
    if (sa != sb) return sa < sb;
    if (std::abs(a.gamma) != std::abs(b.gamma)) return std::abs(a.gamma) < std::abs(b.gamma);
    if (a.gamma != b.gamma) return a.gamma > b.gamma;
    return a.lambda_pq < b.lambda_pq;
}

CtmiResult ctmi_ordered(const TimeSeries& p, const TimeSeries& q, const SearchBounds& bounds, const KnnParams& knn,
                        const std::optional<PermutationParams>& perm) {
    const auto configs = compatible_configs(p, q, bounds.lambda_max, bounds.gamma_max, bounds.min_samples);
    std::vector<double> values(configs.size(), -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> rows(configs.size(), 0);
    parallel_for(configs.size(), [&](std::size_t i) {
        const auto s = build_joint_samples(p, q, configs[i], {}, {true, bounds.min_samples});
        if (s.n_eff <= static_cast<std::size_t>(knn.k)) return;
        values[i] = knn_cmi(s.x_rows, s.y_rows, s.z_rows, knn);
        rows[i] = s.n_eff;
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < configs.size(); ++i) {
        if (values[i] > values[best] + kTieTolerance) {
            best = i;
        } else if (std::abs(values[i] - values[best]) <= kTieTolerance && more_parsimonious(configs[i], configs[best])) {
            best = i;
        }
    }
    if (rows[best] == 0) throw NoCompatibleConfigError("series '" + p.name + "' and '" + q.name + "' cannot be compared");

    CtmiResult out;
    out.value = values[best];
    out.lambda_pq = configs[best].lambda_pq;
    out.lambda_qp = configs[best].lambda_qp;
    out.gamma_pq = configs[best].gamma;
    out.n_eff = rows[best];
    if (perm) {
        const auto s = build_joint_samples(p, q, configs[best], {}, {true, bounds.min_samples});
        out.p_value = permutation_test(s.x_rows, s.y_rows, s.z_rows, knn, *perm).p_value;
    }
    return out;
}

}  // namespace

CtmiResult ctmi(const TimeSeries& p, const TimeSeries& q, const SearchBounds& bounds, const KnnParams& knn,
                const std::optional<PermutationParams>& perm) {
    if (perm) perm->validate();
    if (q.name < p.name) return ctmi_ordered(q, p, bounds, knn, perm).reversed();
    return ctmi_ordered(p, q, bounds, knn, perm);
}

int min_conditioning_gap(int gamma) {
    const int sgn = (gamma > 0) - (gamma < 0);
    return std::max(1, sgn * std::abs(gamma + 1));
}

JointSampleSet conditional_samples(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                                   const std::vector<Conditioner>& conditioners, std::size_t min_samples) {
    return build_joint_samples(p, q, base.config(), conditioners, {true, min_samples});
}

namespace {

struct CondPoint {
    std::vector<Conditioner> conds;
    double value = std::numeric_limits<double>::infinity();
    std::size_t n_eff = 0;
};

// Search in the orientation where the pair's gap is non-negative (name order when it is zero).
CondCtmiResult cond_ctmi_forward(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                                 std::vector<const TimeSeries*> conditioners, const SearchBounds& bounds,
                                 const KnnParams& knn, const std::optional<PermutationParams>& perm) {
    std::sort(conditioners.begin(), conditioners.end(),
              [](const TimeSeries* a, const TimeSeries* b) { return a->name < b->name; });
    const int lower = min_conditioning_gap(base.gamma_pq);
    if (lower > bounds.gamma_max) {
        throw InfeasibleConditioningError("no conditioning gap >= " + std::to_string(lower) + " within gamma_max for '" +
                                          p.name + "' and '" + q.name + "'");
    }

    auto evaluate = [&](const std::vector<Conditioner>& conds) -> std::pair<double, std::size_t> {
        try {
            const auto s = conditional_samples(p, q, base, conds, bounds.min_samples);
            if (s.n_eff <= static_cast<std::size_t>(knn.k)) return {std::numeric_limits<double>::infinity(), 0};
            return {knn_cmi(s.x_rows, s.y_rows, s.z_rows, knn), s.n_eff};
        } catch (const InvalidWindowError&) {
        } catch (const AlignmentError&) {
        } catch (const InsufficientSamplesError&) {
        }
        return {std::numeric_limits<double>::infinity(), 0};
    };

    CondPoint current;
    for (const TimeSeries* r : conditioners) current.conds.push_back({r, 1, lower});

    // Grid of one conditioner's (window, gap), window-major, smallest first.
    std::vector<std::pair<int, int>> grid;
    for (int w = 1; w <= bounds.lambda_max; ++w) {
        for (int g = lower; g <= bounds.gamma_max; ++g) grid.emplace_back(w, g);
    }

    const int sweeps = conditioners.size() > 1 ? 2 : 1;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t k = 0; k < conditioners.size(); ++k) {
            std::vector<std::pair<double, std::size_t>> results(grid.size());
            parallel_for(grid.size(), [&](std::size_t i) {
                auto conds = current.conds;
                conds[k].window = grid[i].first;
                conds[k].gap = grid[i].second;
                results[i] = evaluate(conds);
            });
            std::size_t best = grid.size();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (results[i].second == 0) continue;
                if (best == grid.size() || results[i].first < results[best].first - kTieTolerance) best = i;
            }
            if (best == grid.size()) continue;
            if (results[best].first < current.value - kTieTolerance || current.n_eff == 0) {
                current.conds[k].window = grid[best].first;
                current.conds[k].gap = grid[best].second;
                current.value = results[best].first;
                current.n_eff = results[best].second;
            }
        }
    }
    if (current.n_eff == 0) {
        throw InfeasibleConditioningError("no feasible conditioning configuration for '" + p.name + "' and '" + q.name + "'");
    }

    CondCtmiResult out;
    out.value = current.value;
    out.n_eff = current.n_eff;
    for (const auto& c : current.conds) {
        out.cond_gaps.push_back(c.gap);
        out.cond_windows.push_back(c.window);
    }
    if (perm) {
        const auto s = conditional_samples(p, q, base, current.conds, bounds.min_samples);
        out.p_value = permutation_test(s.x_rows, s.y_rows, s.z_rows, knn, *perm).p_value;
    }
    return out;
}

}  // namespace

CondCtmiResult cond_ctmi(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                         const std::vector<const TimeSeries*>& conditioners, const SearchBounds& bounds,
                         const KnnParams& knn, const std::optional<PermutationParams>& perm) {
    if (conditioners.empty()) throw InvalidConfigError("cond_ctmi needs at least one conditioner");
    if (perm) perm->validate();
    const bool swap = base.gamma_pq < 0 || (base.gamma_pq == 0 && q.name < p.name);
    CondCtmiResult r = swap ? cond_ctmi_forward(q, p, base.reversed(), conditioners, bounds, knn, perm)
                            : cond_ctmi_forward(p, q, base, conditioners, bounds, knn, perm);

    // cond_ctmi_forward reports conditioners sorted by name; restore the caller's order and,
    // after a swap, re-express gaps relative to p's window: Gamma_p = Gamma_q - gamma_pq.
    std::vector<const TimeSeries*> sorted = conditioners;
    std::sort(sorted.begin(), sorted.end(), [](const TimeSeries* a, const TimeSeries* b) { return a->name < b->name; });
    CondCtmiResult out = r;
    for (std::size_t i = 0; i < conditioners.size(); ++i) {
        const auto pos = static_cast<std::size_t>(std::find(sorted.begin(), sorted.end(), conditioners[i]) - sorted.begin());
        out.cond_windows[i] = r.cond_windows[pos];
        out.cond_gaps[i] = swap ? r.cond_gaps[pos] - base.gamma_pq : r.cond_gaps[pos];
    }
    return out;
}

double cond_ctmi_p_value(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                         const std::vector<const TimeSeries*>& conditioners, const CondCtmiResult& optimum,
                         const SearchBounds& bounds, const KnnParams& knn, const PermutationParams& perm) {
    perm.validate();
    if (optimum.cond_gaps.size() != conditioners.size() || optimum.cond_windows.size() != conditioners.size()) {
        throw InvalidConfigError("optimum does not match the conditioners");
    }
    const bool swap = base.gamma_pq < 0 || (base.gamma_pq == 0 && q.name < p.name);
    std::vector<Conditioner> conds;
    for (std::size_t i = 0; i < conditioners.size(); ++i) {
        conds.push_back({conditioners[i], optimum.cond_windows[i],
                         swap ? optimum.cond_gaps[i] + base.gamma_pq : optimum.cond_gaps[i]});
    }
    const auto s = swap ? conditional_samples(q, p, base.reversed(), conds, bounds.min_samples)
                        : conditional_samples(p, q, base, conds, bounds.min_samples);
    return permutation_test(s.x_rows, s.y_rows, s.z_rows, knn, perm).p_value;
}

}  // namespace pctmi
