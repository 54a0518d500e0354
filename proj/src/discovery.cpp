#include "pctmi/discovery.hpp"

#include "pctmi/errors.hpp"
#include "pctmi/parallel.hpp"
#include "pctmi/seed.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pctmi {

void DiscoveryConfig::validate() const {
    if (bounds.lambda_max < 1 || bounds.gamma_max < 1) throw InvalidConfigError("window and lag bounds must be >= 1");
    if (!(alpha > 0 && alpha < 1)) throw InvalidConfigError("alpha must lie in (0, 1)");
    if (knn.k < 1) throw InvalidConfigError("k must be >= 1");
    perm.validate();
}

void CtmiCache::put(const std::string& p, const std::string& q, const CtmiResult& r) {
    if (p < q) {
        table_[{p, q}] = r;
    } else {
        table_[{q, p}] = r.reversed();
    }
}

bool CtmiCache::contains(const std::string& p, const std::string& q) const {
    return table_.count(p < q ? std::pair{p, q} : std::pair{q, p}) > 0;
}

CtmiResult CtmiCache::get(const std::string& p, const std::string& q) const {
    return p < q ? table_.at({p, q}) : table_.at({q, p}).reversed();
}

// ---------------------------------------------------------------------------------------------

CtmiTester::CtmiTester(const Dataset& data, DiscoveryConfig cfg) : data_(data), cfg_(std::move(cfg)) {
    data_.validate();
    cfg_.validate();
}

const TimeSeries& CtmiTester::series(const std::string& name) const { return data_[data_.index_of(name)]; }

std::vector<const TimeSeries*> CtmiTester::lookup(const std::vector<std::string>& names) const {
    std::vector<const TimeSeries*> out;
    for (const auto& n : names) out.push_back(&series(n));
    return out;
}

KnnParams CtmiTester::knn_for(const std::string& p, const std::string& q, const std::vector<std::string>& extra) const {
    auto sorted = extra;
    std::sort(sorted.begin(), sorted.end());
    std::string key = std::min(p, q) + "|" + std::max(p, q);
    for (const auto& s : sorted) key += "|" + s;
    KnnParams k = cfg_.knn;
    k.seed = combine_seed(cfg_.seed, std::string_view(key));
    return k;
}

CtmiResult CtmiTester::pair(const std::string& p, const std::string& q) const {
    return ctmi(series(p), series(q), cfg_.bounds, knn_for(p, q, {}), cfg_.perm);
}

CondCtmiResult CtmiTester::conditional(const std::string& p, const std::string& q, const CtmiResult& base,
                                       const std::vector<std::string>& conditioners) const {
    return cond_ctmi(series(p), series(q), base, lookup(conditioners), cfg_.bounds, knn_for(p, q, conditioners));
}

double CtmiTester::conditional_p_value(const std::string& p, const std::string& q, const CtmiResult& base,
                                       const std::vector<std::string>& conditioners,
                                       const CondCtmiResult& optimum) const {
    return cond_ctmi_p_value(series(p), series(q), base, lookup(conditioners), optimum, cfg_.bounds,
                             knn_for(p, q, conditioners), cfg_.perm);
}

std::optional<double> CtmiTester::collider_p_value(const std::string& p, const std::string& q, const std::string& r,
                                                   const std::vector<std::string>& sepset) const {
    const std::string& a = std::min(p, q);
    const std::string& b = std::max(p, q);
    std::vector<std::string> names{r};
    names.insert(names.end(), sepset.begin(), sepset.end());
    std::sort(names.begin(), names.end());
    std::vector<Conditioner> conds;
    for (const auto& n : names) conds.push_back({&series(n), 1, 0});
    try {
        const auto s = build_joint_samples(series(a), series(b), {1, 1, 0}, conds, {false, cfg_.bounds.min_samples});
        auto knn = knn_for(a, b, names);
        knn.seed = combine_seed(knn.seed, std::string_view("collider"));
        return permutation_test(s.x_rows, s.y_rows, s.z_rows, knn, cfg_.perm).p_value;
    } catch (const AlignmentError&) {
    } catch (const InsufficientSamplesError&) {
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------------------------

double TestBudgetCounter::bound() const {
    const double k = static_cast<double>(std::max<std::size_t>(kappa, 1));
    const double dd = static_cast<double>(d);
    return dd * dd * std::pow(dd - 1, k - 1) / std::tgamma(k);
}

void TestBudgetCounter::check() const {
    if (!within_bound()) {
        throw std::logic_error("ran " + std::to_string(ci_tests_performed) + " independence tests, above the bound " +
                               std::to_string(bound()));
    }
}

namespace {

EdgeAnnotation annotation_of(const CtmiResult& r) {
    EdgeAnnotation a;
    a.gamma = r.gamma_pq;
    a.lambda_a = r.lambda_pq;
    a.lambda_b = r.lambda_qp;
    a.ctmi = r.value;
    a.p_value = r.p_value;
    return a;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return "{" + out + "}";
}

// All size-n subsets of items (already sorted), in lexicographic order.
std::vector<std::vector<std::string>> subsets(const std::vector<std::string>& items, std::size_t n) {
    std::vector<std::vector<std::string>> out;
    if (n > items.size()) return out;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        std::vector<std::string> s;
        for (auto i : idx) s.push_back(items[i]);
        out.push_back(std::move(s));
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == items.size() - n + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::vector<std::string> neighbor_names(const SummaryGraph& g, std::size_t u) {
    std::vector<std::string> out;
    for (auto v : g.neighbors(u)) out.push_back(g.nodes()[v]);
    return out;
}

bool contains_all(const std::vector<std::string>& set, const std::vector<std::string>& items) {
    return std::all_of(items.begin(), items.end(),
                       [&](const std::string& s) { return std::find(set.begin(), set.end(), s) != set.end(); });
}

struct Candidate {
    std::string a;
    std::string b;
    std::vector<std::string> cond;
    CondCtmiResult estimate;
    bool feasible = false;
};

}  // namespace

SkeletonResult build_skeleton(const std::vector<std::string>& input_names, const CiTester& tester,
                              const DiscoveryConfig& cfg) {
    cfg.validate();
    auto names = input_names;
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) throw InvalidDataError("duplicate series names");
    if (names.size() < 2) throw InvalidDataError("discovery needs at least two series");

    SkeletonResult out;
    out.graph = SummaryGraph(names, true);
    out.budget.d = names.size();
    const std::size_t d = names.size();

    // Level 0: unconditional CTMI on every pair.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
    }
    std::vector<std::optional<CtmiResult>> level0(pairs.size());
    std::vector<std::string> failures(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
        try {
            level0[k] = tester.pair(names[pairs[k].first], names[pairs[k].second]);
        } catch (const NoCompatibleConfigError& e) {
            failures[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& a = names[pairs[k].first];
        const auto& b = names[pairs[k].second];
        if (!level0[k]) {
            out.report.untested.emplace_back(a, b);
            out.report.warnings.push_back("pair " + a + "-" + b + " untested: " + failures[k]);
            continue;
        }
        const CtmiResult& r = *level0[k];
        ++out.budget.ci_tests_performed;
        out.cache.put(a, b, r);
        const double pv = r.p_value.value_or(0.0);
        const bool independent = pv > cfg.alpha;
        out.report.tests.push_back({a, b, {}, r.value, pv, independent});
        if (independent) {
            out.sepsets.set(a, b, {});
        } else {
            out.graph.add_undirected(pairs[k].first, pairs[k].second, annotation_of(r));
        }
    }

    auto admissible = [&](const std::string& p, const std::string& q, const std::vector<std::string>& cond) {
        for (const auto& r : cond) {
            if (!out.cache.contains(r, p) || !out.cache.contains(r, q)) return false;
            if (out.cache.get(r, p).gamma_pq < 0 && out.cache.get(r, q).gamma_pq < 0) return false;
        }
        return true;
    };

    for (std::size_t level = 1; level + 1 < d; ++level) {
        // Plan on a frozen snapshot of the adjacencies.
        std::vector<std::vector<std::string>> adj(d);
        bool any = false;
        for (std::size_t u = 0; u < d; ++u) {
            adj[u] = neighbor_names(out.graph, u);
            any = any || adj[u].size() >= level + 1;
        }
        if (!any) break;

        std::set<std::tuple<std::string, std::string, std::vector<std::string>>> planned;
        for (std::size_t qi = 0; qi < d; ++qi) {
            if (adj[qi].size() < level + 1) continue;
            const std::string& q = names[qi];
            for (const auto& p : adj[qi]) {
                std::vector<std::string> others;
                for (const auto& s : adj[qi]) {
                    if (s != p) others.push_back(s);
                }
                for (auto& cond : subsets(others, level)) {
                    if (!admissible(p, q, cond)) continue;
                    planned.emplace(std::min(p, q), std::max(p, q), std::move(cond));
                }
            }
        }

        std::vector<Candidate> cands;
        for (const auto& [a, b, cond] : planned) cands.push_back({a, b, cond, {}, false});
        std::vector<std::string> errors(cands.size());
        parallel_for(cands.size(), [&](std::size_t i) {
            auto& c = cands[i];
            try {
                c.estimate = tester.conditional(c.a, c.b, out.cache.get(c.a, c.b), c.cond);
                c.feasible = true;
            } catch (const InfeasibleConditioningError& e) {
                errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (!cands[i].feasible) {
                out.report.warnings.push_back("skipped " + cands[i].a + "-" + cands[i].b + " | " + join(cands[i].cond) +
                                              ": " + errors[i]);
            }
        }
        std::erase_if(cands, [](const Candidate& c) { return !c.feasible; });
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
            return std::tie(x.estimate.value, x.a, x.b, x.cond) < std::tie(y.estimate.value, y.a, y.b, y.cond);
        });

        for (const auto& c : cands) {
            const std::size_t ai = out.graph.index_of(c.a);
            const std::size_t bi = out.graph.index_of(c.b);
            if (!out.graph.adjacent(ai, bi)) continue;
            if (!contains_all(neighbor_names(out.graph, ai), c.cond) && !contains_all(neighbor_names(out.graph, bi), c.cond)) {
                continue;
            }
            const CtmiResult base = out.cache.get(c.a, c.b);
            const double pv = tester.conditional_p_value(c.a, c.b, base, c.cond, c.estimate);
            ++out.budget.ci_tests_performed;
            const bool independent = pv > cfg.alpha;
            out.report.tests.push_back({c.a, c.b, c.cond, c.estimate.value, pv, independent});
            if (independent) {
                out.graph.remove(ai, bi);
                out.sepsets.set(c.a, c.b, c.cond);
            }
        }
    }

    out.budget.kappa = std::max<std::size_t>(1, out.graph.max_degree());
    out.budget.check();
    return out;
}

SkeletonResult build_skeleton(const Dataset& data, const DiscoveryConfig& cfg) {
    CtmiTester tester(data, cfg);
    return build_skeleton(data.names(), tester, cfg);
}

// ---------------------------------------------------------------------------------------------

namespace {

// Orients from -> to unless that contradicts an existing orientation or closes a directed cycle.
bool try_orient(SummaryGraph& g, std::size_t from, std::size_t to, const char* rule, DiscoveryReport* report) {
    if (g.has_directed(from, to)) return false;
    const auto& n = g.nodes();
    if (g.has_directed(to, from)) {
        if (report) report->warnings.push_back(std::string(rule) + ": kept " + n[to] + "->" + n[from] + " over " + n[from] + "->" + n[to]);
        return false;
    }
    if (g.has_directed_path(to, from)) {
        if (report) report->warnings.push_back(std::string(rule) + ": " + n[from] + "->" + n[to] + " would close a cycle");
        return false;
    }
    return g.orient(from, to);
}

}  // namespace

void apply_er_rules(SummaryGraph& g, const CtmiCache& cache, DiscoveryReport* report) {
    const auto& n = g.nodes();
    for (const auto& e : g.edges()) {
        if (e.mark != EdgeMark::Undirected) continue;
        const CtmiResult r = cache.get(n[e.a], n[e.b]);
        if (r.gamma_pq > 0) {
            try_orient(g, e.a, e.b, "gap rule", report);
        } else if (r.gamma_pq < 0) {
            try_orient(g, e.b, e.a, "gap rule", report);
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g.edges()) {
            if (e.mark != EdgeMark::Undirected) continue;
            const CtmiResult r = cache.get(n[e.a], n[e.b]);
            if (r.gamma_pq != 0 || r.lambda_pq == r.lambda_qp) continue;
            const bool forward = r.lambda_pq < r.lambda_qp;
            const std::size_t p = forward ? e.a : e.b;
            const std::size_t q = forward ? e.b : e.a;
            const int lambda_p = std::min(r.lambda_pq, r.lambda_qp);
            bool ok = true;
            for (std::size_t c : g.parents(p)) {
                if (!g.has_directed(c, q)) continue;
                if (!(cache.get(n[c], n[p]).gamma_pq < lambda_p && cache.get(n[c], n[q]).gamma_pq < lambda_p)) ok = false;
            }
            if (ok && try_orient(g, p, q, "window rule", report)) changed = true;
        }
    }
}

bool collider_test(const Dataset& data, const std::string& p, const std::string& q, const std::string& r,
                   const SepsetTable& sepsets, const DiscoveryConfig& cfg) {
    if (!sepsets.contains(p, q) || sepsets.in_sepset(p, q, r)) return false;
    CtmiTester tester(data, cfg);
    const auto pv = tester.collider_p_value(p, q, r, sepsets.get(p, q));
    return pv && *pv <= cfg.alpha;
}

void apply_pc_rules(SummaryGraph& g, const SepsetTable& sepsets, const CiTester& tester, const DiscoveryConfig& cfg,
                    DiscoveryReport* report) {
    const auto& n = g.nodes();
    const std::size_t d = g.size();

    // Rule 0: tested unshielded colliders.
    for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = p + 1; q < d; ++q) {
            if (g.adjacent(p, q) || !sepsets.contains(n[p], n[q])) continue;
            for (std::size_t r = 0; r < d; ++r) {
                if (!g.adjacent(p, r) || !g.adjacent(q, r) || sepsets.in_sepset(n[p], n[q], n[r])) continue;
                const auto pv = tester.collider_p_value(n[p], n[q], n[r], sepsets.get(n[p], n[q]));
                if (report) ++report->collider_tests;
                if (!pv) {
                    if (report) report->warnings.push_back("collider test " + n[p] + "-" + n[r] + "-" + n[q] + " skipped: too few samples");
                    continue;
                }
                if (*pv > cfg.alpha) continue;
                try_orient(g, p, r, "collider rule", report);
                try_orient(g, q, r, "collider rule", report);
            }
        }
    }

    // Rules 1-3 until nothing changes.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t p : g.parents(r)) {
                for (std::size_t q : g.neighbors(r)) {
                    if (q == p || !g.is_undirected(r, q) || g.adjacent(p, q)) continue;
                    if (!sepsets.in_sepset(n[p], n[q], n[r])) continue;
                    changed |= try_orient(g, r, q, "rule 1", report);
                }
            }
        }
        for (const auto& e : g.edges()) {
            if (e.mark != EdgeMark::Undirected) continue;
            if (g.has_directed_path(e.a, e.b)) {
                changed |= try_orient(g, e.a, e.b, "rule 2", report);
            } else if (g.has_directed_path(e.b, e.a)) {
                changed |= try_orient(g, e.b, e.a, "rule 2", report);
            }
        }
        for (std::size_t r = 0; r < d; ++r) {
            const auto parents = g.parents(r);
            for (std::size_t s : g.neighbors(r)) {
                if (!g.is_undirected(s, r)) continue;
                bool fire = false;
                for (std::size_t i = 0; i < parents.size() && !fire; ++i) {
                    for (std::size_t j = i + 1; j < parents.size() && !fire; ++j) {
                        const std::size_t p = parents[i];
                        const std::size_t q = parents[j];
                        fire = !g.adjacent(p, q) && g.is_undirected(p, s) && g.is_undirected(q, s);
                    }
                }
                if (fire) changed |= try_orient(g, s, r, "rule 3", report);
            }
        }
    }
}

DiscoveryResult discover(const std::vector<std::string>& names, const CiTester& tester, const DiscoveryConfig& cfg) {
    SkeletonResult skel = build_skeleton(names, tester, cfg);
    apply_er_rules(skel.graph, skel.cache, &skel.report);
    apply_pc_rules(skel.graph, skel.sepsets, tester, cfg, &skel.report);

    DiscoveryResult out;
    out.graph = skel.graph.reordered(names);
    for (std::size_t i = 0; i < out.graph.size(); ++i) out.graph.set_self_loop(i, true);
    out.sepsets = std::move(skel.sepsets);
    out.budget = skel.budget;
    out.report = std::move(skel.report);
    return out;
}

DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& cfg) {
    data.validate();
    if (data.size() < 2) throw InvalidDataError("discovery needs at least two series");
    CtmiTester tester(data, cfg);
    return discover(data.names(), tester, cfg);
}

}  // namespace pctmi
