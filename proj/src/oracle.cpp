#include "pctmi/oracle.hpp"

#include "pctmi/errors.hpp"

#include <algorithm>
#include <limits>

namespace pctmi {

DSeparationOracle::DSeparationOracle(SummaryGraph truth) : truth_(std::move(truth)) {
    for (const auto& e : truth_.edges()) {
        if (e.mark == EdgeMark::Undirected) throw InvalidDataError("the oracle needs a fully directed graph");
    }
}

bool DSeparationOracle::d_separated(const std::string& p, const std::string& q,
                                    const std::vector<std::string>& given) const {
    const std::size_t d = truth_.size();
    const std::size_t pi = truth_.index_of(p);
    const std::size_t qi = truth_.index_of(q);
    std::vector<char> in_given(d, 0);
    for (const auto& g : given) in_given[truth_.index_of(g)] = 1;

    // Ancestral set of {p, q} u given.
    std::vector<char> keep(d, 0);
    std::vector<std::size_t> stack{pi, qi};
    for (std::size_t i = 0; i < d; ++i) {
        if (in_given[i]) stack.push_back(i);
    }
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (keep[u]) continue;
        keep[u] = 1;
        for (std::size_t v : truth_.parents(u)) stack.push_back(v);
    }

    // Moralise: link parents to children and co-parents to each other.
    std::vector<std::vector<char>> moral(d, std::vector<char>(d, 0));
    for (std::size_t u = 0; u < d; ++u) {
        if (!keep[u]) continue;
        const auto parents = truth_.parents(u);
        for (std::size_t a : parents) {
            moral[a][u] = moral[u][a] = 1;
            for (std::size_t b : parents) {
                if (a != b) moral[a][b] = 1;
            }
        }
    }

    // p and q are separated iff every path between them in the moral graph meets the given set.
    std::vector<char> seen(d, 0);
    stack = {pi};
    seen[pi] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (u == qi) return false;
        for (std::size_t v = 0; v < d; ++v) {
            if (moral[u][v] && keep[v] && !seen[v] && !in_given[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return true;
}

std::optional<int> DSeparationOracle::lag(std::size_t from, std::size_t to) const {
    // Bellman-Ford style relaxation; the graph is small and acyclic.
    const std::size_t d = truth_.size();
    const int inf = std::numeric_limits<int>::max();
    std::vector<int> dist(d, inf);
    dist[from] = 0;
    for (std::size_t round = 0; round < d; ++round) {
        for (const auto& e : truth_.edges()) {
            const bool forward = e.mark == EdgeMark::Forward;
            const std::size_t u = forward ? e.a : e.b;
            const std::size_t v = forward ? e.b : e.a;
            const int w = truth_.annotation(u, v)->gamma.value_or(1);
            if (dist[u] != inf && dist[u] + w < dist[v]) dist[v] = dist[u] + w;
        }
    }
    if (from == to || dist[to] == inf) return std::nullopt;
    return dist[to];
}

CtmiResult DSeparationOracle::pair(const std::string& p, const std::string& q) const {
    CtmiResult r;
    const bool dependent = !d_separated(p, q, {});
    r.value = dependent ? 1.0 : 0.0;
    r.p_value = dependent ? 0.0 : 1.0;
    const std::size_t pi = truth_.index_of(p);
    const std::size_t qi = truth_.index_of(q);
    if (auto l = lag(pi, qi)) {
        r.gamma_pq = *l;
    } else if (auto l2 = lag(qi, pi)) {
        r.gamma_pq = -*l2;
    } else {
        // Common ancestor with the smallest total lag, ties to the lowest index.
        int best = std::numeric_limits<int>::max();
        for (std::size_t a = 0; a < truth_.size(); ++a) {
            const auto lp = lag(a, pi);
            const auto lq = lag(a, qi);
            if (!lp || !lq || *lp + *lq >= best) continue;
            best = *lp + *lq;
            r.gamma_pq = *lq - *lp;
        }
    }
    return r;
}

CondCtmiResult DSeparationOracle::conditional(const std::string& p, const std::string& q, const CtmiResult& base,
                                              const std::vector<std::string>& conditioners) const {
    CondCtmiResult r;
    r.value = d_separated(p, q, conditioners) ? 0.0 : 1.0;
    r.cond_windows.assign(conditioners.size(), 1);
    r.cond_gaps.assign(conditioners.size(), min_conditioning_gap(base.gamma_pq));
    return r;
}

double DSeparationOracle::conditional_p_value(const std::string& p, const std::string& q, const CtmiResult&,
                                              const std::vector<std::string>& conditioners,
                                              const CondCtmiResult&) const {
    return d_separated(p, q, conditioners) ? 1.0 : 0.0;
}

std::optional<double> DSeparationOracle::collider_p_value(const std::string& p, const std::string& q,
                                                          const std::string& r,
                                                          const std::vector<std::string>& sepset) const {
    auto given = sepset;
    given.push_back(r);
    return d_separated(p, q, given) ? 1.0 : 0.0;
}

}  // namespace pctmi
