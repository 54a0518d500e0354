#include "pctmi/evaluation.hpp"

#include "pctmi/errors.hpp"
#include "pctmi/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace pctmi {

namespace {

using NamePair = std::pair<std::string, std::string>;

void require_same_nodes(const SummaryGraph& a, const SummaryGraph& b) {
    auto x = a.nodes();
    auto y = b.nodes();
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) throw InvalidDataError("predicted and true graphs have different node sets");
}

Score score_sets(const std::set<NamePair>& pred, const std::set<NamePair>& truth) {
    Score s;
    for (const auto& e : pred) {
        if (truth.count(e)) {
            ++s.true_positives;
        } else {
            ++s.false_positives;
        }
    }
    s.false_negatives = truth.size() - s.true_positives;
    if (pred.empty() && truth.empty()) {
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = pred.empty() ? 0.0 : static_cast<double>(s.true_positives) / static_cast<double>(pred.size());
    s.recall = truth.empty() ? 0.0 : static_cast<double>(s.true_positives) / static_cast<double>(truth.size());
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

std::set<NamePair> unordered_pairs(const SummaryGraph& g) {
    std::set<NamePair> out;
    for (const auto& e : g.edges()) {
        const auto& a = g.nodes()[e.a];
        const auto& b = g.nodes()[e.b];
        out.insert(a < b ? NamePair{a, b} : NamePair{b, a});
    }
    return out;
}

std::set<NamePair> ordered_pairs(const SummaryGraph& g) {
    std::set<NamePair> out;
    for (const auto& [u, v] : g.directed_pairs()) out.insert({g.nodes()[u], g.nodes()[v]});
    return out;
}

std::string describe(const SummaryGraph& g, const std::string& a, const std::string& b) {
    const std::size_t ai = g.index_of(a);
    const std::size_t bi = g.index_of(b);
    if (!g.adjacent(ai, bi)) return "none";
    if (g.has_directed(ai, bi)) return a + "->" + b;
    if (g.has_directed(bi, ai)) return b + "->" + a;
    return "undirected";
}

nlohmann::json score_json(const Score& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"true_positives", s.true_positives},
            {"false_positives", s.false_positives}, {"false_negatives", s.false_negatives}};
}

}  // namespace

Score adjacency_score(const SummaryGraph& pred, const SummaryGraph& truth) {
    require_same_nodes(pred, truth);
    return score_sets(unordered_pairs(pred), unordered_pairs(truth));
}

Score oriented_score(const SummaryGraph& pred, const SummaryGraph& truth) {
    require_same_nodes(pred, truth);
    return score_sets(ordered_pairs(pred), ordered_pairs(truth));
}

double f1_adjacency(const SummaryGraph& pred, const SummaryGraph& truth) { return adjacency_score(pred, truth).f1; }
double f1_oriented(const SummaryGraph& pred, const SummaryGraph& truth) { return oriented_score(pred, truth).f1; }

nlohmann::json EvalReport::to_json() const {
    nlohmann::json doc{{"adjacency", score_json(adjacency)},
                       {"oriented", score_json(oriented)},
                       {"f1_adjacency", adjacency.f1},
                       {"f1_oriented", oriented.f1},
                       {"ci_test_count", ci_test_count},
                       {"edges", nlohmann::json::array()}};
    for (const auto& e : edges) doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"predicted", e.predicted}, {"truth", e.truth}});
    return doc;
}

EvalReport evaluate(const SummaryGraph& pred, const SummaryGraph& truth, std::size_t ci_test_count) {
    EvalReport r;
    r.adjacency = adjacency_score(pred, truth);
    r.oriented = oriented_score(pred, truth);
    r.ci_test_count = ci_test_count;
    auto names = truth.nodes();
    std::sort(names.begin(), names.end());
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            EdgeDetail e{names[i], names[j], describe(pred, names[i], names[j]), describe(truth, names[i], names[j])};
            if (e.predicted != "none" || e.truth != "none") r.edges.push_back(std::move(e));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------------------------

SummaryGraph project_full_graph(const std::vector<LaggedEdge>& full, const std::vector<std::string>& nodes) {
    std::vector<std::string> order = nodes;
    auto note = [&](const std::string& n) {
        if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
    };
    for (const auto& e : full) {
        note(e.src);
        note(e.dst);
    }
    SummaryGraph g(order, false);
    std::set<NamePair> directed;
    for (const auto& e : full) {
        if (e.src == e.dst) {
            if (e.src_offset == e.dst_offset) throw InvalidDataError("series '" + e.src + "' cannot cause itself at the same instant");
            g.set_self_loop(g.index_of(e.src), true);
        } else {
            directed.insert({e.src, e.dst});
        }
    }
    for (const auto& [src, dst] : directed) {
        const std::size_t u = g.index_of(src);
        const std::size_t v = g.index_of(dst);
        if (directed.count({dst, src})) {
            g.add_undirected(u, v);
        } else {
            g.add_directed(u, v);
        }
    }
    return g;
}

std::vector<LaggedEdge> to_lagged_edges(const SummaryGraph& graph) {
    std::vector<LaggedEdge> out;
    const auto& n = graph.nodes();
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (graph.self_loop(i)) out.push_back({n[i], -1, n[i], 0});
    }
    for (const auto& [u, v] : graph.directed_pairs()) out.push_back({n[u], -1, n[v], 0});
    return out;
}

std::vector<LaggedEdge> lagged_edges_from_json(const nlohmann::json& doc, std::vector<std::string>* nodes) {
    try {
        if (nodes) *nodes = doc.value("nodes", std::vector<std::string>{});
        std::vector<LaggedEdge> out;
        for (const auto& e : doc.at("edges")) {
            out.push_back({e.at("src").get<std::string>(), e.value("src_offset", 0), e.at("dst").get<std::string>(),
                           e.value("dst_offset", 0)});
        }
        return out;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed full-graph JSON: ") + ex.what());
    }
}

nlohmann::json lagged_edges_to_json(const std::vector<LaggedEdge>& edges, const std::vector<std::string>& nodes) {
    nlohmann::json doc{{"nodes", nodes}, {"edges", nlohmann::json::array()}};
    for (const auto& e : edges) {
        doc["edges"].push_back({{"src", e.src}, {"src_offset", e.src_offset}, {"dst", e.dst}, {"dst_offset", e.dst_offset}});
    }
    return doc;
}

// ---------------------------------------------------------------------------------------------

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkOptions& options) {
    if (options.n_seeds < 1) throw InvalidConfigError("n_seeds must be >= 1");
    const StructureSpec spec = named_structure(options.structure);
    options.discovery.validate();

    BenchmarkReport report;
    report.structure = options.structure;
    report.n_seeds = options.n_seeds;
    report.seeds.resize(options.n_seeds);
    parallel_for(options.n_seeds, [&](std::size_t i) {
        SeedOutcome& out = report.seeds[i];
        out.seed = options.base_seed + i;
        const auto start = std::chrono::steady_clock::now();
        try {
            GenerativeParams gen = options.generation;
            gen.seed = out.seed;
            GeneratedData g = generate(spec, gen);
            Dataset data = options.keep_every.empty() ? g.data : subsample(g.data, options.keep_every);
            DiscoveryConfig cfg = options.discovery;
            cfg.seed = out.seed;
            DiscoveryResult r = discover(data, cfg);
            out.f1 = f1_adjacency(r.graph, g.truth);
            out.f1_oriented = f1_oriented(r.graph, g.truth);
            out.ci_tests = r.budget.ci_tests_performed;
            out.ci_bound = r.budget.bound();
            out.predicted = r.graph;
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    std::vector<double> f1;
    std::vector<double> f1o;
    std::vector<double> tests;
    for (const auto& s : report.seeds) {
        if (!s.ok) {
            ++report.n_failed;
            continue;
        }
        f1.push_back(s.f1);
        f1o.push_back(s.f1_oriented);
        tests.push_back(static_cast<double>(s.ci_tests));
    }
    std::tie(report.f1_mean, report.f1_sd) = mean_sd(f1);
    std::tie(report.f1_oriented_mean, report.f1_oriented_sd) = mean_sd(f1o);
    report.ci_tests_mean = mean_sd(tests).first;
    return report;
}

nlohmann::json BenchmarkReport::to_json() const {
    nlohmann::json doc{{"structure", structure},
                       {"n_seeds", n_seeds},
                       {"n_failed", n_failed},
                       {"f1_mean", f1_mean},
                       {"f1_sd", f1_sd},
                       {"f1_oriented_mean", f1_oriented_mean},
                       {"f1_oriented_sd", f1_oriented_sd},
                       {"ci_tests_mean", ci_tests_mean},
                       {"seeds", nlohmann::json::array()}};
    for (const auto& s : seeds) {
        nlohmann::json e{{"seed", s.seed},     {"ok", s.ok},        {"f1", s.f1}, {"f1_oriented", s.f1_oriented},
                         {"ci_tests", s.ci_tests}, {"ci_bound", s.ci_bound}, {"seconds", s.seconds}};
        if (!s.ok) e["error"] = s.error;
        if (s.ok) e["graph"] = graph_to_json(s.predicted);
        doc["seeds"].push_back(std::move(e));
    }
    return doc;
}

std::string BenchmarkReport::table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << "structure " << structure << ", " << n_seeds << " seeds";
    if (n_failed) out << " (" << n_failed << " failed)";
    out << "\n";
    out << "  seed     F1    F1->  tests  bound  seconds\n";
    for (const auto& s : seeds) {
        out << "  " << std::setw(4) << s.seed << "  ";
        if (!s.ok) {
            out << "failed: " << s.error << "\n";
            continue;
        }
        out << std::setw(5) << s.f1 << "  " << std::setw(5) << s.f1_oriented << "  " << std::setw(5) << s.ci_tests << "  "
            << std::setw(5) << std::setprecision(0) << s.ci_bound << std::setprecision(3) << "  " << std::setw(7)
            << std::setprecision(1) << s.seconds << std::setprecision(3) << "\n";
    }
    out << "  F1    " << f1_mean << " +/- " << f1_sd << "\n";
    out << "  F1->  " << f1_oriented_mean << " +/- " << f1_oriented_sd << "\n";
    out << "  tests " << std::setprecision(1) << ci_tests_mean << " on average\n";
    return out.str();
}

}  // namespace pctmi
