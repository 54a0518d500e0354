#pragma once

#include "pctmi/datagen.hpp"
#include "pctmi/discovery.hpp"
#include "pctmi/graph.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pctmi {

struct Score {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;  ///< 0 when precision and recall are both 0; 1 when both graphs are empty
};

/// Unordered cross pairs; marks and self-loops are ignored. Throws InvalidDataError when the node
/// sets differ.
Score adjacency_score(const SummaryGraph& pred, const SummaryGraph& truth);
/// Ordered cross pairs; an undirected predicted edge counts as a prediction in both directions.
Score oriented_score(const SummaryGraph& pred, const SummaryGraph& truth);

double f1_adjacency(const SummaryGraph& pred, const SummaryGraph& truth);
double f1_oriented(const SummaryGraph& pred, const SummaryGraph& truth);

struct EdgeDetail {
    std::string a;  ///< a < b by name
    std::string b;
    std::string predicted;  ///< "none", "a->b", "b->a" or "undirected", with names substituted
    std::string truth;
};

struct EvalReport {
    Score adjacency;
    Score oriented;
    std::size_t ci_test_count = 0;
    std::vector<EdgeDetail> edges;

    nlohmann::json to_json() const;
};

EvalReport evaluate(const SummaryGraph& pred, const SummaryGraph& truth, std::size_t ci_test_count = 0);

/// Edge X^(src)_{t+src_offset} -> X^(dst)_{t+dst_offset} of a full time graph.
struct LaggedEdge {
    std::string src;
    int src_offset = 0;
    std::string dst;
    int dst_offset = 0;
};

/// A summary edge p -> q wherever some lagged edge runs from p to q; same-series edges become
/// self-loops. When both directions occur the pair is kept as an undirected edge. Nodes are the
/// given ones followed by any other name seen in the edges, in order of appearance.
/// Throws InvalidDataError for a same-series edge with equal offsets.
SummaryGraph project_full_graph(const std::vector<LaggedEdge>& full, const std::vector<std::string>& nodes = {});

/// Inverse encoding: every directed edge as (p, -1) -> (q, 0), undirected edges in both directions.
std::vector<LaggedEdge> to_lagged_edges(const SummaryGraph& graph);

/// {"nodes": [...], "edges": [{"src","src_offset","dst","dst_offset"}]}. Throw ParseError.
std::vector<LaggedEdge> lagged_edges_from_json(const nlohmann::json& doc, std::vector<std::string>* nodes = nullptr);
nlohmann::json lagged_edges_to_json(const std::vector<LaggedEdge>& edges, const std::vector<std::string>& nodes);

struct BenchmarkOptions {
    std::string structure = "fork";
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 0;
    GenerativeParams generation;
    DiscoveryConfig discovery;
    /// Per-series decimation factors; empty keeps equal rates.
    std::vector<std::size_t> keep_every;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double f1 = 0.0;
    double f1_oriented = 0.0;
    std::size_t ci_tests = 0;
    double ci_bound = 0.0;
    double seconds = 0.0;
    SummaryGraph predicted;
};

struct BenchmarkReport {
    std::string structure;
    std::size_t n_seeds = 0;
    std::size_t n_failed = 0;
    double f1_mean = 0.0;
    double f1_sd = 0.0;  ///< sample standard deviation over successful seeds
    double f1_oriented_mean = 0.0;
    double f1_oriented_sd = 0.0;
    double ci_tests_mean = 0.0;
    std::vector<SeedOutcome> seeds;

    nlohmann::json to_json() const;
    std::string table() const;
};

/// Seed i generates data with base_seed + i and runs discovery with the same seed. A failing seed
/// is recorded and excluded from the aggregates.
BenchmarkReport run_benchmark(const BenchmarkOptions& options);

}  // namespace pctmi
