#pragma once

#include "pctmi/ctmi.hpp"
#include "pctmi/estimator.hpp"
#include "pctmi/graph.hpp"
#include "pctmi/series.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pctmi {

struct DiscoveryConfig {
    SearchBounds bounds;  ///< lambda_max, gamma_max, min_samples
    double alpha = 0.05;
    KnnParams knn;
    PermutationParams perm;
    std::uint64_t seed = 0;

    /// Throws InvalidConfigError.
    void validate() const;
};

/// Level-0 results keyed by the name-ordered pair, stored in that orientation.
class CtmiCache {
public:
    void put(const std::string& p, const std::string& q, const CtmiResult& r);
    bool contains(const std::string& p, const std::string& q) const;
    /// The result oriented from p to q. Throws std::out_of_range when absent.
    CtmiResult get(const std::string& p, const std::string& q) const;
    std::size_t size() const { return table_.size(); }

private:
    std::map<std::pair<std::string, std::string>, CtmiResult> table_;
};

/// Supplies the statistics behind every decision of the discovery pipeline. Implementations must
/// be safe to call concurrently and their answers must not depend on argument order beyond the
/// documented orientation of results.
class CiTester {
public:
    virtual ~CiTester() = default;

    /// CTMI of (p, q) with its p-value, oriented from p to q. Throws NoCompatibleConfigError.
    virtual CtmiResult pair(const std::string& p, const std::string& q) const = 0;

    /// Conditional CTMI estimate without a significance test. Throws InfeasibleConditioningError.
    virtual CondCtmiResult conditional(const std::string& p, const std::string& q, const CtmiResult& base,
                                       const std::vector<std::string>& conditioners) const = 0;

    /// p-value of the conditional test at a previously found optimum.
    virtual double conditional_p_value(const std::string& p, const std::string& q, const CtmiResult& base,
                                       const std::vector<std::string>& conditioners,
                                       const CondCtmiResult& optimum) const = 0;

    /// p-value of I(p_t; q_t | r_t, sepset_t); empty when the test cannot be run.
    virtual std::optional<double> collider_p_value(const std::string& p, const std::string& q, const std::string& r,
                                                   const std::vector<std::string>& sepset) const = 0;
};

/// The statistical tester: kNN estimates with permutation tests on the data.
class CtmiTester : public CiTester {
public:
    CtmiTester(const Dataset& data, DiscoveryConfig cfg);

    CtmiResult pair(const std::string& p, const std::string& q) const override;
    CondCtmiResult conditional(const std::string& p, const std::string& q, const CtmiResult& base,
                               const std::vector<std::string>& conditioners) const override;
    double conditional_p_value(const std::string& p, const std::string& q, const CtmiResult& base,
                               const std::vector<std::string>& conditioners,
                               const CondCtmiResult& optimum) const override;
    std::optional<double> collider_p_value(const std::string& p, const std::string& q, const std::string& r,
                                           const std::vector<std::string>& sepset) const override;

private:
    const TimeSeries& series(const std::string& name) const;
    std::vector<const TimeSeries*> lookup(const std::vector<std::string>& names) const;
    /// Estimator and permutation seed for one test, derived from the names involved only.
    KnnParams knn_for(const std::string& p, const std::string& q, const std::vector<std::string>& extra) const;

    const Dataset& data_;
    DiscoveryConfig cfg_;
};

/// Counts the independence tests of skeleton construction against d^2 (d-1)^(k-1) / (k-1)!,
/// k being the maximal degree of the final graph (at least 1).
struct TestBudgetCounter {
    std::size_t ci_tests_performed = 0;
    std::size_t d = 0;
    std::size_t kappa = 1;

    double bound() const;
    bool within_bound() const { return static_cast<double>(ci_tests_performed) <= bound(); }
    /// Throws std::logic_error when the count exceeds the bound.
    void check() const;
};

struct TestRecord {
    std::string p;
    std::string q;
    std::vector<std::string> conditioners;
    double statistic = 0.0;
    double p_value = 1.0;
    bool removed = false;
};

struct DiscoveryReport {
    std::vector<std::string> warnings;
    /// Pairs that could not be compared at all; they stay nonadjacent and have no sepset.
    std::vector<std::pair<std::string, std::string>> untested;
    std::vector<TestRecord> tests;
    std::size_t collider_tests = 0;
};

struct SkeletonResult {
    SummaryGraph graph;  ///< undirected, nodes in name order
    SepsetTable sepsets;
    CtmiCache cache;
    TestBudgetCounter budget;
    DiscoveryReport report;
};

/// Level-wise PC-stable skeleton search. Nodes are processed in name order, candidate tests of a
/// level are planned on a frozen adjacency snapshot, sorted by increasing estimate and popped
/// smallest-first, each pop being re-validated against the current adjacencies.
SkeletonResult build_skeleton(const std::vector<std::string>& names, const CiTester& tester, const DiscoveryConfig& cfg);
SkeletonResult build_skeleton(const Dataset& data, const DiscoveryConfig& cfg);

/// Orients edges by the gap rule (gamma > 0 means p -> q), then by the window rule (gamma = 0 and
/// lambda_pq < lambda_qp, subject to the gap bound on oriented common parents) until nothing changes.
void apply_er_rules(SummaryGraph& graph, const CtmiCache& cache, DiscoveryReport* report = nullptr);

/// Rule 0 on a statistical tester. Returns true iff conditioning on r makes p and q dependent.
bool collider_test(const Dataset& data, const std::string& p, const std::string& q, const std::string& r,
                   const SepsetTable& sepsets, const DiscoveryConfig& cfg);

/// Rule 0 (tested colliders), then rules 1-3 to a fixpoint. Edges already directed are never
/// re-oriented and no orientation closing a directed cycle is applied; both cases are logged.
void apply_pc_rules(SummaryGraph& graph, const SepsetTable& sepsets, const CiTester& tester, const DiscoveryConfig& cfg,
                    DiscoveryReport* report = nullptr);

struct DiscoveryResult {
    SummaryGraph graph;  ///< nodes in input order, self-loops on every node
    SepsetTable sepsets;
    TestBudgetCounter budget;
    DiscoveryReport report;
};

DiscoveryResult discover(const std::vector<std::string>& names, const CiTester& tester, const DiscoveryConfig& cfg);
/// Throws InvalidDataError when fewer than two series are given.
DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& cfg);

}  // namespace pctmi
