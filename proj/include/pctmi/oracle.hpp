#pragma once

#include "pctmi/discovery.hpp"
#include "pctmi/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pctmi {

/// Answers independence queries by d-separation in a known acyclic summary graph (self-loops
/// ignored). Dependent pairs get value 1 and p-value 0, independent ones value 0 and p-value 1.
/// The reported gap is the lag sum along the shortest directed path (negated when q causes p) or,
/// for pairs linked only through a common ancestor a, lag(a, q) - lag(a, p). Windows are 1.
class DSeparationOracle : public CiTester {
public:
    /// Edge lags come from the gamma annotation of each edge (1 when absent). Throws
    /// InvalidDataError when the graph has undirected edges.
    explicit DSeparationOracle(SummaryGraph truth);

    bool d_separated(const std::string& p, const std::string& q, const std::vector<std::string>& given) const;

    CtmiResult pair(const std::string& p, const std::string& q) const override;
    CondCtmiResult conditional(const std::string& p, const std::string& q, const CtmiResult& base,
                               const std::vector<std::string>& conditioners) const override;
    double conditional_p_value(const std::string& p, const std::string& q, const CtmiResult& base,
                               const std::vector<std::string>& conditioners,
                               const CondCtmiResult& optimum) const override;
    std::optional<double> collider_p_value(const std::string& p, const std::string& q, const std::string& r,
                                           const std::vector<std::string>& sepset) const override;

private:
    /// Shortest lag sum of a directed path from -> to; empty when there is none.
    std::optional<int> lag(std::size_t from, std::size_t to) const;

    SummaryGraph truth_;
};

}  // namespace pctmi
