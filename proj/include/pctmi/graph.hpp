#pragma once

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pctmi {

/// Orientation of an edge stored under the index pair (a, b) with a < b.
enum class EdgeMark { Undirected, Forward /* a -> b */, Backward /* b -> a */ };

/// Estimation details carried by an edge, expressed for the direction a -> b (a < b).
struct EdgeAnnotation {
    std::optional<int> gamma;
    std::optional<int> lambda_a;
    std::optional<int> lambda_b;
    std::optional<double> ctmi;
    std::optional<double> p_value;

    bool operator==(const EdgeAnnotation&) const = default;
};

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    EdgeMark mark = EdgeMark::Undirected;
    EdgeAnnotation annotation;

    bool operator==(const Edge&) const = default;
};

/// Summary causal graph: one node per series, at most one edge per pair, optional self-loops.
class SummaryGraph {
public:
    SummaryGraph() = default;
    explicit SummaryGraph(std::vector<std::string> nodes, bool self_loops = true);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t index_of(const std::string& name) const;

    bool adjacent(std::size_t u, std::size_t v) const;
    bool has_directed(std::size_t from, std::size_t to) const;
    bool is_undirected(std::size_t u, std::size_t v) const;

    void add_undirected(std::size_t u, std::size_t v, EdgeAnnotation annotation = {});
    /// Annotation is given for the direction from -> to.
    void add_directed(std::size_t from, std::size_t to, EdgeAnnotation annotation = {});
    void remove(std::size_t u, std::size_t v);

    /// Turns an undirected u - v into from -> to. Returns false (and changes nothing) when the
    /// edge is absent or already directed.
    bool orient(std::size_t from, std::size_t to);

    /// Annotation for the direction from -> to; empty when the pair is not adjacent.
    std::optional<EdgeAnnotation> annotation(std::size_t from, std::size_t to) const;
    void set_annotation(std::size_t from, std::size_t to, EdgeAnnotation annotation);

    std::vector<std::size_t> neighbors(std::size_t u) const;
    std::vector<std::size_t> parents(std::size_t u) const;
    std::size_t degree(std::size_t u) const { return neighbors(u).size(); }
    std::size_t max_degree() const;

    /// All edges ordered by (a, b).
    std::vector<Edge> edges() const;
    std::size_t edge_count() const { return edges_.size(); }

    /// Directed cross edges (from, to), with undirected edges contributing both directions.
    std::set<std::pair<std::size_t, std::size_t>> directed_pairs() const;

    bool self_loop(std::size_t u) const { return self_loops_[u]; }
    void set_self_loop(std::size_t u, bool on) { self_loops_[u] = on; }
    bool all_self_loops() const;

    /// True when following directed edges from -> ... -> to is possible (length >= 1).
    bool has_directed_path(std::size_t from, std::size_t to) const;

    /// Same graph with nodes sorted by name.
    SummaryGraph canonical() const;
    /// Same graph over nodes in the given order (must be a permutation of nodes()).
    SummaryGraph reordered(const std::vector<std::string>& order) const;

    bool operator==(const SummaryGraph&) const = default;

private:
    static std::pair<std::size_t, std::size_t> key(std::size_t u, std::size_t v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

    std::vector<std::string> nodes_;
    std::vector<bool> self_loops_;
    std::map<std::pair<std::size_t, std::size_t>, Edge> edges_;
};

/// Unordered pair of series names mapped to the separating set found for it.
class SepsetTable {
public:
    void set(const std::string& p, const std::string& q, std::vector<std::string> sepset);
    bool contains(const std::string& p, const std::string& q) const;
    /// Throws std::out_of_range when absent.
    const std::vector<std::string>& get(const std::string& p, const std::string& q) const;
    bool in_sepset(const std::string& p, const std::string& q, const std::string& r) const;
    std::size_t size() const { return table_.size(); }
    const std::map<std::pair<std::string, std::string>, std::vector<std::string>>& entries() const { return table_; }

    bool operator==(const SepsetTable&) const = default;

private:
    static std::pair<std::string, std::string> key(const std::string& p, const std::string& q) {
        return p < q ? std::pair{p, q} : std::pair{q, p};
    }
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> table_;
};

/// {nodes:[...], edges:[{src,dst,mark,gamma,lambda_src,lambda_dst,ctmi,p_value}], self_loops:bool}
nlohmann::json graph_to_json(const SummaryGraph& graph);
/// Throws ParseError on malformed documents.
SummaryGraph graph_from_json(const nlohmann::json& doc);
/// Directed edges as arrows, undirected with dir=none, self-loops drawn explicitly.
std::string graph_to_dot(const SummaryGraph& graph);

}  // namespace pctmi
