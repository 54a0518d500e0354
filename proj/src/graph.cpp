#include "pctmi/graph.hpp"

#include "pctmi/errors.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace pctmi {

SummaryGraph::SummaryGraph(std::vector<std::string> nodes, bool self_loops)
    : nodes_(std::move(nodes)), self_loops_(nodes_.size(), self_loops) {
    std::set<std::string> seen(nodes_.begin(), nodes_.end());
    if (seen.size() != nodes_.size()) throw InvalidDataError("duplicate node names in graph");
}

std::size_t SummaryGraph::index_of(const std::string& name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end()) throw InvalidDataError("unknown node '" + name + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool SummaryGraph::adjacent(std::size_t u, std::size_t v) const { return u != v && edges_.count(key(u, v)) > 0; }

bool SummaryGraph::has_directed(std::size_t from, std::size_t to) const {
    auto it = edges_.find(key(from, to));
    if (it == edges_.end() || from == to) return false;
    return it->second.mark == (from < to ? EdgeMark::Forward : EdgeMark::Backward);
}

bool SummaryGraph::is_undirected(std::size_t u, std::size_t v) const {
    auto it = edges_.find(key(u, v));
    return it != edges_.end() && it->second.mark == EdgeMark::Undirected;
}

namespace {

EdgeAnnotation flip(EdgeAnnotation a) {
    if (a.gamma) a.gamma = -*a.gamma;
    std::swap(a.lambda_a, a.lambda_b);
    return a;
}

}  // namespace

void SummaryGraph::add_undirected(std::size_t u, std::size_t v, EdgeAnnotation annotation) {
    if (u == v || u >= size() || v >= size()) throw InvalidDataError("invalid edge endpoints");
    const auto k = key(u, v);
    edges_[k] = Edge{k.first, k.second, EdgeMark::Undirected, u < v ? annotation : flip(annotation)};
}

void SummaryGraph::add_directed(std::size_t from, std::size_t to, EdgeAnnotation annotation) {
    if (from == to || from >= size() || to >= size()) throw InvalidDataError("invalid edge endpoints");
    const auto k = key(from, to);
    edges_[k] = Edge{k.first, k.second, from < to ? EdgeMark::Forward : EdgeMark::Backward,
                     from < to ? annotation : flip(annotation)};
}

void SummaryGraph::remove(std::size_t u, std::size_t v) { edges_.erase(key(u, v)); }

bool SummaryGraph::orient(std::size_t from, std::size_t to) {
    auto it = edges_.find(key(from, to));
    if (it == edges_.end() || it->second.mark != EdgeMark::Undirected) return false;
    it->second.mark = from < to ? EdgeMark::Forward : EdgeMark::Backward;
    return true;
}

std::optional<EdgeAnnotation> SummaryGraph::annotation(std::size_t from, std::size_t to) const {
    auto it = edges_.find(key(from, to));
    if (it == edges_.end()) return std::nullopt;
    return from < to ? it->second.annotation : flip(it->second.annotation);
}

void SummaryGraph::set_annotation(std::size_t from, std::size_t to, EdgeAnnotation annotation) {
    auto it = edges_.find(key(from, to));
    if (it == edges_.end()) throw InvalidDataError("no edge to annotate");
    it->second.annotation = from < to ? annotation : flip(annotation);
}

std::vector<std::size_t> SummaryGraph::neighbors(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v) {
        if (adjacent(u, v)) out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> SummaryGraph::parents(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v) {
        if (has_directed(v, u)) out.push_back(v);
    }
    return out;
}

std::size_t SummaryGraph::max_degree() const {
    std::size_t m = 0;
    for (std::size_t u = 0; u < size(); ++u) m = std::max(m, degree(u));
    return m;
}

std::vector<Edge> SummaryGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [k, e] : edges_) out.push_back(e);
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> SummaryGraph::directed_pairs() const {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [k, e] : edges_) {
        if (e.mark != EdgeMark::Backward) out.insert({e.a, e.b});
        if (e.mark != EdgeMark::Forward) out.insert({e.b, e.a});
    }
    return out;
}

bool SummaryGraph::all_self_loops() const {
    return std::all_of(self_loops_.begin(), self_loops_.end(), [](bool b) { return b; });
}

bool SummaryGraph::has_directed_path(std::size_t from, std::size_t to) const {
    std::vector<char> seen(size(), 0);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < size(); ++v) {
            if (!has_directed(u, v) || seen[v]) continue;
            if (v == to) return true;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

SummaryGraph SummaryGraph::canonical() const {
    auto order = nodes_;
    std::sort(order.begin(), order.end());
    return reordered(order);
}

SummaryGraph SummaryGraph::reordered(const std::vector<std::string>& order) const {
    SummaryGraph out(order, true);
    if (order.size() != size()) throw InvalidDataError("reordering must be a permutation of the nodes");
    std::vector<std::size_t> map(size());
    for (std::size_t i = 0; i < size(); ++i) {
        map[i] = out.index_of(nodes_[i]);
        out.self_loops_[map[i]] = self_loops_[i];
    }
    for (const auto& [k, e] : edges_) {
        if (e.mark == EdgeMark::Undirected) {
            out.add_undirected(map[e.a], map[e.b], e.annotation);
        } else if (e.mark == EdgeMark::Forward) {
            out.add_directed(map[e.a], map[e.b], e.annotation);
        } else {
            out.add_directed(map[e.b], map[e.a], flip(e.annotation));
        }
    }
    return out;
}

void SepsetTable::set(const std::string& p, const std::string& q, std::vector<std::string> sepset) {
    std::sort(sepset.begin(), sepset.end());
    table_[key(p, q)] = std::move(sepset);
}

bool SepsetTable::contains(const std::string& p, const std::string& q) const { return table_.count(key(p, q)) > 0; }

const std::vector<std::string>& SepsetTable::get(const std::string& p, const std::string& q) const {
    return table_.at(key(p, q));
}

bool SepsetTable::in_sepset(const std::string& p, const std::string& q, const std::string& r) const {
    auto it = table_.find(key(p, q));
    return it != table_.end() && std::find(it->second.begin(), it->second.end(), r) != it->second.end();
}

namespace {

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> read_opt(const nlohmann::json& e, const char* field) {
    if (!e.contains(field) || e[field].is_null()) return std::nullopt;
    return e[field].get<T>();
}

}  // namespace

nlohmann::json graph_to_json(const SummaryGraph& graph) {
    nlohmann::json doc;
    doc["nodes"] = graph.nodes();
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges()) {
        const bool backward = e.mark == EdgeMark::Backward;
        const std::size_t src = backward ? e.b : e.a;
        const std::size_t dst = backward ? e.a : e.b;
        const EdgeAnnotation ann = *graph.annotation(src, dst);
        doc["edges"].push_back({{"src", graph.nodes()[src]},
                                {"dst", graph.nodes()[dst]},
                                {"mark", e.mark == EdgeMark::Undirected ? "undirected" : "directed"},
                                {"gamma", opt(ann.gamma)},
                                {"lambda_src", opt(ann.lambda_a)},
                                {"lambda_dst", opt(ann.lambda_b)},
                                {"ctmi", opt(ann.ctmi)},
                                {"p_value", opt(ann.p_value)}});
    }
    doc["self_loops"] = graph.all_self_loops();
    return doc;
}

SummaryGraph graph_from_json(const nlohmann::json& doc) {
    try {
        SummaryGraph g(doc.at("nodes").get<std::vector<std::string>>(), doc.value("self_loops", true));
        for (const auto& e : doc.at("edges")) {
            const std::size_t src = g.index_of(e.at("src").get<std::string>());
            const std::size_t dst = g.index_of(e.at("dst").get<std::string>());
            EdgeAnnotation ann;
            ann.gamma = read_opt<int>(e, "gamma");
            ann.lambda_a = read_opt<int>(e, "lambda_src");
            ann.lambda_b = read_opt<int>(e, "lambda_dst");
            ann.ctmi = read_opt<double>(e, "ctmi");
            ann.p_value = read_opt<double>(e, "p_value");
            const std::string mark = e.value("mark", "directed");
            if (mark == "directed") {
                g.add_directed(src, dst, ann);
            } else if (mark == "undirected") {
                g.add_undirected(src, dst, ann);
            } else {
                throw ParseError("unknown edge mark '" + mark + "'");
            }
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed graph JSON: ") + ex.what());
    } catch (const InvalidDataError& ex) {
        throw ParseError(std::string("malformed graph JSON: ") + ex.what());
    }
}

std::string graph_to_dot(const SummaryGraph& graph) {
    std::ostringstream out;
    auto quoted = [](const std::string& s) { return std::quoted(s); };
    out << "digraph summary {\n";
    for (std::size_t i = 0; i < graph.size(); ++i) out << "  " << quoted(graph.nodes()[i]) << ";\n";
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (graph.self_loop(i)) out << "  " << quoted(graph.nodes()[i]) << " -> " << quoted(graph.nodes()[i]) << ";\n";
    }
    for (const auto& e : graph.edges()) {
        const bool backward = e.mark == EdgeMark::Backward;
        const auto& src = graph.nodes()[backward ? e.b : e.a];
        const auto& dst = graph.nodes()[backward ? e.a : e.b];
        out << "  " << quoted(src) << " -> " << quoted(dst);
        if (e.mark == EdgeMark::Undirected) out << " [dir=none]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace pctmi
