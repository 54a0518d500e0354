#include "pctmi/datagen.hpp"

#include "pctmi/errors.hpp"
#include "pctmi/seed.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace pctmi {

const char* to_string(Nonlinearity f) {
    switch (f) {
        case Nonlinearity::Abs: return "abs";
        case Nonlinearity::Tanh: return "tanh";
        case Nonlinearity::Sin: return "sin";
        case Nonlinearity::Cos: return "cos";
    }
    return "?";
}

double apply(Nonlinearity f, double x) {
    switch (f) {
        case Nonlinearity::Abs: return std::abs(x);
        case Nonlinearity::Tanh: return std::tanh(x);
        case Nonlinearity::Sin: return std::sin(x);
        case Nonlinearity::Cos: return std::cos(x);
    }
    return x;
}

void StructureSpec::validate() const {
    if (gamma < 0) throw InvalidConfigError("structure lag must be >= 0");
    const std::size_t d = nodes.size();
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::vector<std::size_t>> children(d);
    for (const auto& [a, b] : edges) {
        if (a >= d || b >= d || a == b) throw InvalidConfigError("invalid structure edge");
        if (!seen.insert({a, b}).second || seen.count({b, a})) throw InvalidConfigError("duplicate structure edge");
        children[a].push_back(b);
    }
    // Kahn's algorithm: every node must be removable.
    std::vector<std::size_t> indegree(d, 0);
    for (const auto& e : edges) ++indegree[e.second];
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < d; ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        ++removed;
        for (std::size_t v : children[u]) {
            if (--indegree[v] == 0) ready.push_back(v);
        }
    }
    if (removed != d) throw InvalidConfigError("structure is cyclic");
}

StructureSpec named_structure(const std::string& name, int gamma) {
    StructureSpec s;
    s.name = name;
    s.gamma = gamma;
    if (name == "fork") {
        s.nodes = {"X1", "X2", "X3"};
        s.edges = {{0, 1}, {0, 2}};
    } else if (name == "v_structure") {
        s.nodes = {"X1", "X2", "X3"};
        s.edges = {{0, 2}, {1, 2}};
    } else if (name == "mediator") {
        s.nodes = {"X1", "X2", "X3"};
        s.edges = {{0, 1}, {0, 2}, {1, 2}};
    } else if (name == "diamond") {
        s.nodes = {"X1", "X2", "X3", "X4"};
        s.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    } else {
        throw InvalidConfigError("unknown structure '" + name + "'");
    }
    return s;
}

std::vector<std::string> structure_names() { return {"fork", "v_structure", "mediator", "diamond"}; }

void GenerativeParams::validate() const {
    if (T < 1) throw InvalidConfigError("T must be >= 1");
    if (!(coef_min >= 0 && coef_min <= coef_max)) throw InvalidConfigError("need 0 <= coef_min <= coef_max");
    if (!(noise_sigma >= 0) || !(noise_scale >= 0)) throw InvalidConfigError("noise parameters must be >= 0");
    if (nonlinearities.empty()) throw InvalidConfigError("nonlinearity pool is empty");
}

namespace {

double draw_coefficient(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution negative(0.5);
    const double m = mag(rng);
    return negative(rng) ? -m : m;
}

}  // namespace

GeneratedData generate(const StructureSpec& spec, const GenerativeParams& params) {
    spec.validate();
    params.validate();
    const std::size_t d = spec.nodes.size();
    const std::size_t lag = static_cast<std::size_t>(spec.gamma);
    std::mt19937_64 rng(combine_seed(params.seed, std::string_view("generate")));

    DrawnModel model;
    for (std::size_t i = 0; i < d; ++i) model.self_coef.push_back(draw_coefficient(rng, params.coef_min, params.coef_max));
    std::uniform_int_distribution<std::size_t> pick(0, params.nonlinearities.size() - 1);
    for (std::size_t e = 0; e < spec.edges.size(); ++e) {
        model.edge_coef.push_back(draw_coefficient(rng, params.coef_min, params.coef_max));
        model.edge_fn.push_back(params.nonlinearities[pick(rng)]);
    }

    const std::size_t total = params.T + params.burn_in;
    std::vector<std::vector<double>> x(d, std::vector<double>(total, 0.0));
    std::normal_distribution<double> xi(0.0, params.noise_sigma);
    for (std::size_t t = 1; t < total; ++t) {
        for (std::size_t q = 0; q < d; ++q) x[q][t] = model.self_coef[q] * x[q][t - 1];
        for (std::size_t e = 0; e < spec.edges.size(); ++e) {
            const auto [p, q] = spec.edges[e];
            if (t >= lag) x[q][t] += model.edge_coef[e] * apply(model.edge_fn[e], x[p][t - lag]);
        }
        for (std::size_t q = 0; q < d; ++q) x[q][t] += params.noise_scale * xi(rng);
    }

    GeneratedData out;
    for (std::size_t q = 0; q < d; ++q) {
        TimeSeries s;
        s.name = spec.nodes[q];
        s.values.assign(x[q].begin() + static_cast<std::ptrdiff_t>(params.burn_in), x[q].end());
        out.data.series.push_back(std::move(s));
    }
    out.truth = SummaryGraph(spec.nodes, true);
    for (const auto& [p, q] : spec.edges) {
        EdgeAnnotation a;
        a.gamma = spec.gamma;
        out.truth.add_directed(p, q, a);
    }
    out.model = std::move(model);
    return out;
}

Dataset generate_example1(const Example1Params& params) {
    if (params.T < 10) throw InvalidConfigError("example 1 needs T >= 10");
    std::mt19937_64 rng(combine_seed(params.seed, std::string_view("example1")));
    std::normal_distribution<double> eta(0.0, params.noise_sd);
    const std::size_t total = params.T + params.burn_in;
    std::vector<double> p(total, 0.0);
    std::vector<double> q(total, 0.0);
    for (std::size_t t = 1; t < total; ++t) {
        p[t] = params.damping * p[t - 1] + eta(rng);
        q[t] = params.damping * q[t - 1] + p[t - 1] + (t >= 2 ? p[t - 2] : 0.0) + eta(rng);
    }
    Dataset out;
    const auto skip = static_cast<std::ptrdiff_t>(params.burn_in);
    out.series.push_back(TimeSeries{"p", std::vector<double>(p.begin() + skip, p.end())});
    out.series.push_back(TimeSeries{"q", std::vector<double>(q.begin() + skip, q.end())});
    return out;
}

Dataset subsample(const Dataset& data, const std::vector<std::size_t>& keep_every) {
    if (keep_every.size() != data.size()) throw InvalidConfigError("one decimation factor per series is required");
    std::int64_t unit = 1;
    for (std::size_t s = 0; s < data.size(); ++s) {
        if (keep_every[s] < 1) throw InvalidConfigError("decimation factors must be >= 1");
        const auto k = static_cast<std::int64_t>(keep_every[s]);
        unit = std::lcm(unit, k / std::gcd<std::int64_t>(data[s].rate, k));
    }
    Dataset out;
    out.time_unit = unit == 1 ? data.time_unit : data.time_unit + " x " + std::to_string(unit);
    for (std::size_t s = 0; s < data.size(); ++s) {
        const TimeSeries& in = data[s];
        TimeSeries ts;
        ts.name = in.name;
        for (std::size_t i = 0; i < in.length(); i += keep_every[s]) ts.values.push_back(in.values[i]);
        if (ts.length() < 10) {
            throw DegenerateSeriesError("series '" + in.name + "' keeps only " + std::to_string(ts.length()) +
                                        " observations after decimation");
        }
        ts.rate = static_cast<int>(in.rate * unit / static_cast<std::int64_t>(keep_every[s]));
        ts.start_time = in.start_time / unit;
        out.series.push_back(std::move(ts));
    }
    return out;
}

}  // namespace pctmi
