// Command-line front end: discover, generate, evaluate, bench and project.

#include "pctmi/csv.hpp"
#include "pctmi/datagen.hpp"
#include "pctmi/discovery.hpp"
#include "pctmi/errors.hpp"
#include "pctmi/evaluation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace pctmi;

struct CommonOptions {
    int max_window = 5;
    int max_lag = 5;
    double alpha = 0.05;
    int knn_k = 10;
    int permutations = 100;
    int perm_neighbors = 5;
    std::uint64_t seed = 0;
    std::size_t min_samples = 50;
    std::vector<std::size_t> rates;

    DiscoveryConfig config() const {
        DiscoveryConfig cfg;
        cfg.bounds.lambda_max = max_window;
        cfg.bounds.gamma_max = max_lag;
        cfg.bounds.min_samples = min_samples;
        cfg.alpha = alpha;
        cfg.knn.k = knn_k;
        cfg.perm.n_permutations = permutations;
        cfg.perm.local_neighbors = perm_neighbors;
        cfg.perm.alpha = alpha;
        cfg.seed = seed;
        return cfg;
    }
};

void add_discovery_flags(CLI::App* app, CommonOptions& o) {
    app->add_option("--max-window", o.max_window, "Largest window size")->capture_default_str();
    app->add_option("--max-lag", o.max_lag, "Largest temporal gap, in time units")->capture_default_str();
    app->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
    app->add_option("--knn-k", o.knn_k, "Neighbour count of the estimator")->capture_default_str();
    app->add_option("--permutations", o.permutations, "Permutations per test")->capture_default_str();
    app->add_option("--perm-neighbors", o.perm_neighbors, "Neighbourhood of the local permutation")->capture_default_str();
    app->add_option("--min-samples", o.min_samples, "Smallest usable number of joint rows")->capture_default_str();
}

std::ostream& output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ParseError("cannot write '" + path + "'");
    return file;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_graph(std::ostream& out, const SummaryGraph& g, const std::string& format) {
    if (format == "dot") {
        out << graph_to_dot(g);
    } else {
        out << graph_to_json(g).dump(2) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Summary causal graph discovery for multivariate time series"};
    app.set_config("--config", "", "Read options from a key=value file; flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    CommonOptions common;
    app.add_option("--seed", common.seed, "Random seed")->capture_default_str();

    // discover
    auto* disc = app.add_subcommand("discover", "Infer a summary graph from a CSV file");
    std::string input;
    std::string layout = "auto";
    std::string format = "json";
    std::string out_path;
    std::string report_path;
    disc->add_option("input", input, "CSV file (wide or long layout)")->required();
    disc->add_option("--layout", layout, "auto, wide or long")->check(CLI::IsMember({"auto", "wide", "long"}));
    disc->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    disc->add_option("-o,--output", out_path, "Output file (stdout by default)");
    disc->add_option("--report", report_path, "Also write tests, sepsets and warnings as JSON");
    disc->add_option("--rates", common.rates, "Keep every k-th observation of each series")->delimiter(',');
    add_discovery_flags(disc, common);

    // generate
    auto* gen = app.add_subcommand("generate", "Simulate a benchmark structure");
    std::string structure = "fork";
    std::size_t length = 1000;
    int gamma = 1;
    double damping = 0.9;
    std::string truth_path;
    gen->add_option("--structure", structure, "fork, v_structure, mediator, diamond or example1")->capture_default_str();
    gen->add_option("--T,--length", length, "Series length")->capture_default_str();
    gen->add_option("--gamma", gamma, "Lag of every cross edge")->capture_default_str();
    gen->add_option("--damping", damping, "Autoregressive coefficient of example1 (1 = literal system)")->capture_default_str();
    gen->add_option("--rates", common.rates, "Keep every k-th observation of each series")->delimiter(',');
    gen->add_option("-o,--output", out_path, "CSV output (stdout by default)");
    gen->add_option("--truth", truth_path, "Write the ground-truth graph JSON here");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a predicted graph against the truth");
    std::string pred_path;
    eval->add_option("--pred", pred_path, "Predicted graph JSON")->required();
    eval->add_option("--truth", truth_path, "True graph JSON")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Generate, discover and score over many seeds");
    std::size_t n_seeds = 10;
    std::string bench_json;
    bench->add_option("--structure", structure, "Structure name, or 'all'")->capture_default_str();
    bench->add_option("--seeds", n_seeds, "Number of seeds")->capture_default_str();
    bench->add_option("--T,--length", length, "Series length")->capture_default_str();
    bench->add_option("--rates", common.rates, "Keep every k-th observation of each series")->delimiter(',');
    bench->add_option("--json", bench_json, "Write the JSON report here");
    add_discovery_flags(bench, common);

    // project
    auto* proj = app.add_subcommand("project", "Collapse a full time graph into a summary graph");
    proj->add_option("input", input, "Full-graph JSON")->required();
    proj->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

    CLI11_PARSE(app, argc, argv);

    try {
        std::ofstream file;
        if (*disc) {
            Dataset data = read_csv_file(input, layout == "wide" ? CsvLayout::Wide : layout == "long" ? CsvLayout::Long : CsvLayout::Auto);
            if (!common.rates.empty()) data = subsample(data, common.rates);
            DiscoveryResult r = discover(data, common.config());
            for (const auto& w : r.report.warnings) std::cerr << "warning: " << w << "\n";
            write_graph(output(out_path, file), r.graph, format);
            if (!report_path.empty()) {
                nlohmann::json doc{{"ci_tests", r.budget.ci_tests_performed},
                                   {"ci_bound", r.budget.bound()},
                                   {"collider_tests", r.report.collider_tests},
                                   {"warnings", r.report.warnings},
                                   {"tests", nlohmann::json::array()},
                                   {"sepsets", nlohmann::json::array()}};
                for (const auto& t : r.report.tests) {
                    doc["tests"].push_back({{"p", t.p}, {"q", t.q}, {"conditioners", t.conditioners},
                                            {"statistic", t.statistic}, {"p_value", t.p_value}, {"removed", t.removed}});
                }
                for (const auto& [pair, set] : r.sepsets.entries()) {
                    doc["sepsets"].push_back({{"p", pair.first}, {"q", pair.second}, {"sepset", set}});
                }
                std::ofstream rep(report_path);
                rep << doc.dump(2) << "\n";
            }
        } else if (*gen) {
            Dataset data;
            if (structure == "example1") {
                Example1Params p;
                p.T = length;
                p.seed = common.seed;
                p.damping = damping;
                data = generate_example1(p);
            } else {
                GenerativeParams p;
                p.T = length;
                p.seed = common.seed;
                GeneratedData g = generate(named_structure(structure, gamma), p);
                data = g.data;
                if (!truth_path.empty()) {
                    std::ofstream t(truth_path);
                    t << graph_to_json(g.truth).dump(2) << "\n";
                }
            }
            if (!common.rates.empty()) data = subsample(data, common.rates);
            write_csv(output(out_path, file), data);
        } else if (*eval) {
            const SummaryGraph pred = graph_from_json(read_json(pred_path));
            const SummaryGraph truth = graph_from_json(read_json(truth_path));
            std::cout << evaluate(pred, truth).to_json().dump(2) << "\n";
        } else if (*bench) {
            std::vector<std::string> names = structure == "all" ? structure_names() : std::vector<std::string>{structure};
            nlohmann::json all = nlohmann::json::array();
            for (const auto& name : names) {
                BenchmarkOptions o;
                o.structure = name;
                o.n_seeds = n_seeds;
                o.base_seed = common.seed;
                o.generation.T = length;
                o.discovery = common.config();
                if (!common.rates.empty()) {
                    o.keep_every = common.rates;
                    o.keep_every.resize(named_structure(name).nodes.size(), 1);
                }
                const BenchmarkReport r = run_benchmark(o);
                std::cout << r.table() << std::flush;
                all.push_back(r.to_json());
            }
            if (!bench_json.empty()) {
                std::ofstream j(bench_json);
                j << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
            }
        } else if (*proj) {
            std::vector<std::string> nodes;
            const auto edges = lagged_edges_from_json(read_json(input), &nodes);
            write_graph(std::cout, project_full_graph(edges, nodes), format);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
