#pragma once

#include "pctmi/graph.hpp"
#include "pctmi/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pctmi {

enum class Nonlinearity { Abs, Tanh, Sin, Cos };

const char* to_string(Nonlinearity f);
double apply(Nonlinearity f, double x);

struct StructureSpec {
    std::string name = "custom";
    std::vector<std::string> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  ///< (cause, effect) node indices
    int gamma = 1;  ///< lag of every cross edge

    /// Throws InvalidConfigError on bad indices, self edges, duplicates or cycles.
    void validate() const;
};

/// fork, v_structure, mediator or diamond, with nodes X1..Xd. Throws InvalidConfigError otherwise.
StructureSpec named_structure(const std::string& name, int gamma = 1);
std::vector<std::string> structure_names();

struct GenerativeParams {
    std::size_t T = 1000;
    std::uint64_t seed = 0;
    double coef_min = 0.1;  ///< coefficients are drawn from U([-max,-min] u [min,max])
    double coef_max = 1.0;
    double noise_scale = 0.1;
    double noise_sigma = 3.872983346207417;  ///< sqrt(15), read as a standard deviation
    std::vector<Nonlinearity> nonlinearities{Nonlinearity::Abs, Nonlinearity::Tanh, Nonlinearity::Sin, Nonlinearity::Cos};
    std::size_t burn_in = 100;

    void validate() const;
};

/// The coefficients and functions actually drawn for one dataset.
struct DrawnModel {
    std::vector<double> self_coef;
    std::vector<double> edge_coef;  ///< aligned with StructureSpec::edges
    std::vector<Nonlinearity> edge_fn;
};

struct GeneratedData {
    Dataset data;
    SummaryGraph truth;
    DrawnModel model;
};

/// X^q_t = a_qq X^q_{t-1} + sum_p a_pq f_pq(X^p_{t-gamma}) + noise_scale * xi, xi ~ N(0, noise_sigma).
/// Coefficients and functions are drawn once per dataset; the state starts at zero and the first
/// burn_in steps are discarded.
GeneratedData generate(const StructureSpec& spec, const GenerativeParams& params);

struct Example1Params {
    std::size_t T = 10000;
    std::uint64_t seed = 0;
    /// Coefficient on each series' own past. 1 gives the literal, non-stationary recursion.
    double damping = 0.9;
    double noise_sd = 1.0;
    std::size_t burn_in = 100;
};

/// p_t = c p_{t-1} + e_p;  q_t = c q_{t-1} + p_{t-2} + p_{t-1} + e_q. Series are named "p" and "q".
Dataset generate_example1(const Example1Params& params);

/// Keeps observations 0, k, 2k, ... of each series. Rates are rescaled onto a common finer time
/// unit so every series keeps an integer rate: with U = lcm_s(k_s / gcd(rate_s, k_s)), a series
/// kept every k ends up with rate rate * U / k per new unit. Throws DegenerateSeriesError when a
/// series would keep fewer than 10 observations.
Dataset subsample(const Dataset& data, const std::vector<std::size_t>& keep_every);

}  // namespace pctmi
