#include "pctmi/series.hpp"

#include "pctmi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

namespace pctmi {

void TimeSeries::validate() const {
    if (values.empty()) throw InvalidDataError("series '" + name + "' is empty");
    if (rate < 1) throw InvalidDataError("series '" + name + "' has a non-positive rate");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidDataError("series '" + name + "' contains a non-finite value");
    }
}

std::size_t Dataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].name == name) return i;
    }
    throw InvalidDataError("unknown series '" + name + "'");
}

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(s.name);
    return out;
}

bool Dataset::equal_rates() const {
    return std::all_of(series.begin(), series.end(), [&](const TimeSeries& s) {
        return s.rate == series.front().rate && s.start_time == series.front().start_time;
    });
}

void Dataset::validate() const {
    std::set<std::string> seen;
    for (const auto& s : series) {
        s.validate();
        if (!seen.insert(s.name).second) throw InvalidDataError("duplicate series name '" + s.name + "'");
    }
}

WindowEmbedding window_embed(const TimeSeries& series, int lambda) {
    const auto length = static_cast<std::int64_t>(series.length());
    if (lambda <= 0 || lambda >= length) {
        throw InvalidWindowError("window size " + std::to_string(lambda) + " invalid for series '" + series.name +
                                 "' of length " + std::to_string(length));
    }
    const std::size_t count = series.length() - static_cast<std::size_t>(lambda) + 1;
    WindowEmbedding out;
    out.source = series.name;
    out.window_size = static_cast<std::size_t>(lambda);
    out.rows = Matrix(count, out.window_size);
    out.start_times.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        for (std::size_t j = 0; j < out.window_size; ++j) out.rows(t, j) = series.values[t + j];
        out.start_times.push_back(series.time_at(t));
    }
    return out;
}

std::int64_t joint_stride(int rate_p, int rate_q) {
    if (rate_p < 1 || rate_q < 1) throw InvalidConfigError("sampling rates must be positive");
    return std::lcm<std::int64_t, std::int64_t>(rate_p, rate_q);
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// One block of a joint row: series s read at index base + k * rate + [lo_rel, hi_rel].
struct Component {
    const TimeSeries* series;
    Time offset;  // time of the block's anchor relative to the row time t
    int lo_rel;
    int hi_rel;
};

struct RowPlan {
    std::vector<std::int64_t> base;  // anchor index of each component for k = 0
    std::int64_t k_min = 0;
    std::int64_t k_max = -1;
    Time t0{0};

    std::size_t count() const { return k_max >= k_min ? static_cast<std::size_t>(k_max - k_min + 1) : 0; }
};

void check_window(const TimeSeries& s, int lambda) {
    if (lambda <= 0 || lambda >= static_cast<int>(s.length())) {
        throw InvalidWindowError("window size " + std::to_string(lambda) + " invalid for series '" + s.name + "'");
    }
}

std::vector<Component> components_for(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config,
                                      const std::vector<Conditioner>& conditioners, bool include_past) {
    check_window(p, config.lambda_pq);
    check_window(q, config.lambda_qp);
    const int past = include_past ? -1 : 0;
    std::vector<Component> comps;
    comps.push_back({&p, Time(0), past, config.lambda_pq - 1});
    comps.push_back({&q, Time(config.gamma), past, config.lambda_qp - 1});
    for (const auto& c : conditioners) {
        if (c.series == nullptr) throw InvalidConfigError("conditioner without a series");
        check_window(*c.series, c.window);
        comps.push_back({c.series, Time(-c.gap), 0, c.window - 1});
    }
    return comps;
}

// Rows are placed every time unit; the phase is chosen among p's observation times within
// the first unit so that every component lands on an integer index.
RowPlan plan_rows(const std::vector<Component>& comps) {
    const TimeSeries& anchor = *comps.front().series;
    std::optional<RowPlan> best;
    bool aligned = false;
    for (int a = 0; a < anchor.rate; ++a) {
        const Time t0 = anchor.start_time + Time(a, anchor.rate);
        RowPlan plan;
        plan.t0 = t0;
        plan.k_min = std::numeric_limits<std::int64_t>::min();
        plan.k_max = std::numeric_limits<std::int64_t>::max();
        bool ok = true;
        for (const auto& c : comps) {
            const Time idx = (t0 + c.offset - c.series->start_time) * Time(c.series->rate);
            if (idx.denominator() != 1) {
                ok = false;
                break;
            }
            const std::int64_t b = idx.numerator();
            const std::int64_t r = c.series->rate;
            const auto len = static_cast<std::int64_t>(c.series->length());
            plan.base.push_back(b);
            plan.k_min = std::max(plan.k_min, ceil_div(-c.lo_rel - b, r));
            plan.k_max = std::min(plan.k_max, floor_div(len - 1 - c.hi_rel - b, r));
        }
        if (!ok) continue;
        aligned = true;
        if (!best || plan.count() > best->count()) best = plan;
    }
    if (!aligned) throw AlignmentError("observation grids of '" + anchor.name + "' and its partners cannot be aligned");
    return *best;
}

}  // namespace

std::size_t count_joint_rows(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config,
                             const std::vector<Conditioner>& conditioners, bool include_past) {
    const auto plan = plan_rows(components_for(p, q, config, conditioners, include_past));
    const std::size_t n = plan.count();
    if (n == 0) throw AlignmentError("series '" + p.name + "' and '" + q.name + "' have no overlapping joint rows");
    return n;
}

JointSampleSet build_joint_samples(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config,
                                   const std::vector<Conditioner>& conditioners, const JointOptions& options) {
    const auto comps = components_for(p, q, config, conditioners, options.include_past);
    const auto plan = plan_rows(comps);
    const std::size_t n = plan.count();
    if (n == 0) throw AlignmentError("series '" + p.name + "' and '" + q.name + "' have no overlapping joint rows");
    if (n < options.min_samples) {
        throw InsufficientSamplesError("only " + std::to_string(n) + " joint rows for '" + p.name + "' and '" + q.name +
                                       "' (minimum " + std::to_string(options.min_samples) + ")");
    }

    std::size_t z_cols = options.include_past ? 2 : 0;
    for (const auto& c : conditioners) z_cols += static_cast<std::size_t>(c.window);

    JointSampleSet out;
    out.gap = config.gamma;
    out.n_eff = n;
    out.x_rows = Matrix(n, static_cast<std::size_t>(config.lambda_pq));
    out.y_rows = Matrix(n, static_cast<std::size_t>(config.lambda_qp));
    out.z_rows = Matrix(n, z_cols);
    out.x_start_times.reserve(n);
    out.y_start_times.reserve(n);

    for (std::size_t row = 0; row < n; ++row) {
        const std::int64_t k = plan.k_min + static_cast<std::int64_t>(row);
        auto index = [&](std::size_t c) { return static_cast<std::size_t>(plan.base[c] + k * comps[c].series->rate); };
        const std::size_t ip = index(0);
        const std::size_t iq = index(1);
        for (int j = 0; j < config.lambda_pq; ++j) out.x_rows(row, j) = p.values[ip + j];
        for (int j = 0; j < config.lambda_qp; ++j) out.y_rows(row, j) = q.values[iq + j];
        std::size_t zc = 0;
        if (options.include_past) {
            out.z_rows(row, zc++) = p.values[ip - 1];
            out.z_rows(row, zc++) = q.values[iq - 1];
        }
        for (std::size_t c = 0; c < conditioners.size(); ++c) {
            const std::size_t ir = index(c + 2);
            for (int j = 0; j < conditioners[c].window; ++j) out.z_rows(row, zc++) = conditioners[c].series->values[ir + j];
        }
        out.x_start_times.push_back(p.time_at(ip));
        out.y_start_times.push_back(q.time_at(iq));
    }
    return out;
}

std::vector<WindowConfig> compatible_configs(const TimeSeries& p, const TimeSeries& q, int lambda_max, int gamma_max,
                                             std::size_t min_samples) {
    if (lambda_max < 1) throw InvalidConfigError("lambda_max must be at least 1");
    if (gamma_max < 0) throw InvalidConfigError("gamma_max must be non-negative");
    std::vector<WindowConfig> out;
    for (int lpq = 1; lpq <= lambda_max; ++lpq) {
        for (int lqp = 1; lqp <= lambda_max; ++lqp) {
            for (int g = -gamma_max; g <= gamma_max; ++g) {
                const WindowConfig cfg{lpq, lqp, g};
                try {
                    if (count_joint_rows(p, q, cfg, {}, true) >= min_samples) out.push_back(cfg);
                } catch (const InvalidWindowError&) {
                } catch (const AlignmentError&) {
                }
            }
        }
    }
    if (out.empty()) {
        throw NoCompatibleConfigError("series '" + p.name + "' and '" + q.name + "' cannot be compared");
    }
    return out;
}

}  // namespace pctmi
