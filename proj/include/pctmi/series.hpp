#pragma once

#include "pctmi/matrix.hpp"

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pctmi {

/// Exact time, in time units. Keeps joint-grid alignment bit-exact across sampling rates.
using Time = boost::rational<std::int64_t>;

/// A regularly sampled univariate series: observation i occurs at start_time + i / rate.
struct TimeSeries {
    std::string name;
    std::vector<double> values;
    int rate = 1;  ///< observations per time unit
    Time start_time{0};

    std::size_t length() const { return values.size(); }
    Time time_at(std::size_t i) const { return start_time + Time(static_cast<std::int64_t>(i), rate); }

    /// Throws InvalidDataError when length < 1, rate < 1 or a value is not finite.
    void validate() const;
};

struct Dataset {
    std::vector<TimeSeries> series;
    std::string time_unit = "step";

    std::size_t size() const { return series.size(); }
    const TimeSeries& operator[](std::size_t i) const { return series[i]; }
    std::size_t index_of(const std::string& name) const;
    std::vector<std::string> names() const;
    bool equal_rates() const;

    /// Checks every series and that names are distinct.
    void validate() const;
};

/// Overlapping windows w_t = (v_t, ..., v_{t+lambda-1}) of one series.
struct WindowEmbedding {
    std::string source;
    std::size_t window_size = 0;
    Matrix rows;
    std::vector<Time> start_times;
};

/// Throws InvalidWindowError unless 0 < lambda < length.
WindowEmbedding window_embed(const TimeSeries& series, int lambda);

/// Number of fine-grid ticks (each 1/LCM(rate_p, rate_q) time units) between successive
/// joint-window start times. The spacing in time is therefore exactly one time unit, which
/// lands on both series' observation grids.
std::int64_t joint_stride(int rate_p, int rate_q);

/// (lambda_pq, lambda_qp, gamma_pq): window of p, window of q, and start-time gap from p to q.
struct WindowConfig {
    int lambda_pq = 1;
    int lambda_qp = 1;
    int gamma = 0;  ///< in time units

    WindowConfig reversed() const { return {lambda_qp, lambda_pq, -gamma}; }
    auto operator<=>(const WindowConfig&) const = default;
};

/// A conditioning series contributing the window X^(r; window) starting at t - gap.
struct Conditioner {
    const TimeSeries* series = nullptr;
    int window = 1;
    int gap = 1;
};

struct JointOptions {
    bool include_past = true;  ///< condition on X^(p;1)_{t-1} and X^(q;1)_{t+gamma-1}
    std::size_t min_samples = 50;
};

/// Aligned window rows. z columns are [p past, q past] (when include_past) followed by each
/// conditioner's window, in the order given.
struct JointSampleSet {
    Matrix x_rows;
    Matrix y_rows;
    Matrix z_rows;
    int gap = 0;
    std::size_t n_eff = 0;
    std::vector<Time> x_start_times;
    std::vector<Time> y_start_times;
};

/// Number of joint rows the configuration admits, without materialising them.
/// Throws AlignmentError when the grids cannot be aligned or the spans do not overlap.
std::size_t count_joint_rows(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config,
                             const std::vector<Conditioner>& conditioners, bool include_past);

/// Throws AlignmentError (no joint rows) or InsufficientSamplesError (n_eff < min_samples).
JointSampleSet build_joint_samples(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config,
                                   const std::vector<Conditioner>& conditioners = {}, const JointOptions& options = {});

/// All configurations with 1 <= lambda <= lambda_max and |gamma| <= gamma_max admitting at
/// least min_samples joint rows (past included), ordered by lambda_pq, lambda_qp, gamma.
/// Throws NoCompatibleConfigError when none exists.
std::vector<WindowConfig> compatible_configs(const TimeSeries& p, const TimeSeries& q, int lambda_max, int gamma_max,
                                             std::size_t min_samples = 50);

}  // namespace pctmi
