#include "pctmi/errors.hpp"
#include "pctmi/series.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace pctmi;

namespace {

TimeSeries ramp(const std::string& name, std::size_t n, int rate = 1, Time start = Time(0)) {
    TimeSeries s{name, std::vector<double>(n), rate, start};
    std::iota(s.values.begin(), s.values.end(), 0.0);
    return s;
}

}  // namespace

TEST(WindowEmbed, CountsAndRows) {
    EXPECT_EQ(window_embed(ramp("a", 5), 3).rows.rows(), 3u);

    TimeSeries s{"a", {1, 2, 3, 4}};
    const auto w = window_embed(s, 2);
    ASSERT_EQ(w.rows.rows(), 3u);
    EXPECT_EQ(w.rows(0, 0), 1);
    EXPECT_EQ(w.rows(0, 1), 2);
    EXPECT_EQ(w.rows(2, 0), 3);
    EXPECT_EQ(w.rows(2, 1), 4);
    EXPECT_EQ(w.start_times[2], Time(2));
}

TEST(WindowEmbed, SizeOneIsIdentity) {
    TimeSeries s{"a", {0.5, -1, 3, 7, 2}};
    const auto w = window_embed(s, 1);
    EXPECT_EQ(w.rows.column(0), s.values);
}

TEST(WindowEmbed, FirstColumnIsTruncatedSeries) {
    const auto s = ramp("a", 20);
    for (int lambda = 1; lambda < 20; ++lambda) {
        const auto col = window_embed(s, lambda).rows.column(0);
        EXPECT_EQ(col, std::vector<double>(s.values.begin(), s.values.end() - lambda + 1));
    }
}

TEST(WindowEmbed, RejectsBadSizes) {
    const auto s = ramp("a", 5);
    EXPECT_THROW(window_embed(s, 0), InvalidWindowError);
    EXPECT_THROW(window_embed(s, 5), InvalidWindowError);
    EXPECT_THROW(window_embed(s, -2), InvalidWindowError);
}

TEST(JointStride, Values) {
    EXPECT_EQ(joint_stride(1, 1), 1);
    EXPECT_EQ(joint_stride(2, 3), 6);
    EXPECT_EQ(joint_stride(4, 2), 4);
    for (int a = 1; a <= 12; ++a) {
        for (int b = 1; b <= 12; ++b) {
            EXPECT_EQ(joint_stride(a, b), joint_stride(b, a));
            EXPECT_EQ(joint_stride(a, b) % a, 0);
            EXPECT_EQ(joint_stride(a, b) % b, 0);
        }
        EXPECT_EQ(joint_stride(a, a), a);
    }
    EXPECT_THROW(joint_stride(0, 1), InvalidConfigError);
}

TEST(JointSamples, EqualRatesLagOne) {
    const auto p = ramp("p", 100);
    auto q = ramp("q", 100);
    for (auto& v : q.values) v += 1000;
    const auto s = build_joint_samples(p, q, {1, 1, 1}, {}, {true, 1});
    ASSERT_EQ(s.n_eff, 98u);
    for (std::size_t i = 0; i < s.n_eff; ++i) {
        const double t = s.x_rows(i, 0);
        EXPECT_EQ(s.y_rows(i, 0), 1000 + t + 1);
        EXPECT_EQ(s.z_rows(i, 0), t - 1);
        EXPECT_EQ(s.z_rows(i, 1), 1000 + t);
    }
}

// Brute-force enumeration of valid row times under equal rates.
TEST(JointSamples, MatchesIndexEnumeration) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int lp = 1 + static_cast<int>(rng() % 4);
        const int lq = 1 + static_cast<int>(rng() % 4);
        const int g = static_cast<int>(rng() % 11) - 5;
        const std::size_t np = 20 + rng() % 30;
        const std::size_t nq = 20 + rng() % 30;
        const int offset = static_cast<int>(rng() % 7) - 3;
        const auto p = ramp("p", np);
        const auto q = ramp("q", nq, 1, Time(offset));
        const bool past = rng() % 2;
        std::size_t expected = 0;
        for (int t = -100; t < 200; ++t) {
            const int ip = t;
            const int iq = t + g - offset;
            const int lo = past ? 1 : 0;
            if (ip - lo >= 0 && ip + lp - 1 < static_cast<int>(np) && iq - lo >= 0 && iq + lq - 1 < static_cast<int>(nq)) ++expected;
        }
        if (expected == 0) {
            EXPECT_THROW(build_joint_samples(p, q, {lp, lq, g}, {}, {past, 0}), AlignmentError);
            continue;
        }
        const auto s = build_joint_samples(p, q, {lp, lq, g}, {}, {past, 0});
        EXPECT_EQ(s.n_eff, expected);
        for (std::size_t i = 0; i < s.n_eff; ++i) {
            EXPECT_EQ(s.y_start_times[i] - s.x_start_times[i], Time(g));
        }
    }
}

TEST(JointSamples, MixedRatesKeepConstantGap) {
    // p twice per unit, q three times per unit; windows of 3 and 2 observations.
    const auto p = ramp("p", 200, 2);
    const auto q = ramp("q", 300, 3);
    for (int g = -3; g <= 3; ++g) {
        const auto s = build_joint_samples(p, q, {3, 2, g}, {}, {true, 1});
        ASSERT_GT(s.n_eff, 0u);
        for (std::size_t i = 0; i < s.n_eff; ++i) {
            EXPECT_EQ(s.y_start_times[i] - s.x_start_times[i], Time(g));
            if (i > 0) EXPECT_EQ(s.x_start_times[i] - s.x_start_times[i - 1], Time(1));
            // Values equal indices, so windows are consecutive observations.
            EXPECT_EQ(s.x_rows(i, 2) - s.x_rows(i, 0), 2);
            EXPECT_EQ(s.y_rows(i, 1) - s.y_rows(i, 0), 1);
            EXPECT_EQ(Time(static_cast<std::int64_t>(s.x_rows(i, 0)), 2), s.x_start_times[i]);
            EXPECT_EQ(Time(static_cast<std::int64_t>(s.y_rows(i, 0)), 3), s.y_start_times[i]);
        }
    }
}

TEST(JointSamples, IncompatibleGridsRejected) {
    // q starts a third of a unit after p's grid and has rate 1: no joint row can land on both grids.
    const auto p = ramp("p", 100, 1);
    const auto q = ramp("q", 100, 1, Time(1, 3));
    EXPECT_THROW(build_joint_samples(p, q, {1, 1, 0}), AlignmentError);
}

TEST(JointSamples, ConditionersAppendWindows) {
    const auto p = ramp("p", 60);
    const auto q = ramp("q", 60);
    auto r = ramp("r", 60);
    for (auto& v : r.values) v += 500;
    const auto s = build_joint_samples(p, q, {1, 1, 1}, {{&r, 2, 3}}, {true, 1});
    ASSERT_EQ(s.z_rows.cols(), 4u);
    for (std::size_t i = 0; i < s.n_eff; ++i) {
        const double t = s.x_rows(i, 0);
        EXPECT_EQ(s.z_rows(i, 2), 500 + t - 3);
        EXPECT_EQ(s.z_rows(i, 3), 500 + t - 2);
    }
}

TEST(JointSamples, MinimumSamples) {
    const auto p = ramp("p", 30);
    const auto q = ramp("q", 30);
    EXPECT_THROW(build_joint_samples(p, q, {1, 1, 0}), InsufficientSamplesError);
    EXPECT_NO_THROW(build_joint_samples(p, q, {1, 1, 0}, {}, {true, 20}));
}

TEST(CompatibleConfigs, FullGrid) {
    const auto p = ramp("p", 500);
    const auto q = ramp("q", 500);
    const auto c = compatible_configs(p, q, 1, 1);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], (WindowConfig{1, 1, -1}));
    EXPECT_EQ(c[1], (WindowConfig{1, 1, 0}));
    EXPECT_EQ(c[2], (WindowConfig{1, 1, 1}));
    EXPECT_EQ(compatible_configs(p, q, 5, 5).size(), 275u);
}

TEST(CompatibleConfigs, OrderedAndBounded) {
    const auto p = ramp("p", 400);
    const auto q = ramp("q", 400);
    const auto c = compatible_configs(p, q, 3, 2);
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
}

TEST(CompatibleConfigs, DisjointSpans) {
    const auto p = ramp("p", 100);
    const auto q = ramp("q", 100, 1, Time(1000));
    EXPECT_THROW(compatible_configs(p, q, 5, 5), NoCompatibleConfigError);
}

TEST(DatasetValidation, Errors) {
    Dataset d;
    d.series.push_back(ramp("a", 5));
    d.series.push_back(ramp("a", 5));
    EXPECT_THROW(d.validate(), InvalidDataError);
    d.series[1].name = "b";
    EXPECT_NO_THROW(d.validate());
    d.series[1].values[2] = std::nan("");
    EXPECT_THROW(d.validate(), InvalidDataError);
    TimeSeries empty{"e", {}};
    EXPECT_THROW(empty.validate(), InvalidDataError);
}
