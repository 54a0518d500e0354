#include "pctmi/ctmi.hpp"
#include "pctmi/datagen.hpp"
#include "pctmi/errors.hpp"
#include "pctmi/estimator.hpp"

#include <gtest/gtest.h>

#include <optional>
#include <random>

using namespace pctmi;

namespace {

std::vector<double> noise(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

// Driver r feeding p with lag 1 and q with lag 2.
Dataset common_cause(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto r = noise(rng, n);
    auto p = noise(rng, n, 0.5);
    auto q = noise(rng, n, 0.5);
    for (std::size_t t = 2; t < n; ++t) {
        p[t] += r[t - 1];
        q[t] += r[t - 2];
    }
    Dataset d;
    d.series = {TimeSeries{"p", p}, TimeSeries{"q", q}, TimeSeries{"r", r}};
    return d;
}

// r1 drives p with lag 1 and q with lag 2; r2 drives p with lag 2 and q with lag 3.
Dataset two_common_causes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto r1 = noise(rng, n);
    const auto r2 = noise(rng, n);
    auto p = noise(rng, n, 0.5);
    auto q = noise(rng, n, 0.5);
    for (std::size_t t = 3; t < n; ++t) {
        p[t] += r1[t - 1] + r2[t - 2];
        q[t] += r1[t - 2] + r2[t - 3];
    }
    Dataset d;
    d.series = {TimeSeries{"p", p}, TimeSeries{"q", q}, TimeSeries{"r1", r1}, TimeSeries{"r2", r2}};
    return d;
}

/// Windows of one and gap 1, the configuration of p_t and q_{t+1} sharing their driver.
CtmiResult unit_base(const Dataset& d, std::optional<PermutationParams> perm = std::nullopt) {
    CtmiResult base;
    base.lambda_pq = 1;
    base.lambda_qp = 1;
    base.gamma_pq = 1;
    base.value = evaluate_config(d[0], d[1], base.config(), {});
    if (perm) {
        const auto s = build_joint_samples(d[0], d[1], base.config());
        base.p_value = permutation_test(s.x_rows, s.y_rows, s.z_rows, {}, *perm).p_value;
    }
    return base;
}

SearchBounds small_bounds() {
    SearchBounds b;
    b.lambda_max = 3;
    b.gamma_max = 3;
    return b;
}

}  // namespace

TEST(MinConditioningGap, Values) {
    EXPECT_EQ(min_conditioning_gap(-4), 1);
    EXPECT_EQ(min_conditioning_gap(-1), 1);
    EXPECT_EQ(min_conditioning_gap(0), 1);
    EXPECT_EQ(min_conditioning_gap(1), 2);
    EXPECT_EQ(min_conditioning_gap(3), 4);
}

TEST(Ctmi, ExactlySymmetricUnderReversal) {
    const auto d = common_cause(600, 1);
    const auto a = ctmi(d[0], d[1], small_bounds());
    const auto b = ctmi(d[1], d[0], small_bounds());
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.gamma_pq, -b.gamma_pq);
    EXPECT_EQ(a.lambda_pq, b.lambda_qp);
    EXPECT_EQ(a.lambda_qp, b.lambda_pq);
}

TEST(Ctmi, ReportsTheGridMaximum) {
    const auto d = common_cause(500, 2);
    const auto r = ctmi(d[0], d[1], small_bounds());
    const auto configs = compatible_configs(d[0], d[1], 3, 3);
    EXPECT_NE(std::find(configs.begin(), configs.end(), r.config()), configs.end());
    EXPECT_EQ(evaluate_config(d[0], d[1], r.config(), {}), r.value);
    for (const auto& c : configs) EXPECT_LE(evaluate_config(d[0], d[1], c, {}), r.value);
}

TEST(Ctmi, FindsTheCommonCauseLag) {
    const auto d = common_cause(2000, 3);
    const auto r = ctmi(d[0], d[1], small_bounds());
    EXPECT_EQ(r.gamma_pq, 1);
    EXPECT_GT(r.value, 0.1);
}

TEST(Ctmi, IndependentNoiseIsNotSignificant) {
    std::mt19937_64 rng(4);
    const TimeSeries a{"a", noise(rng, 1000)};
    const TimeSeries b{"b", noise(rng, 1000)};
    const auto r = ctmi(a, b, small_bounds(), {}, PermutationParams{});
    ASSERT_TRUE(r.p_value.has_value());
    EXPECT_LT(std::abs(r.value), 0.05);
}

TEST(Ctmi, ExampleOneHasNoInstantaneousInformation) {
    Example1Params p;
    p.seed = 3;
    const auto d = generate_example1(p);
    EXPECT_NEAR(evaluate_config(d[0], d[1], {1, 1, 0}, {}), 0.0, 0.02);
    EXPECT_GT(evaluate_config(d[0], d[1], {1, 2, 1}, {}), 0.1);
}

TEST(Ctmi, IncomparableSeriesThrow) {
    std::mt19937_64 rng(5);
    const TimeSeries a{"a", noise(rng, 100)};
    const TimeSeries b{"b", noise(rng, 100), 1, Time(5000)};
    EXPECT_THROW(ctmi(a, b), NoCompatibleConfigError);
}

TEST(CondCtmi, CommonCauseExplainsDependence) {
    const auto d = common_cause(1000, 6);
    const PermutationParams perm;
    const auto base = unit_base(d, perm);
    EXPECT_LE(*base.p_value, 0.05);
    EXPECT_GT(base.value, 0.1);
    const auto c = cond_ctmi(d[0], d[1], base, {&d.series[2]}, small_bounds(), {}, perm);
    EXPECT_GT(*c.p_value, 0.05);
    EXPECT_LT(c.value, 0.03);
    // r_{t-1} drives both; the earliest admissible window start is t-2, so the window needs length 2.
    EXPECT_EQ(c.cond_gaps[0], 2);
    EXPECT_GE(c.cond_windows[0], 2);
}

TEST(CondCtmi, NeedsBothCommonCauses) {
    const auto d = two_common_causes(1000, 7);
    const PermutationParams perm;
    const auto base = unit_base(d, perm);
    ASSERT_LE(*base.p_value, 0.05);
    const auto both = cond_ctmi(d[0], d[1], base, {&d.series[2], &d.series[3]}, small_bounds(), {}, perm);
    EXPECT_GT(*both.p_value, 0.05);
    const auto only1 = cond_ctmi(d[0], d[1], base, {&d.series[2]}, small_bounds(), {}, perm);
    const auto only2 = cond_ctmi(d[0], d[1], base, {&d.series[3]}, small_bounds(), {}, perm);
    EXPECT_LE(*only1.p_value, 0.05);
    EXPECT_LE(*only2.p_value, 0.05);
}

TEST(CondCtmi, IrrelevantConditionerKeepsValue) {
    const auto d = common_cause(1000, 8);
    std::mt19937_64 rng(9);
    const TimeSeries junk{"z", noise(rng, 1000)};
    const PermutationParams perm;
    const auto base = unit_base(d);
    const auto c = cond_ctmi(d[0], d[1], base, {&junk}, small_bounds(), {}, perm);
    // Extra z dimensions bias the estimate down, but the dependence must survive.
    EXPECT_LE(c.value, base.value);
    EXPECT_GT(c.value, 0.6 * base.value);
    EXPECT_LE(*c.p_value, 0.05);
}

TEST(CondCtmi, OrientationIndependent) {
    const auto d = common_cause(800, 10);
    const auto base = ctmi(d[0], d[1], small_bounds());
    const auto a = cond_ctmi(d[0], d[1], base, {&d.series[2]}, small_bounds());
    const auto b = cond_ctmi(d[1], d[0], base.reversed(), {&d.series[2]}, small_bounds());
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.cond_windows, b.cond_windows);
    // Gaps are measured from the first argument's window: they differ by the pair's gap.
    EXPECT_EQ(b.cond_gaps[0] - a.cond_gaps[0], base.gamma_pq);
    const PermutationParams perm;
    EXPECT_EQ(cond_ctmi_p_value(d[0], d[1], base, {&d.series[2]}, a, small_bounds(), {}, perm),
              cond_ctmi_p_value(d[1], d[0], base.reversed(), {&d.series[2]}, b, small_bounds(), {}, perm));
}

TEST(CondCtmi, MinimumOnItsSearchPath) {
    const auto d = common_cause(600, 11);
    const auto base = ctmi(d[0], d[1], small_bounds());
    const auto c = cond_ctmi(d[0], d[1], base, {&d.series[2]}, small_bounds());
    // With one conditioner the search path is its whole (window, gap) grid.
    for (int w = 1; w <= 3; ++w) {
        for (int g = min_conditioning_gap(base.gamma_pq); g <= 3; ++g) {
            try {
                const auto s = conditional_samples(d[0], d[1], base, {{&d.series[2], w, g}}, 50);
                EXPECT_GE(knn_cmi(s.x_rows, s.y_rows, s.z_rows, {}) + 1e-12, c.value);
            } catch (const Error&) {
            }
        }
    }
}

TEST(CondCtmi, InfeasibleGap) {
    const auto d = common_cause(500, 12);
    CtmiResult base;
    base.gamma_pq = 3;  // needs a gap of at least 4
    EXPECT_THROW(cond_ctmi(d[0], d[1], base, {&d.series[2]}, small_bounds()), InfeasibleConditioningError);
    EXPECT_THROW(cond_ctmi(d[0], d[1], base, {}, small_bounds()), InvalidConfigError);
}
