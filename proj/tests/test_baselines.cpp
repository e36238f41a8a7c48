#include <gtest/gtest.h>

#include <algorithm>

#include "cascade_kde/baselines.hpp"
#include "test_support.hpp"

using namespace cascade_kde;
using testsupport::uniform_series;

namespace {

BaselineSpec spec_of(BaselineKind kind, int window = 11) {
    BaselineSpec s;
    s.kind = kind;
    s.window = window;
    return s;
}

constexpr BaselineKind kAll[] = {BaselineKind::moving_average, BaselineKind::gaussian_filter,
                                 BaselineKind::median_filter,  BaselineKind::savitzky_golay,
                                 BaselineKind::trimmed_mean,   BaselineKind::hampel_sg,
                                 BaselineKind::nadaraya_watson};

// Reflection about the end samples, written as explicit cases.
std::size_t reflect_index(long i, long n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return static_cast<std::size_t>(i);
}

}  // namespace

TEST(MovingAverage, AlternatingSeries) {
    const auto out = apply_baseline(uniform_series({0, 3, 0, 3, 0}), spec_of(BaselineKind::moving_average, 3));
    // Windows {0,3,0}, {3,0,3}, {0,3,0} in the interior; {3,0,3} at each mirrored end.
    EXPECT_DOUBLE_EQ(out.values()[1], 1.0);
    EXPECT_DOUBLE_EQ(out.values()[2], 2.0);
    EXPECT_DOUBLE_EQ(out.values()[3], 1.0);
    EXPECT_DOUBLE_EQ(out.values()[0], 2.0);
    EXPECT_DOUBLE_EQ(out.values()[4], 2.0);
}

TEST(MedianFilter, RemovesSingleSpike) {
    const auto out = apply_baseline(uniform_series({0, 0, 9, 0, 0}), spec_of(BaselineKind::median_filter, 3));
    for (Eigen::Index i = 1; i < 4; ++i) EXPECT_EQ(out.values()[i], 0.0);
}

TEST(SavitzkyGolay, ReproducesQuadratic) {
    std::vector<double> v;
    for (int i = 0; i < 15; ++i) v.push_back(0.3 * i * i - 2.0 * i + 1.0);
    auto s = spec_of(BaselineKind::savitzky_golay, 5);
    s.polyorder = 2;
    const auto out = apply_baseline(uniform_series(v), s);
    for (Eigen::Index i = 0; i < 15; ++i) EXPECT_NEAR(out.values()[i], v[static_cast<std::size_t>(i)], 1e-10);
}

TEST(SavitzkyGolay, ReproducesCubicOnIrregularTimes) {
    std::mt19937_64 rng(1);
    const auto base = testsupport::random_series(rng, 30);
    const VectorXd& t = base.times();
    const VectorXd y = (0.01 * t.array().cube() - 0.2 * t.array().square() + t.array()).matrix();
    const auto out = apply_baseline(TimeSeries(t, y), spec_of(BaselineKind::savitzky_golay, 7));
    EXPECT_LE((out.values() - y).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GaussianFilter, MatchesWeightOracle) {
    std::mt19937_64 rng(2);
    const auto s = testsupport::random_unit_series(rng, 40);
    BaselineSpec spec = spec_of(BaselineKind::gaussian_filter);
    spec.sigma = 1.7;
    const auto out = apply_baseline(s, spec);
    const long radius = 7;  // ceil(4 * 1.7)
    for (long i = 0; i < 40; ++i) {
        double num = 0, den = 0;
        for (long k = -radius; k <= radius; ++k) {
            const double w = std::exp(-0.5 * k * k / (1.7 * 1.7));
            num += w * s.values()[static_cast<Eigen::Index>(reflect_index(i + k, 40))];
            den += w;
        }
        EXPECT_NEAR(out.values()[i], num / den, 1e-12);
    }
}

TEST(TrimmedMean, MatchesSortOracle) {
    std::mt19937_64 rng(3);
    const auto s = testsupport::random_unit_series(rng, 30);
    BaselineSpec spec = spec_of(BaselineKind::trimmed_mean, 7);
    spec.trim = 0.3;
    const auto out = apply_baseline(s, spec);
    for (long i = 0; i < 30; ++i) {
        std::vector<double> w;
        for (long k = -3; k <= 3; ++k) w.push_back(s.values()[static_cast<Eigen::Index>(reflect_index(i + k, 30))]);
        std::sort(w.begin(), w.end());
        // floor(0.3 * 7) = 2 dropped from each tail
        const double m = (w[2] + w[3] + w[4]) / 3.0;
        EXPECT_NEAR(out.values()[i], m, 1e-12);
    }
}

TEST(HampelSg, SuppressesIsolatedSpike) {
    std::vector<double> v;
    for (int i = 0; i < 40; ++i) v.push_back(0.02 * i);
    v[20] = 5.0;
    auto spec = spec_of(BaselineKind::hampel_sg, 7);
    spec.polyorder = 2;
    const auto out = apply_baseline(uniform_series(v), spec);
    EXPECT_NEAR(out.values()[20], 0.4, 0.02);
}

TEST(NwRegression, TinyBandwidthHitsDataPoint) {
    const auto s = uniform_series({0.1, 0.9, 0.3, 0.7, 0.5});
    VectorXd q(1);
    q << 2.0;
    EXPECT_NEAR(nw_regression(s, 1e-3, q)[0], 0.3, 1e-15);
    q << 2.4;
    EXPECT_EQ(nw_regression(s, 1e-4, q)[0], 0.3);  // weights underflow: nearest point
}

TEST(NwRegression, MatchesSummationOracle) {
    std::mt19937_64 rng(4);
    const auto s = testsupport::random_series(rng, 20, -2, 3);
    const auto ts = testsupport::to_std(s.times());
    const auto ys = testsupport::to_std(s.values());
    const VectorXd q = VectorXd::LinSpaced(33, -1, ts.back() + 1);
    const VectorXd out = nw_regression(s, 1.3, q);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(out[i], testsupport::nw_oracle(ts, ys, 1.3, q[i]), 1e-12);
        EXPECT_GE(out[i], s.values().minCoeff() - 1e-15);
        EXPECT_LE(out[i], s.values().maxCoeff() + 1e-15);
    }
    EXPECT_THROW((void)nw_regression(s, 0.0, q), InvalidInput);
}

TEST(Baselines, ConstantSeriesFixedAndLengthPreserved) {
    std::mt19937_64 rng(5);
    const auto base = testsupport::random_series(rng, 25);
    const TimeSeries c(base.times(), VectorXd::Constant(25, -1.75));
    for (auto kind : kAll) {
        const auto out = apply_baseline(c, spec_of(kind));
        EXPECT_EQ(out.size(), 25);
        EXPECT_TRUE(out.times() == c.times());
        EXPECT_LE((out.values().array() + 1.75).abs().maxCoeff(), 1e-12) << to_string(kind);
        const auto noisy = apply_baseline(base, spec_of(kind));
        EXPECT_EQ(noisy.size(), 25);
        EXPECT_TRUE(noisy.times() == base.times());
    }
}

TEST(BaselineSpec, Validation) {
    auto s = spec_of(BaselineKind::moving_average, 4);
    EXPECT_THROW((void)apply_baseline(uniform_series({1, 2, 3, 4, 5}), s), ConfigError);
    s.window = 1;
    EXPECT_THROW(s.validate(), ConfigError);
    s = spec_of(BaselineKind::savitzky_golay, 5);
    s.polyorder = 5;
    EXPECT_THROW(s.validate(), ConfigError);
    s = spec_of(BaselineKind::trimmed_mean);
    s.trim = 0.5;
    EXPECT_THROW(s.validate(), ConfigError);
    for (auto kind : kAll) EXPECT_EQ(baseline_kind_from_string(to_string(kind)), kind);
    EXPECT_THROW((void)baseline_kind_from_string("kalman"), ConfigError);
}
