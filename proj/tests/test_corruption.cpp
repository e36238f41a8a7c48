#include <gtest/gtest.h>

#include <cmath>

#include "cascade_kde/corruption.hpp"
#include "cascade_kde/metrics.hpp"
#include "test_support.hpp"

using namespace cascade_kde;

namespace {

TimeSeries signal(SignalKind kind, Eigen::Index n) {
    SyntheticSignalSpec s;
    s.kind = kind;
    s.length = n;
    return generate_clean(s);
}

std::size_t count_true(const std::vector<bool>& m) {
    std::size_t c = 0;
    for (bool b : m) c += b ? 1 : 0;
    return c;
}

constexpr CorruptionKind kAllKinds[] = {
    CorruptionKind::gaussian,        CorruptionKind::impulse,         CorruptionKind::mixed,
    CorruptionKind::missing_segment, CorruptionKind::spike_cluster,   CorruptionKind::drift_plus_impulse,
    CorruptionKind::near_peak_impulse};

}  // namespace

TEST(GenerateClean, SineClosedForm) {
    const auto s = signal(SignalKind::sine, 100);
    ASSERT_EQ(s.size(), 100);
    for (Eigen::Index i = 0; i < 100; ++i) {
        const double t = static_cast<double>(i) / 99.0;
        EXPECT_NEAR(s.times()[i], t, 1e-15);
        EXPECT_NEAR(s.values()[i], (std::sin(2 * testsupport::kPi * 2 * t) + 1) / 2, 1e-12);
    }
}

TEST(GenerateClean, MultiPeakHasThreeProminentPeaks) {
    const auto s = signal(SignalKind::multi_peak, 200);
    const auto peaks = detect_peaks(s.values(), 0.05);
    EXPECT_EQ(peaks.size(), 3u);
    for (double p : peaks.prominences) EXPECT_GE(p, 0.1);
    for (int count : {2, 4, 5}) {
        SyntheticSignalSpec spec;
        spec.kind = SignalKind::multi_peak;
        spec.peak_count = count;
        spec.length = 300;
        EXPECT_EQ(detect_peaks(generate_clean(spec).values(), 0.1).size(), static_cast<std::size_t>(count));
    }
}

TEST(GenerateClean, DegradationMonotoneWithKnee) {
    const auto s = signal(SignalKind::degradation_curve, 150);
    const auto& y = s.values();
    double early = 0, late = 0;
    for (Eigen::Index i = 1; i < y.size(); ++i) {
        EXPECT_LE(y[i], y[i - 1] + 1e-15);
        const double drop = y[i - 1] - y[i];
        if (i < 50) early = std::max(early, drop);
        if (i > 130) late = std::max(late, drop);
    }
    EXPECT_GT(late, 2 * early);
}

TEST(GenerateClean, AllKindsInUnitBoxAndDeterministic) {
    for (auto kind : {SignalKind::sine, SignalKind::multi_peak, SignalKind::damped_oscillation,
                      SignalKind::degradation_curve}) {
        const auto a = signal(kind, 64);
        const auto b = signal(kind, 64);
        EXPECT_TRUE(a.values() == b.values());
        EXPECT_GE(a.values().minCoeff(), 0.0);
        EXPECT_LE(a.values().maxCoeff(), 1.0);
        if (kind != SignalKind::sine) {
            // The sine is a closed form and its samples need not hit the extremes.
            EXPECT_NEAR(a.values().minCoeff(), 0.0, 1e-12);
            EXPECT_NEAR(a.values().maxCoeff(), 1.0, 1e-12);
        }
        EXPECT_EQ(a.times()[0], 0.0);
        EXPECT_EQ(a.times()[63], 1.0);
    }
    SyntheticSignalSpec bad;
    bad.length = 31;
    EXPECT_THROW((void)generate_clean(bad), InvalidInput);
    EXPECT_THROW((void)signal_kind_from_string("square"), InvalidInput);
}

TEST(Corrupt, ZeroSigmaGaussianIsIdentity) {
    const auto s = signal(SignalKind::sine, 100);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::gaussian;
    spec.sigma = 0;
    const auto out = corrupt(s, spec);
    EXPECT_TRUE(out.series.values() == s.values());
    EXPECT_EQ(count_true(out.outlier_mask), 0u);
}

TEST(Corrupt, ImpulseCountAndMagnitude) {
    const auto s = signal(SignalKind::sine, 100);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::impulse;
    spec.ratio = 0.10;
    spec.amplitude = 0.2;
    const auto out = corrupt(s, spec);
    EXPECT_EQ(count_true(out.outlier_mask), 10u);
    for (Eigen::Index i = 0; i < 100; ++i) {
        const double d = std::abs(out.series.values()[i] - s.values()[i]);
        if (out.outlier_mask[static_cast<std::size_t>(i)]) {
            EXPECT_NEAR(d, 0.2, 1e-12);
        } else {
            EXPECT_EQ(d, 0.0);
        }
    }
}

TEST(Corrupt, ImpulseClipping) {
    const auto s = signal(SignalKind::sine, 100);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::impulse;
    spec.amplitude = 40.0;
    const auto clipped = corrupt(s, spec).series.values();
    EXPECT_GE(clipped.minCoeff(), kImpulseClipLower);
    EXPECT_LE(clipped.maxCoeff(), kImpulseClipUpper);
    spec.clip_impulses = false;
    const auto raw = corrupt(s, spec);
    for (Eigen::Index i = 0; i < 100; ++i) {
        if (raw.outlier_mask[static_cast<std::size_t>(i)]) {
            EXPECT_NEAR(std::abs(raw.series.values()[i] - s.values()[i]), 40.0, 1e-12);
        }
    }
}

TEST(Corrupt, MixedNoiseStatistics) {
    const auto s = signal(SignalKind::sine, 500);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::mixed;
    const auto out = corrupt(s, spec);
    std::vector<double> resid;
    for (Eigen::Index i = 0; i < 500; ++i) {
        if (!out.outlier_mask[static_cast<std::size_t>(i)]) resid.push_back(out.series.values()[i] - s.values()[i]);
    }
    const double m = testsupport::mean(resid);
    double v = 0;
    for (double r : resid) v += (r - m) * (r - m);
    const double sd = std::sqrt(v / static_cast<double>(resid.size() - 1));
    EXPECT_GE(sd, 0.08);
    EXPECT_LE(sd, 0.12);
    EXPECT_EQ(count_true(out.outlier_mask), 50u);
}

TEST(Corrupt, MaskCountsMatchFormula) {
    const auto s = signal(SignalKind::multi_peak, 300);
    for (auto kind : kAllKinds) {
        for (double ratio : {0.05, 0.1, 0.2, 0.3}) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                CorruptionSpec spec;
                spec.kind = kind;
                spec.ratio = ratio;
                spec.seed = seed;
                const auto out = corrupt(s, spec);
                const auto n = static_cast<std::size_t>(std::ceil(ratio * 300 - 1e-9));
                std::size_t expected = n;
                if (kind == CorruptionKind::gaussian) expected = 0;
                if (kind == CorruptionKind::spike_cluster) expected = 3 * static_cast<std::size_t>(std::ceil(ratio * 300 / 3 - 1e-9));
                if (kind == CorruptionKind::near_peak_impulse) expected = std::min<std::size_t>(n, 3 * 7);
                EXPECT_EQ(count_true(out.outlier_mask), expected)
                    << to_string(kind) << " ratio=" << ratio << " seed=" << seed;
            }
        }
    }
}

TEST(Corrupt, MissingSegmentHoldsLastValue) {
    const auto s = signal(SignalKind::sine, 200);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::missing_segment;
    spec.ratio = 0.1;
    const auto out = corrupt(s, spec);
    Eigen::Index first = -1, last = -1;
    for (Eigen::Index i = 0; i < 200; ++i) {
        if (out.outlier_mask[static_cast<std::size_t>(i)]) {
            if (first < 0) first = i;
            last = i;
        }
    }
    ASSERT_GT(first, 0);
    EXPECT_EQ(last - first + 1, 20);
    for (Eigen::Index i = first; i <= last; ++i) EXPECT_EQ(out.series.values()[i], s.values()[first - 1]);
}

TEST(Corrupt, SpikeClustersAreRunsOfThree) {
    const auto s = signal(SignalKind::sine, 300);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::spike_cluster;
    spec.ratio = 0.1;
    const auto m = corrupt(s, spec).outlier_mask;
    std::size_t run = 0;
    for (std::size_t i = 0; i <= m.size(); ++i) {
        if (i < m.size() && m[i]) {
            ++run;
        } else {
            if (run > 0) {
                EXPECT_EQ(run % 3, 0u);
            }
            run = 0;
        }
    }
}

TEST(Corrupt, NearPeakImpulsesStayNearPeaks) {
    const auto s = signal(SignalKind::multi_peak, 300);
    const auto peaks = detect_peaks(s.values(), 0.05);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::near_peak_impulse;
    spec.ratio = 0.05;
    const auto m = corrupt(s, spec).outlier_mask;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        bool near = false;
        for (auto p : peaks.indices) near = near || (i + 3 >= p && i <= p + 3);
        EXPECT_TRUE(near) << i;
    }
}

TEST(Corrupt, DriftAddsRamp) {
    const auto s = signal(SignalKind::sine, 200);
    CorruptionSpec spec;
    spec.kind = CorruptionKind::drift_plus_impulse;
    spec.amplitude = 0.3;
    const auto out = corrupt(s, spec);
    const auto& y = out.series.values();
    EXPECT_NEAR(y[0] - s.values()[0], 0.0, 1e-12 + (out.outlier_mask[0] ? 1.0 : 0.0));
    if (!out.outlier_mask[199]) {
        EXPECT_NEAR(y[199] - s.values()[199], 0.3, 1e-12);
    }
}

TEST(Corrupt, DeterministicPerSeedAndValidated) {
    const auto s = signal(SignalKind::sine, 128);
    for (auto kind : kAllKinds) {
        CorruptionSpec spec;
        spec.kind = kind;
        spec.seed = 42;
        const auto a = corrupt(s, spec);
        const auto b = corrupt(s, spec);
        EXPECT_TRUE(a.series.values() == b.series.values()) << to_string(kind);
        EXPECT_EQ(a.outlier_mask, b.outlier_mask);
        EXPECT_TRUE(a.series.times() == s.times());
        if (kind != CorruptionKind::gaussian) {
            spec.seed = 43;
            EXPECT_FALSE(corrupt(s, spec).series.values() == a.series.values()) << to_string(kind);
        }
    }
    CorruptionSpec spec;
    spec.kind = CorruptionKind::impulse;
    const TimeSeries raw(s.times(), (s.values().array() * 10).matrix());
    EXPECT_THROW((void)corrupt(raw, spec), InvalidInput);
    spec.ratio = 0.005;
    EXPECT_THROW((void)corrupt(s, spec), InvalidInput);
    spec.ratio = 1.5;
    EXPECT_THROW((void)corrupt(s, spec), InvalidInput);
    spec.ratio = 0.1;
    spec.sigma = NAN;
    EXPECT_THROW((void)corrupt(s, spec), InvalidInput);
}

TEST(Corrupt, KindNamesRoundTrip) {
    for (auto kind : kAllKinds) EXPECT_EQ(corruption_kind_from_string(to_string(kind)), kind);
    EXPECT_THROW((void)corruption_kind_from_string("salt"), InvalidInput);
}
