#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cascade_kde/series.hpp"

namespace cascade_kde {

enum class SignalKind { sine, multi_peak, damped_oscillation, degradation_curve };

[[nodiscard]] std::string to_string(SignalKind kind);
[[nodiscard]] SignalKind signal_kind_from_string(std::string_view name);

/// Clean synthetic ground truth on a uniform grid over [0,1].
struct SyntheticSignalSpec {
    SignalKind kind = SignalKind::sine;
    Eigen::Index length = 500;
    double frequency = 2.0;   ///< sine, damped_oscillation (cycles over the unit interval)
    int peak_count = 3;       ///< multi_peak
    double decay_rate = 3.0;  ///< damped_oscillation
    double knee = 0.7;        ///< degradation_curve, knee position in [0.05, 0.95]

    void validate() const;
};

/// Deterministic; every kind except sine is rescaled onto [0,1].
[[nodiscard]] TimeSeries generate_clean(const SyntheticSignalSpec& spec);

enum class CorruptionKind {
    gaussian,
    impulse,
    mixed,
    missing_segment,
    spike_cluster,
    drift_plus_impulse,
    near_peak_impulse,
};

[[nodiscard]] std::string to_string(CorruptionKind kind);
[[nodiscard]] CorruptionKind corruption_kind_from_string(std::string_view name);

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::mixed;
    double sigma = 0.10;      ///< Gaussian std, normalized units
    double ratio = 0.10;      ///< fraction of corrupted samples
    double amplitude = 0.50;  ///< impulse magnitude (ramp height for drift), normalized units
    std::uint64_t seed = 1;
    /// Impulse values are clipped to [-0.25, 1.25] unless this is false.
    bool clip_impulses = true;

    void validate() const;
};

inline constexpr double kImpulseClipLower = -0.25;
inline constexpr double kImpulseClipUpper = 1.25;

struct CorruptedSeries {
    TimeSeries series;
    std::vector<bool> outlier_mask;  ///< impulse or missing samples
};

/// Number of corrupted samples the formula prescribes for `ratio` and N:
/// ceil(ratio * N), tolerant of representation error in ratio * N.
[[nodiscard]] Eigen::Index corrupted_count(double ratio, Eigen::Index n);

/// Applies one corruption scenario to a series with amplitudes in the unit
/// box. Same series and spec give the same output on every call.
[[nodiscard]] CorruptedSeries corrupt(const TimeSeries& series, const CorruptionSpec& spec);

}  // namespace cascade_kde
