#pragma once

#include <cstddef>
#include <vector>

#include "cascade_kde/series.hpp"

namespace cascade_kde {

/// Reported in place of +inf when the error sum is exactly zero.
inline constexpr double kSnrCapDb = 300.0;

struct PointwiseMetrics {
    double rmse = 0;
    double mae = 0;
    double snr_db = 0;
};

struct DerivativeMetrics {
    double derivative_rmse = 0;
    double derivative_snr_db = 0;
    double feature_snr_db = 0;  ///< same quantity as derivative_snr_db
};

struct PeakSet {
    std::vector<std::size_t> indices;
    std::vector<double> amplitudes;
    std::vector<double> prominences;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices.empty(); }
};

struct PeakMetrics {
    double f1 = 0;
    double amplitude_error = 0;  ///< NaN when nothing matched
    double location_error = 0;   ///< NaN when nothing matched
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
};

struct MetricsReport {
    double rmse = 0;
    double mae = 0;
    double snr_db = 0;
    double feature_snr_db = 0;
    double derivative_rmse = 0;
    double derivative_snr_db = 0;
    double peak_f1 = 0;
    double peak_amplitude_error = 0;
    double peak_location_error = 0;
};

struct MetricsOptions {
    double prominence_threshold = 0.05;  ///< normalized units (truth's amplitude range)
    std::size_t peak_tolerance = 3;      ///< samples
};

/// SNR in dB of `signal` against `error`, capped at +/-kSnrCapDb.
[[nodiscard]] double snr_db(const VectorXd& signal, const VectorXd& error);

[[nodiscard]] PointwiseMetrics pointwise_metrics(const VectorXd& truth, const VectorXd& estimate);

[[nodiscard]] DerivativeMetrics derivative_metrics(const VectorXd& truth, const VectorXd& estimate,
                                                   const VectorXd& times);

/// Local maxima (y[i] > y[i-1], y[i] >= y[i+1]) whose topographic
/// prominence reaches the threshold.
[[nodiscard]] PeakSet detect_peaks(const VectorXd& values, double prominence_threshold = 0.05);

/// Greedy nearest-first one-to-one matching within +/- tolerance samples.
[[nodiscard]] PeakMetrics peak_metrics(const PeakSet& truth, const PeakSet& estimate,
                                       std::size_t tolerance = 3);

/// Every metric of the report. Peaks are detected after mapping both
/// series through the truth's amplitude normalization.
[[nodiscard]] MetricsReport evaluate(const TimeSeries& truth, const TimeSeries& estimate,
                                     const MetricsOptions& options = {});

}  // namespace cascade_kde
