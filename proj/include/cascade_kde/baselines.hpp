#pragma once

#include <string>
#include <string_view>

#include "cascade_kde/series.hpp"

namespace cascade_kde {

enum class BaselineKind {
    moving_average,
    gaussian_filter,
    median_filter,
    savitzky_golay,
    trimmed_mean,
    hampel_sg,
    nadaraya_watson,
};

[[nodiscard]] std::string to_string(BaselineKind kind);
/// Throws ConfigError on an unknown name.
[[nodiscard]] BaselineKind baseline_kind_from_string(std::string_view name);

struct BaselineSpec {
    BaselineKind kind = BaselineKind::moving_average;
    int window = 11;              ///< odd, >= 3; in samples
    int polyorder = 3;            ///< Savitzky-Golay only
    double sigma = 2.0;           ///< Gaussian filter std, in samples
    double trim = 0.2;            ///< fraction cut from each tail
    double hampel_threshold = 3.0;
    double bandwidth = 0.02;      ///< Nadaraya-Watson, in units of the series' time span

    /// Throws ConfigError.
    void validate() const;
};

/// Length- and timestamp-preserving smoother. Window filters reflect the
/// series about its end samples; Savitzky-Golay instead fits the edge
/// window and evaluates it off-center, so polynomials of degree <=
/// polyorder pass through unchanged everywhere.
[[nodiscard]] TimeSeries apply_baseline(const TimeSeries& series, const BaselineSpec& spec);

/// sum_i y_i K_h(t - t_i) / sum_i K_h(t - t_i) with a Gaussian kernel, at
/// each query time. Falls back to the nearest sample where every weight
/// underflows.
[[nodiscard]] VectorXd nw_regression(const TimeSeries& series, double bandwidth,
                                     const VectorXd& query_times);

}  // namespace cascade_kde
