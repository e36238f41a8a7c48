#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade_kde/density.hpp"
#include "cascade_kde/series.hpp"

namespace cascade_kde {

/// Ablation switches. All off is the full method.
struct RestorationVariant {
    bool no_truncation = false;    ///< integrate over the whole data range instead of the IQR support
    bool no_padding = false;       ///< skip boundary reflection
    bool fixed_grid = false;       ///< integrate over [fixed_grid_lower, fixed_grid_upper] everywhere
    bool fixed_bandwidth = false;  ///< bw0 at every stage
    bool one_dimensional = false;  ///< Nadaraya-Watson in time instead of the 2D density
    std::optional<int> fixed_k;    ///< run exactly this many stages, return the last
    std::optional<std::uint64_t> random_k_seed;  ///< draw the depth uniformly from 1..k_max

    [[nodiscard]] bool adaptive() const noexcept { return !fixed_k && !random_k_seed; }
};

struct RestorationConfig {
    double bw0 = 0.02;
    double bw_step = 0.01;
    int k_max = 5;
    double lambda = 1.0;
    double iqr_multiplier = 1.5;
    double r_t_factor = 3.0;
    int stop_patience = 2;
    /// Overrides the min(300, max(100, N)) grid rule when set.
    std::optional<int> grid_size;
    double fixed_grid_lower = -0.2;
    double fixed_grid_upper = 1.2;
    /// Experimental: per-stage Silverman bandwidth on the stage input.
    bool data_driven_bandwidth = false;
    /// Worker threads for the per-timestamp loop. Output does not depend on it.
    int threads = 1;
    RestorationVariant variant;

    /// Throws ConfigError.
    void validate() const;

    [[nodiscard]] int grid_size_for(Eigen::Index n) const;
    [[nodiscard]] Eigen::Index padding_for(Eigen::Index n) const;
    [[nodiscard]] Bandwidths bandwidths_for(int stage, const TimeSeries& stage_input) const;
};

struct Interval {
    double lower = 0;
    double upper = 1;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double y) const noexcept { return y >= lower && y <= upper; }
};

/// Truncation interval for one timestamp plus the window median used as
/// the fallback estimate.
struct LocalSupport {
    Interval omega;
    double window_median = 0.5;
    Eigen::Index window_size = 0;
};

/// Linear-interpolation quantile of an ascending-sorted sample.
[[nodiscard]] double sorted_quantile(std::span<const double> sorted, double p);

/// IQR support of the amplitudes within r_t of t_j, clamped to [0,1].
///
/// The window widens to the nearest four samples when fewer lie within
/// r_t. A zero IQR expands to [q - eps, q + eps]. If clamping empties the
/// interval, or the series has fewer than four samples, the result is [0,1].
[[nodiscard]] LocalSupport local_support(const TimeSeries& series, double t_j, double r_t,
                                         double iqr_multiplier, double degenerate_eps = 1e-3);

/// Density-weighted mean of y over `omega`, trapezoidal rule on a uniform
/// `grid_size`-node grid. Returns `fallback` (clamped into omega) when the
/// normalizer underflows below 1e-300. The result always lies in omega.
[[nodiscard]] double truncated_expectation(const DensityField& field, double t_j,
                                           const Interval& omega, int grid_size,
                                           double fallback);

/// One application of the restoration operator at stage k. Input and
/// output live in normalized units; timestamps are carried over unchanged.
[[nodiscard]] TimeSeries cascade_stage(const TimeSeries& previous, int stage,
                                       const RestorationConfig& config);

struct ParetoScore {
    double sharpness = 0;   ///< max |d2y/dt2| over interior stencil points
    double smoothness = 0;  ///< population std of d2y/dt2 over the same points
    double score = 0;       ///< sharpness - lambda * smoothness
};

/// Requires N >= 5 so at least one fully central second difference exists.
[[nodiscard]] ParetoScore pareto_score(const TimeSeries& series, double lambda);

enum class StopReason { patience, k_max, fixed_depth };

[[nodiscard]] std::string to_string(StopReason reason);

struct StageRecord {
    int stage = 0;
    Bandwidths bandwidths;
    ParetoScore score;
};

struct CascadeTrace {
    std::vector<StageRecord> stages;
    int selected = 0;
    StopReason stop_reason = StopReason::k_max;
};

/// One line per stage: k,h_t,h_y,sharpness,smoothness,score,selected.
void write_trace(std::ostream& out, const CascadeTrace& trace);

struct RestorationResult {
    TimeSeries restored;  ///< original units
    CascadeTrace trace;
};

/// Normalizes once, runs the cascade with Pareto-guided stopping, and
/// returns the best-scoring stage in original units.
[[nodiscard]] RestorationResult restore(const TimeSeries& series,
                                        const RestorationConfig& config = {});

}  // namespace cascade_kde
