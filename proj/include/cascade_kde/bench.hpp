#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cascade_kde/baselines.hpp"
#include "cascade_kde/corruption.hpp"
#include "cascade_kde/metrics.hpp"
#include "cascade_kde/restoration.hpp"

namespace cascade_kde {

struct DatasetEntry {
    std::string id;
    std::variant<SyntheticSignalSpec, std::filesystem::path> source;
};

/// The seed is replaced per run by the plan's seed.
struct CorruptionEntry {
    std::string id;
    CorruptionSpec spec;
};

struct MethodEntry {
    std::string id;
    std::variant<RestorationConfig, BaselineSpec> method;
};

struct BenchmarkPlan {
    std::vector<DatasetEntry> datasets;
    std::vector<CorruptionEntry> corruptions;
    std::vector<MethodEntry> methods;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::filesystem::path output;
    MetricsOptions metrics;
    int threads = 1;

    /// Non-empty lists, distinct seeds and ids, valid specs. Throws ConfigError.
    void validate() const;
    [[nodiscard]] std::size_t cardinality() const noexcept {
        return datasets.size() * corruptions.size() * methods.size() * seeds.size();
    }
};

/// Relative CSV dataset paths resolve against `base_dir`.
[[nodiscard]] BenchmarkPlan load_plan(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] BenchmarkPlan load_plan(const std::filesystem::path& path);

inline constexpr std::array<std::string_view, 9> kMetricColumns{
    "rmse",           "mae",           "snr_db",
    "feature_snr_db", "derivative_rmse", "derivative_snr_db",
    "peak_f1",        "peak_amp_err",  "peak_loc_err",
};

[[nodiscard]] std::array<double, 9> metric_values(const MetricsReport& report);

struct ResultRow {
    std::string dataset;
    std::string corruption;
    std::string method;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    double wall_time_ms = 0;
    std::string error;  ///< empty on success
};

struct AggregateRow {
    std::string dataset;
    std::string corruption;
    std::string method;
    std::size_t runs = 0;
    std::array<double, 9> mean{};
    std::array<double, 9> std{};  ///< population
    double wall_time_ms_mean = 0;
};

struct BenchmarkResult {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;
};

/// One row per (dataset, corruption, method, seed) in plan order. A dataset
/// that fails to load yields error rows; the run continues.
[[nodiscard]] BenchmarkResult run_plan(const BenchmarkPlan& plan);

/// Mean and population std per (dataset, corruption, method) over rows
/// without an error. NaN metric values are left out of their column.
[[nodiscard]] std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
/// Method, RMSE, feature SNR, derivative RMSE, peak F1 as "mean ± std".
void write_summary_table(std::ostream& out, const std::vector<AggregateRow>& rows);

struct ScalingRow {
    Eigen::Index length = 0;
    double wall_time_ms = 0;
};

/// Median restore time over `repetitions` runs on a noisy sine of each length.
[[nodiscard]] std::vector<ScalingRow> runtime_sweep(const std::vector<Eigen::Index>& lengths,
                                                    const RestorationConfig& config,
                                                    int repetitions = 5);

}  // namespace cascade_kde
