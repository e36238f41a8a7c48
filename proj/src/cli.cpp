#include "cascade_kde/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_kde/bench.hpp"
#include "cascade_kde/config_io.hpp"
#include "cascade_kde/csv.hpp"
#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

/// Sets or replaces `key` in `kv`.
void put(KeyValues& kv, const std::string& key, const std::string& value) {
    for (auto& [k, v] : kv) {
        if (k == key) {
            v = value;
            return;
        }
    }
    kv.emplace_back(key, value);
}

template <typename T>
void put_if(KeyValues& kv, const std::string& key, const std::optional<T>& value) {
    if (!value) return;
    if constexpr (std::is_same_v<T, double>) {
        put(kv, key, format_number(*value));
    } else if constexpr (std::is_same_v<T, std::string>) {
        put(kv, key, *value);
    } else {
        put(kv, key, std::to_string(*value));
    }
}

KeyValues flat_config(const std::string& path) {
    KeyValues kv;
    for (const auto& section : parse_ini(std::filesystem::path(path))) {
        if (!section.name.empty()) {
            throw ConfigError("config '" + path + "': sections are not allowed here");
        }
        kv = section.entries;
    }
    return kv;
}

/// Runs `write` against stdout for "-", otherwise against the named file.
template <typename Write>
void with_output(const std::string& path, std::ostream& out, Write&& write) {
    if (path == "-") {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    write(file);
    if (!file) throw IoError("write to '" + path + "' failed");
}

struct RestoreOptions {
    std::string input, output, method = "cascade", config, trace;
    std::optional<int> k_max, fixed_k, grid_size, threads, stop_patience;
    std::optional<double> bw0, bw_step, lambda, iqr_multiplier, r_t_factor;
    std::optional<std::uint64_t> random_k;
    bool no_truncation = false, no_padding = false, fixed_grid = false, fixed_bandwidth = false,
         one_dimensional = false;
    std::optional<int> window, polyorder;
    std::optional<double> sigma, trim, hampel_threshold, bandwidth;
};

int run_restore(const RestoreOptions& o, std::ostream& out) {
    KeyValues kv = o.config.empty() ? KeyValues{} : flat_config(o.config);
    const auto series = read_series_csv(std::filesystem::path(o.input)).series;
    if (o.method == "cascade") {
        put_if(kv, "k_max", o.k_max);
        put_if(kv, "fixed_k", o.fixed_k);
        put_if(kv, "grid_size", o.grid_size);
        put_if(kv, "threads", o.threads);
        put_if(kv, "stop_patience", o.stop_patience);
        put_if(kv, "bw0", o.bw0);
        put_if(kv, "bw_step", o.bw_step);
        put_if(kv, "lambda", o.lambda);
        put_if(kv, "iqr_multiplier", o.iqr_multiplier);
        put_if(kv, "r_t_factor", o.r_t_factor);
        put_if(kv, "random_k", o.random_k);
        if (o.no_truncation) put(kv, "no_truncation", "true");
        if (o.no_padding) put(kv, "no_padding", "true");
        if (o.fixed_grid) put(kv, "fixed_grid", "true");
        if (o.fixed_bandwidth) put(kv, "fixed_bandwidth", "true");
        if (o.one_dimensional) put(kv, "one_dimensional", "true");
        const auto config = restoration_config_from(kv);
        const auto result = restore(series, config);
        with_output(o.output, out, [&](std::ostream& s) { write_series_csv(s, result.restored); });
        if (!o.trace.empty()) {
            with_output(o.trace, out, [&](std::ostream& s) { write_trace(s, result.trace); });
        }
        return kExitOk;
    }
    put(kv, "kind", o.method);
    put_if(kv, "window", o.window);
    put_if(kv, "polyorder", o.polyorder);
    put_if(kv, "sigma", o.sigma);
    put_if(kv, "trim", o.trim);
    put_if(kv, "hampel_threshold", o.hampel_threshold);
    put_if(kv, "bandwidth", o.bandwidth);
    const auto spec = baseline_spec_from(kv);
    if (!o.trace.empty()) throw ConfigError("--trace applies to the cascade method only");
    const auto restored = apply_baseline(series, spec);
    with_output(o.output, out, [&](std::ostream& s) { write_series_csv(s, restored); });
    return kExitOk;
}

std::vector<Eigen::Index> parse_lengths(const std::string& text) {
    std::vector<Eigen::Index> lengths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 32) throw std::invalid_argument(item);
            lengths.push_back(static_cast<Eigen::Index>(v));
        } catch (const std::exception&) {
            throw ConfigError("--lengths: expected integers >= 32, got '" + item + "'");
        }
    }
    if (lengths.empty()) throw ConfigError("--lengths: empty list");
    return lengths;
}

std::filesystem::path aggregate_path_for(const std::filesystem::path& results) {
    auto p = results;
    p.replace_filename(results.stem().string() + ".aggregate.csv");
    return p;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cascade-KDE time-series restoration and benchmark tool", "cascade-kde"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Write a clean synthetic series as CSV");
    SyntheticSignalSpec signal;
    std::string signal_name = "sine";
    std::string generate_output;
    generate->add_option("--signal", signal_name, "sine | multi_peak | damped_oscillation | degradation_curve")
        ->capture_default_str();
    generate->add_option("--length", signal.length, "Number of samples (>= 32)")->capture_default_str();
    generate->add_option("--frequency", signal.frequency, "Cycles over the unit interval")
        ->capture_default_str();
    generate->add_option("--peaks", signal.peak_count, "multi_peak: number of peaks")->capture_default_str();
    generate->add_option("--decay", signal.decay_rate, "damped_oscillation: decay rate")
        ->capture_default_str();
    generate->add_option("--knee", signal.knee, "degradation_curve: knee position")->capture_default_str();
    generate->add_option("--output,-o", generate_output, "Output CSV ('-' for stdout)")->required();

    // corrupt
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply a seeded corruption scenario");
    CorruptionSpec corruption;
    std::string corruption_name = "mixed";
    std::string corrupt_input, corrupt_output;
    bool with_mask = false, no_clip = false, normalize_first = false;
    corrupt_cmd->add_option("--input,-i", corrupt_input, "Input CSV")->required();
    corrupt_cmd->add_option("--output,-o", corrupt_output, "Output CSV ('-' for stdout)")->required();
    corrupt_cmd->add_option("--kind", corruption_name,
                            "gaussian | impulse | mixed | missing_segment | spike_cluster | "
                            "drift_plus_impulse | near_peak_impulse")
        ->capture_default_str();
    corrupt_cmd->add_option("--sigma", corruption.sigma)->capture_default_str();
    corrupt_cmd->add_option("--ratio", corruption.ratio)->capture_default_str();
    corrupt_cmd->add_option("--amplitude", corruption.amplitude)->capture_default_str();
    corrupt_cmd->add_option("--seed", corruption.seed)->capture_default_str();
    corrupt_cmd->add_flag("--mask", with_mask, "Add a 0/1 mask column");
    corrupt_cmd->add_flag("--no-clip", no_clip, "Do not clip impulse values");
    corrupt_cmd->add_flag("--normalize", normalize_first, "Map the input to the unit box first");

    // restore
    auto* restore_cmd = app.add_subcommand("restore", "Restore a series with Cascade-KDE or a baseline");
    RestoreOptions ro;
    restore_cmd->add_option("--input,-i", ro.input, "Input CSV")->required();
    restore_cmd->add_option("--output,-o", ro.output, "Output CSV ('-' for stdout)")->required();
    restore_cmd->add_option("--method", ro.method,
                            "cascade | moving_average | gaussian_filter | median_filter | "
                            "savitzky_golay | trimmed_mean | hampel_sg | nadaraya_watson")
        ->capture_default_str();
    restore_cmd->add_option("--config", ro.config, "Flat key = value file for the method");
    restore_cmd->add_option("--trace", ro.trace, "Write the cascade trace ('-' for stdout)");
    restore_cmd->add_option("--k-max", ro.k_max);
    restore_cmd->add_option("--fixed-k", ro.fixed_k);
    restore_cmd->add_option("--random-k", ro.random_k, "Draw the depth with this seed");
    restore_cmd->add_option("--grid-size", ro.grid_size);
    restore_cmd->add_option("--threads", ro.threads);
    restore_cmd->add_option("--stop-patience", ro.stop_patience);
    restore_cmd->add_option("--bw0", ro.bw0);
    restore_cmd->add_option("--bw-step", ro.bw_step);
    restore_cmd->add_option("--lambda", ro.lambda);
    restore_cmd->add_option("--iqr-multiplier", ro.iqr_multiplier);
    restore_cmd->add_option("--r-t-factor", ro.r_t_factor);
    restore_cmd->add_flag("--no-truncation", ro.no_truncation);
    restore_cmd->add_flag("--no-padding", ro.no_padding);
    restore_cmd->add_flag("--fixed-grid", ro.fixed_grid);
    restore_cmd->add_flag("--fixed-bandwidth", ro.fixed_bandwidth);
    restore_cmd->add_flag("--one-dimensional", ro.one_dimensional);
    restore_cmd->add_option("--window", ro.window);
    restore_cmd->add_option("--polyorder", ro.polyorder);
    restore_cmd->add_option("--sigma", ro.sigma);
    restore_cmd->add_option("--trim", ro.trim);
    restore_cmd->add_option("--hampel-threshold", ro.hampel_threshold);
    restore_cmd->add_option("--bandwidth", ro.bandwidth);

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare an estimate against the truth");
    std::string truth_path, estimate_path;
    MetricsOptions metric_options;
    metrics_cmd->add_option("--truth", truth_path, "Ground-truth CSV")->required();
    metrics_cmd->add_option("--estimate", estimate_path, "Estimate CSV")->required();
    metrics_cmd->add_option("--prominence", metric_options.prominence_threshold)->capture_default_str();
    metrics_cmd->add_option("--tolerance", metric_options.peak_tolerance)->capture_default_str();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark plan");
    std::string plan_path, bench_out, aggregate_out;
    std::optional<int> bench_threads;
    bool print_table = false;
    bench_cmd->add_option("--plan", plan_path, "Plan file")->required();
    bench_cmd->add_option("--out", bench_out, "Result CSV (overrides the plan's output)");
    bench_cmd->add_option("--aggregate", aggregate_out, "Aggregate CSV (default <out>.aggregate.csv)");
    bench_cmd->add_option("--threads", bench_threads);
    bench_cmd->add_flag("--table", print_table, "Print a mean ± std summary table");

    // scaling
    auto* scaling_cmd = app.add_subcommand("scaling", "Time restore over sequence lengths");
    std::string lengths_text = "100,250,500,1000,2000,4000";
    int repetitions = 5;
    std::string scaling_config;
    scaling_cmd->add_option("--lengths", lengths_text, "Comma-separated ascending lengths")
        ->capture_default_str();
    scaling_cmd->add_option("--reps", repetitions, "Repetitions per length (median reported)")
        ->capture_default_str();
    scaling_cmd->add_option("--config", scaling_config, "Flat key = value restoration config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            signal.kind = signal_kind_from_string(signal_name);
            const auto series = generate_clean(signal);
            with_output(generate_output, out, [&](std::ostream& s) { write_series_csv(s, series); });
        } else if (corrupt_cmd->parsed()) {
            corruption.kind = corruption_kind_from_string(corruption_name);
            corruption.clip_impulses = !no_clip;
            auto series = read_series_csv(std::filesystem::path(corrupt_input)).series;
            if (normalize_first) series = normalize(series).first;
            const auto result = corrupt(series, corruption);
            with_output(corrupt_output, out, [&](std::ostream& s) {
                write_series_csv(s, result.series, with_mask ? &result.outlier_mask : nullptr);
            });
        } else if (restore_cmd->parsed()) {
            return run_restore(ro, out);
        } else if (metrics_cmd->parsed()) {
            const auto truth = read_series_csv(std::filesystem::path(truth_path)).series;
            const auto estimate = read_series_csv(std::filesystem::path(estimate_path)).series;
            const auto report = evaluate(truth, estimate, metric_options);
            const auto values = metric_values(report);
            for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
                out << kMetricColumns[k] << '=' << format_number(values[k]) << '\n';
            }
        } else if (bench_cmd->parsed()) {
            auto plan = load_plan(std::filesystem::path(plan_path));
            if (!bench_out.empty()) plan.output = bench_out;
            if (bench_threads) plan.threads = *bench_threads;
            if (plan.output.empty()) throw ConfigError("bench: no output path (--out or plan 'output')");
            const auto result = run_plan(plan);
            with_output(plan.output.string(), out,
                        [&](std::ostream& s) { write_results_csv(s, result.rows); });
            const std::string agg = !aggregate_out.empty() ? aggregate_out
                                    : plan.output == "-"   ? std::string("-")
                                                           : aggregate_path_for(plan.output).string();
            with_output(agg, out, [&](std::ostream& s) { write_aggregate_csv(s, result.aggregates); });
            if (print_table) write_summary_table(out, result.aggregates);
            std::size_t failed = 0;
            for (const auto& row : result.rows) failed += row.error.empty() ? 0 : 1;
            if (failed > 0) {
                err << "bench: " << failed << " of " << result.rows.size() << " runs failed\n";
                return kExitData;
            }
        } else if (scaling_cmd->parsed()) {
            const auto config =
                scaling_config.empty() ? RestorationConfig{} : restoration_config_from(flat_config(scaling_config));
            const auto table = runtime_sweep(parse_lengths(lengths_text), config, repetitions);
            out << "N,wall_time_ms\n";
            for (const auto& row : table) out << row.length << ',' << format_number(row.wall_time_ms) << '\n';
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace cascade_kde
