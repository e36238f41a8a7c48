#include "cascade_kde/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cascade_kde/config_io.hpp"
#include "cascade_kde/csv.hpp"
#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<std::string, std::string> split_section_name(const std::string& name) {
    const auto space = name.find(' ');
    if (space == std::string::npos) return {name, {}};
    auto id = name.substr(space + 1);
    id.erase(0, id.find_first_not_of(' '));
    return {name.substr(0, space), id};
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const auto v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            seeds.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("plan: bad seed '" + item + "'");
        }
    }
    return seeds;
}

std::optional<std::string> take(KeyValues& entries, const std::string& key) {
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const auto& kv) { return kv.first == key; });
    if (it == entries.end()) return std::nullopt;
    auto value = it->second;
    entries.erase(it);
    return value;
}

/// SplitMix64 finalizer; decorrelates per-run seeds derived from one base.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t seed) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (seed + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

MetricsReport nan_report() {
    return {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
}

template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
}

}  // namespace

void BenchmarkPlan::validate() const {
    if (datasets.empty()) throw ConfigError("plan: no datasets");
    if (corruptions.empty()) throw ConfigError("plan: no corruptions");
    if (methods.empty()) throw ConfigError("plan: no methods");
    if (seeds.empty()) throw ConfigError("plan: no seeds");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("plan: seeds must be distinct");
    }
    if (threads < 1) throw ConfigError("plan: threads must be >= 1");
    auto unique_ids = [](const auto& entries, const char* what) {
        std::set<std::string> ids;
        for (const auto& e : entries) {
            if (e.id.empty()) throw ConfigError(std::string("plan: ") + what + " without an id");
            if (!ids.insert(e.id).second) {
                throw ConfigError(std::string("plan: duplicate ") + what + " id '" + e.id + "'");
            }
        }
    };
    unique_ids(datasets, "dataset");
    unique_ids(corruptions, "corruption");
    unique_ids(methods, "method");
    for (const auto& m : methods) {
        std::visit([](const auto& spec) { spec.validate(); }, m.method);
    }
    for (const auto& c : corruptions) {
        try {
            c.spec.validate();
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
    }
}

BenchmarkPlan load_plan(std::istream& in, const std::filesystem::path& base_dir) {
    BenchmarkPlan plan;
    for (auto& section : parse_ini(in)) {
        const auto [kind, id] = split_section_name(section.name);
        auto entries = section.entries;
        if (kind.empty() || kind == "plan") {
            for (const auto& [key, value] : entries) try {
                if (key == "seeds") {
                    plan.seeds = parse_seeds(value);
                } else if (key == "output") {
                    plan.output = value;
                } else if (key == "threads") {
                    plan.threads = std::stoi(value);
                } else if (key == "prominence") {
                    plan.metrics.prominence_threshold = parse_number(value);
                } else if (key == "peak_tolerance") {
                    plan.metrics.peak_tolerance = std::stoul(value);
                } else {
                    throw ConfigError("plan: unknown key '" + key + "'");
                }
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception&) {
                throw ConfigError("plan: bad value for '" + key + "': '" + value + "'");
            }
        } else if (kind == "dataset") {
            if (auto csv = take(entries, "csv")) {
                if (!entries.empty()) {
                    throw ConfigError("dataset '" + id + "': csv datasets take no other keys");
                }
                std::filesystem::path p(*csv);
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                plan.datasets.push_back({id, p});
            } else {
                plan.datasets.push_back({id, signal_spec_from(entries)});
            }
        } else if (kind == "corruption") {
            plan.corruptions.push_back({id, corruption_spec_from(entries)});
        } else if (kind == "method") {
            const auto type = take(entries, "method");
            if (!type) throw ConfigError("method '" + id + "': missing 'method' key");
            if (*type == "cascade") {
                plan.methods.push_back({id, restoration_config_from(entries)});
            } else {
                entries.emplace_back("kind", *type);
                plan.methods.push_back({id, baseline_spec_from(entries)});
            }
        } else {
            throw ConfigError("plan: unknown section '" + section.name + "'");
        }
    }
    plan.validate();
    return plan;
}

BenchmarkPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open plan '" + path.string() + "'");
    return load_plan(in, path.parent_path());
}

std::array<double, 9> metric_values(const MetricsReport& r) {
    return {r.rmse,           r.mae,     r.snr_db,
            r.feature_snr_db, r.derivative_rmse, r.derivative_snr_db,
            r.peak_f1,        r.peak_amplitude_error, r.peak_location_error};
}

BenchmarkResult run_plan(const BenchmarkPlan& plan) {
    plan.validate();

    // Clean truth per dataset, in the unit box.
    std::vector<std::optional<TimeSeries>> clean(plan.datasets.size());
    std::vector<std::string> load_error(plan.datasets.size());
    for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
        try {
            const auto& src = plan.datasets[d].source;
            if (const auto* spec = std::get_if<SyntheticSignalSpec>(&src)) {
                clean[d] = generate_clean(*spec);
            } else {
                clean[d] = normalize(read_series_csv(std::get<std::filesystem::path>(src)).series).first;
            }
        } catch (const std::exception& e) {
            load_error[d] = e.what();
        }
    }

    // Corrupted inputs are shared by every method.
    const std::size_t nc = plan.corruptions.size();
    const std::size_t ns = plan.seeds.size();
    std::vector<std::optional<TimeSeries>> noisy(plan.datasets.size() * nc * ns);
    std::vector<std::string> noisy_error(noisy.size());
    for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
        for (std::size_t c = 0; c < nc; ++c) {
            for (std::size_t s = 0; s < ns; ++s) {
                const auto slot = (d * nc + c) * ns + s;
                if (!clean[d]) {
                    noisy_error[slot] = load_error[d];
                    continue;
                }
                try {
                    CorruptionSpec spec = plan.corruptions[c].spec;
                    spec.seed = plan.seeds[s];
                    noisy[slot] = corrupt(*clean[d], spec).series;
                } catch (const std::exception& e) {
                    noisy_error[slot] = e.what();
                }
            }
        }
    }

    const std::size_t nm = plan.methods.size();
    std::vector<ResultRow> rows(plan.cardinality());
    parallel_for(rows.size(), plan.threads, [&](std::size_t index) {
        const std::size_t s = index % ns;
        const std::size_t m = (index / ns) % nm;
        const std::size_t c = (index / (ns * nm)) % nc;
        const std::size_t d = index / (ns * nm * nc);
        const auto slot = (d * nc + c) * ns + s;

        ResultRow& row = rows[index];
        row.dataset = plan.datasets[d].id;
        row.corruption = plan.corruptions[c].id;
        row.method = plan.methods[m].id;
        row.seed = plan.seeds[s];
        row.metrics = nan_report();
        row.wall_time_ms = kNaN;
        if (!noisy[slot]) {
            row.error = noisy_error[slot];
            return;
        }
        try {
            const auto start = std::chrono::steady_clock::now();
            std::optional<TimeSeries> estimate;
            if (const auto* cfg = std::get_if<RestorationConfig>(&plan.methods[m].method)) {
                RestorationConfig run = *cfg;
                if (run.variant.random_k_seed) {
                    run.variant.random_k_seed = mix_seed(*run.variant.random_k_seed, row.seed);
                }
                estimate = restore(*noisy[slot], run).restored;
            } else {
                estimate = apply_baseline(*noisy[slot], std::get<BaselineSpec>(plan.methods[m].method));
            }
            const auto stop = std::chrono::steady_clock::now();
            row.wall_time_ms = std::max(
                1e-6, std::chrono::duration<double, std::milli>(stop - start).count());
            row.metrics = evaluate(*clean[d], *estimate, plan.metrics);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return {rows, aggregate(rows)};
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
    std::vector<AggregateRow> out;
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ResultRow*>> groups;
    // Groups whose every run failed still get a row, with runs = 0 and NaN statistics.
    for (const auto& row : rows) {
        auto key = std::make_tuple(row.dataset, row.corruption, row.method);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) out.push_back({row.dataset, row.corruption, row.method, 0, {}, {}, 0});
        if (row.error.empty()) it->second.push_back(&row);
    }
    for (auto& agg : out) {
        const auto& members = groups.at({agg.dataset, agg.corruption, agg.method});
        agg.runs = members.size();
        if (members.empty()) {
            agg.mean.fill(kNaN);
            agg.std.fill(kNaN);
            agg.wall_time_ms_mean = kNaN;
            continue;
        }
        for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
            double sum = 0;
            std::size_t count = 0;
            for (const auto* r : members) {
                const double v = metric_values(r->metrics)[k];
                if (std::isfinite(v)) {
                    sum += v;
                    ++count;
                }
            }
            if (count == 0) {
                agg.mean[k] = agg.std[k] = kNaN;
                continue;
            }
            const double mean = sum / static_cast<double>(count);
            double sq = 0;
            for (const auto* r : members) {
                const double v = metric_values(r->metrics)[k];
                if (std::isfinite(v)) sq += (v - mean) * (v - mean);
            }
            agg.mean[k] = mean;
            agg.std[k] = std::sqrt(sq / static_cast<double>(count));
        }
        double wall = 0;
        for (const auto* r : members) wall += r->wall_time_ms;
        agg.wall_time_ms_mean = wall / static_cast<double>(members.size());
    }
    return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "dataset,noise,method,seed";
    for (const auto name : kMetricColumns) out << ',' << name;
    out << ",wall_time_ms,error\n";
    for (const auto& r : rows) {
        out << csv_field(r.dataset) << ',' << csv_field(r.corruption) << ',' << csv_field(r.method)
            << ',' << r.seed;
        for (const double v : metric_values(r.metrics)) out << ',' << format_number(v);
        out << ',' << format_number(r.wall_time_ms) << ',' << csv_field(r.error) << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "dataset,noise,method,runs";
    for (const auto name : kMetricColumns) out << ',' << name << "_mean," << name << "_std";
    out << ",wall_time_ms_mean\n";
    for (const auto& a : rows) {
        out << csv_field(a.dataset) << ',' << csv_field(a.corruption) << ',' << csv_field(a.method)
            << ',' << a.runs;
        for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
            out << ',' << format_number(a.mean[k]) << ',' << format_number(a.std[k]);
        }
        out << ',' << format_number(a.wall_time_ms_mean) << '\n';
    }
}

void write_summary_table(std::ostream& out, const std::vector<AggregateRow>& rows) {
    constexpr std::array<std::pair<std::size_t, const char*>, 4> columns{{
        {0, "RMSE"}, {3, "Feature SNR"}, {4, "Derivative RMSE"}, {6, "Peak F1"}}};
    std::size_t width = 6;
    for (const auto& a : rows) width = std::max(width, a.method.size());
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::left << std::setw(static_cast<int>(width)) << "Method";
    for (const auto& [k, label] : columns) out << " | " << std::setw(19) << label;
    out << '\n';
    std::string last_group;
    for (const auto& a : rows) {
        const std::string group = a.dataset + " / " + a.corruption;
        if (group != last_group) {
            out << "# " << group << '\n';
            last_group = group;
        }
        out << std::left << std::setw(static_cast<int>(width)) << a.method;
        for (const auto& [k, label] : columns) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(4) << a.mean[k] << " ± " << a.std[k];
            out << " | " << std::setw(20) << cell.str();
        }
        out << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

std::vector<ScalingRow> runtime_sweep(const std::vector<Eigen::Index>& lengths,
                                      const RestorationConfig& config, int repetitions) {
    if (!std::is_sorted(lengths.begin(), lengths.end())) {
        throw InvalidInput("runtime_sweep: lengths must be sorted ascending");
    }
    if (repetitions < 1) throw InvalidInput("runtime_sweep: repetitions must be >= 1");
    std::vector<ScalingRow> table;
    for (const auto n : lengths) {
        SyntheticSignalSpec signal;
        signal.kind = SignalKind::sine;
        signal.length = n;
        CorruptionSpec noise;
        noise.kind = CorruptionKind::gaussian;
        noise.sigma = 0.1;
        noise.seed = 1;
        const auto noisy = corrupt(generate_clean(signal), noise).series;

        std::vector<double> times;
        for (int rep = 0; rep < repetitions; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const auto result = restore(noisy, config);
            const auto stop = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        }
        std::sort(times.begin(), times.end());
        const auto mid = times.size() / 2;
        const double median =
            times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
        table.push_back({n, std::max(median, 1e-6)});
    }
    return table;
}

}  // namespace cascade_kde
