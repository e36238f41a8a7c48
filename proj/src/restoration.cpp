#include "cascade_kde/restoration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "cascade_kde/baselines.hpp"
#include "cascade_kde/csv.hpp"
#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

constexpr Eigen::Index kMinWindow = 4;
constexpr double kUnderflow = 1e-300;
/// Half-width, in amplitude bandwidths, of the support used without truncation.
constexpr double kUntruncatedMargin = 10.0;

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

/// Runs body(j) for j in [0, n), split into contiguous chunks over `threads`.
template <typename Body>
void for_each_index(Eigen::Index n, int threads, Body&& body) {
    const auto workers = static_cast<Eigen::Index>(std::max(1, threads));
    if (workers == 1 || n < 2 * workers) {
        for (Eigen::Index j = 0; j < n; ++j) body(j);
        return;
    }
    std::vector<std::jthread> pool;
    const Eigen::Index chunk = (n + workers - 1) / workers;
    for (Eigen::Index begin = 0; begin < n; begin += chunk) {
        const Eigen::Index end = std::min(n, begin + chunk);
        pool.emplace_back([&body, begin, end] {
            for (Eigen::Index j = begin; j < end; ++j) body(j);
        });
    }
}

struct Moments {
    double mass = 0;
    double first = 0;
};

/// Trapezoidal integrals of g(y) and y g(y), g(y) = exp(-((y - y_i) h^-1)^2 / 2),
/// over the nodes lower + m step, m = 0..nodes-1.
///
/// Walks outward from the node nearest y_i using the exact ratio recurrence
///   g[m+1] = g[m] q[m],  q[m+1] = q[m] exp(-delta^2),  delta = step / h,
/// so only three exponentials are taken per source and every ratio is <= 1.
Moments gaussian_moments(double y_i, double inv_h, double lower, double step, int nodes) {
    const double delta = step * inv_h;
    const double decay = std::exp(-delta * delta);
    const int last = nodes - 1;
    const int centre =
        static_cast<int>(std::clamp(std::round((y_i - lower) / step), 0.0, static_cast<double>(last)));
    const double d0 = (lower + centre * step - y_i) * inv_h;
    const double g0 = std::exp(-0.5 * d0 * d0);

    // Plain sums of g and m g; the trapezoid end weights are applied after.
    double s0 = g0;
    double s1 = centre * g0;
    double g_first = centre == 0 ? g0 : 0.0;
    double g_last = centre == last ? g0 : 0.0;

    double g = g0;
    double ratio = std::exp(-d0 * delta - 0.5 * delta * delta);
    for (int m = centre + 1; m <= last; ++m) {
        g *= ratio;
        if (g == 0.0) break;
        ratio *= decay;
        s0 += g;
        s1 += m * g;
        if (m == last) g_last = g;
    }
    g = g0;
    ratio = std::exp(d0 * delta - 0.5 * delta * delta);
    for (int m = centre - 1; m >= 0; --m) {
        g *= ratio;
        if (g == 0.0) break;
        ratio *= decay;
        s0 += g;
        s1 += m * g;
        if (m == 0) g_first = g;
    }
    s0 -= 0.5 * (g_first + g_last);
    s1 -= 0.5 * last * g_last;

    Moments out;
    out.mass = step * s0;
    out.first = step * (lower * s0 + step * s1);
    return out;
}

}  // namespace

void RestorationConfig::validate() const {
    if (!finite_all({bw0, bw_step, lambda, iqr_multiplier, r_t_factor, fixed_grid_lower,
                     fixed_grid_upper})) {
        throw ConfigError("restoration config: numeric fields must be finite");
    }
    if (bw0 <= 0) throw ConfigError("restoration config: bw0 must be > 0");
    if (bw_step < 0) throw ConfigError("restoration config: bw_step must be >= 0");
    if (k_max < 1) throw ConfigError("restoration config: k_max must be >= 1");
    if (lambda < 0) throw ConfigError("restoration config: lambda must be >= 0");
    if (iqr_multiplier < 0) throw ConfigError("restoration config: iqr_multiplier must be >= 0");
    if (r_t_factor <= 0) throw ConfigError("restoration config: r_t_factor must be > 0");
    if (stop_patience < 1) throw ConfigError("restoration config: stop_patience must be >= 1");
    if (grid_size && *grid_size < 2) throw ConfigError("restoration config: grid_size must be >= 2");
    if (!(fixed_grid_lower < fixed_grid_upper)) {
        throw ConfigError("restoration config: fixed grid bounds must satisfy lower < upper");
    }
    if (threads < 1) throw ConfigError("restoration config: threads must be >= 1");
    if (variant.fixed_k && variant.random_k_seed) {
        throw ConfigError("restoration config: fixed_k and random_k are exclusive");
    }
    if (variant.fixed_k && (*variant.fixed_k < 1 || *variant.fixed_k > k_max)) {
        throw ConfigError("restoration config: fixed_k must lie in [1, k_max]");
    }
}

int RestorationConfig::grid_size_for(Eigen::Index n) const {
    if (grid_size) return *grid_size;
    return static_cast<int>(std::min<Eigen::Index>(300, std::max<Eigen::Index>(100, n)));
}

Eigen::Index RestorationConfig::padding_for(Eigen::Index n) const {
    if (variant.no_padding) return 0;
    return std::min<Eigen::Index>(30, n / 4);
}

Bandwidths RestorationConfig::bandwidths_for(int stage, const TimeSeries& stage_input) const {
    const BandwidthSchedule schedule{bw0, bw_step, variant.fixed_bandwidth};
    Bandwidths h = schedule.at(stage);
    if (data_driven_bandwidth) {
        const double s = silverman_bandwidth(stage_input.values(), bw0);
        h = {s, s};
    }
    return h;
}

double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LocalSupport local_support(const TimeSeries& series, double t_j, double r_t, double iqr_multiplier,
                           double degenerate_eps) {
    const auto& t = series.times();
    const auto& y = series.values();
    const Eigen::Index n = series.size();
    const double* begin = t.data();
    const double* end = t.data() + n;

    auto first = static_cast<Eigen::Index>(std::lower_bound(begin, end, t_j - r_t) - begin);
    auto last = static_cast<Eigen::Index>(std::upper_bound(begin, end, t_j + r_t) - begin);
    if (last - first < kMinWindow && n >= kMinWindow) {
        // Widen to the radius of the fourth-nearest sample.
        std::vector<double> dist(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = std::abs(t[i] - t_j);
        std::nth_element(dist.begin(), dist.begin() + (kMinWindow - 1), dist.end());
        const double radius = dist[kMinWindow - 1];
        first = static_cast<Eigen::Index>(std::lower_bound(begin, end, t_j - radius) - begin);
        last = static_cast<Eigen::Index>(std::upper_bound(begin, end, t_j + radius) - begin);
        // Rounding in t_j +/- radius can drop the boundary sample.
        while (first > 0 && std::abs(t[first - 1] - t_j) <= radius) --first;
        while (last < n && std::abs(t[last] - t_j) <= radius) ++last;
    }

    std::vector<double> window(y.data() + first, y.data() + last);
    std::sort(window.begin(), window.end());

    LocalSupport support;
    support.window_size = static_cast<Eigen::Index>(window.size());
    if (window.empty()) return support;
    support.window_median = sorted_quantile(window, 0.5);
    if (support.window_size < kMinWindow) return support;

    const double q1 = sorted_quantile(window, 0.25);
    const double q3 = sorted_quantile(window, 0.75);
    const double iqr = q3 - q1;
    double lower = q1 - iqr_multiplier * iqr;
    double upper = q3 + iqr_multiplier * iqr;
    if (!(upper > lower)) {
        lower = q1 - degenerate_eps;
        upper = q1 + degenerate_eps;
    }
    lower = std::max(0.0, lower);
    upper = std::min(1.0, upper);
    if (upper > lower) support.omega = {lower, upper};
    return support;
}

double truncated_expectation(const DensityField& field, double t_j, const Interval& omega,
                             int grid_size, double fallback) {
    if (grid_size < 2) throw InvalidInput("truncated_expectation: grid size must be >= 2");
    if (!(omega.upper > omega.lower)) {
        throw InvalidInput("truncated_expectation: degenerate support");
    }
    const double step = omega.width() / (grid_size - 1);
    const double inv_h = 1.0 / field.bandwidths().amplitude;
    const VectorXd temporal = field.temporal_weights(t_j);
    const auto& values = field.values();

    double num = 0;
    double den = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double w = temporal[i];
        if (w == 0.0) continue;
        const auto m = gaussian_moments(values[i], inv_h, omega.lower, step, grid_size);
        num += w * m.first;
        den += w * m.mass;
    }
    num *= field.scale();
    den *= field.scale();
    const double estimate = den < kUnderflow ? fallback : num / den;
    return std::clamp(estimate, omega.lower, omega.upper);
}

TimeSeries cascade_stage(const TimeSeries& previous, int stage, const RestorationConfig& config) {
    const Bandwidths h = config.bandwidths_for(stage, previous);
    const Eigen::Index n = previous.size();
    const Eigen::Index pad = config.padding_for(n);
    const TimeSeries sources = pad > 0 ? reflect_pad(previous, pad) : previous;
    const auto& times = previous.times();

    if (config.variant.one_dimensional) {
        return previous.with_values(nw_regression(sources, h.time, times));
    }

    const DensityField field(sources, h);
    const int grid_size = config.grid_size_for(n);
    const double r_t = config.r_t_factor * h.time;
    const double eps = std::max(1e-3, h.amplitude / 10.0);

    Interval fixed_support;
    bool use_fixed = false;
    if (config.variant.fixed_grid) {
        fixed_support = {config.fixed_grid_lower, config.fixed_grid_upper};
        use_fixed = true;
    } else if (config.variant.no_truncation) {
        const double margin = kUntruncatedMargin * h.amplitude;
        fixed_support = {sources.values().minCoeff() - margin, sources.values().maxCoeff() + margin};
        use_fixed = true;
    }

    VectorXd restored(n);
    for_each_index(n, config.threads, [&](Eigen::Index j) {
        const double tj = times[j];
        const auto support = local_support(sources, tj, r_t, config.iqr_multiplier, eps);
        const Interval omega = use_fixed ? fixed_support : support.omega;
        restored[j] = truncated_expectation(field, tj, omega, grid_size, support.window_median);
    });
    return previous.with_values(std::move(restored));
}

ParetoScore pareto_score(const TimeSeries& series, double lambda) {
    const Eigen::Index n = series.size();
    if (n < 5) throw InvalidInput("pareto_score: need at least 5 samples");
    const VectorXd d2 = finite_diff(series, 2);
    const auto interior = d2.segment(2, n - 4).array();
    ParetoScore s;
    s.sharpness = interior.abs().maxCoeff();
    s.smoothness = std::sqrt((interior - interior.mean()).square().mean());
    s.score = s.sharpness - lambda * s.smoothness;
    return s;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::patience: return "patience";
        case StopReason::k_max: return "k_max";
        case StopReason::fixed_depth: return "fixed_depth";
    }
    return "unknown";
}

void write_trace(std::ostream& out, const CascadeTrace& trace) {
    out << "# selected=" << trace.selected << " stop=" << to_string(trace.stop_reason) << '\n';
    out << "k,h_t,h_y,sharpness,smoothness,score,selected\n";
    for (const auto& r : trace.stages) {
        out << r.stage << ',' << format_number(r.bandwidths.time) << ','
            << format_number(r.bandwidths.amplitude) << ',' << format_number(r.score.sharpness)
            << ',' << format_number(r.score.smoothness) << ',' << format_number(r.score.score)
            << ',' << (r.stage == trace.selected ? 1 : 0) << '\n';
    }
}

RestorationResult restore(const TimeSeries& series, const RestorationConfig& config) {
    config.validate();
    const auto [unit, params] = normalize(series);
    const auto& variant = config.variant;

    int depth = config.k_max;
    if (variant.fixed_k) {
        depth = *variant.fixed_k;
    } else if (variant.random_k_seed) {
        std::mt19937_64 rng(*variant.random_k_seed);
        depth = std::uniform_int_distribution<int>(1, config.k_max)(rng);
    }
    // Series too short for a central second difference score zero everywhere.
    const bool scorable = unit.size() >= 5;

    CascadeTrace trace;
    TimeSeries current = unit;
    TimeSeries best = unit;
    double best_score = -std::numeric_limits<double>::infinity();
    int stale = 0;
    trace.stop_reason = variant.adaptive() ? StopReason::k_max : StopReason::fixed_depth;

    for (int k = 1; k <= depth; ++k) {
        TimeSeries next = cascade_stage(current, k, config);
        const ParetoScore score = scorable ? pareto_score(next, config.lambda) : ParetoScore{};
        trace.stages.push_back({k, config.bandwidths_for(k, current), score});

        if (!variant.adaptive()) {
            current = std::move(next);
            continue;
        }
        if (score.score > best_score) {
            best_score = score.score;
            best = next;
            trace.selected = k;
            stale = 0;
        } else if (++stale >= config.stop_patience) {
            trace.stop_reason = StopReason::patience;
            break;
        }
        current = std::move(next);
    }
    if (!variant.adaptive()) {
        best = current;
        trace.selected = depth;
    }
    return {series.with_values(denormalize_values(best.values(), params)), std::move(trace)};
}

}  // namespace cascade_kde
