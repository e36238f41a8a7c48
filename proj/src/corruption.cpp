#include "cascade_kde/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "cascade_kde/errors.hpp"
#include "cascade_kde/metrics.hpp"

namespace cascade_kde {
namespace {

using Rng = std::mt19937_64;

constexpr double kPi = std::numbers::pi;

VectorXd unit_grid(Eigen::Index n) { return VectorXd::LinSpaced(n, 0.0, 1.0); }

VectorXd rescale_to_unit(const VectorXd& v) {
    const double lo = v.minCoeff();
    const double range = v.maxCoeff() - lo;
    return ((v.array() - lo) / range).matrix();
}

/// `count` distinct picks from `pool`, in the order drawn.
std::vector<Eigen::Index> draw_distinct(std::vector<Eigen::Index> pool, Eigen::Index count,
                                        Rng& rng) {
    const auto k = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

std::vector<Eigen::Index> index_range(Eigen::Index n) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    return idx;
}

double random_sign(Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    return coin(rng) ? 1.0 : -1.0;
}

double impulse_value(double base, double offset, const CorruptionSpec& spec) {
    const double v = base + offset;
    return spec.clip_impulses ? std::clamp(v, kImpulseClipLower, kImpulseClipUpper) : v;
}

void add_gaussian(VectorXd& y, double sigma, Rng& rng) {
    if (sigma == 0.0) return;
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise(rng);
}

void add_impulses(VectorXd& y, const std::vector<Eigen::Index>& where, const CorruptionSpec& spec,
                  std::vector<bool>& mask, Rng& rng) {
    for (const auto i : where) {
        y[i] = impulse_value(y[i], random_sign(rng) * spec.amplitude, spec);
        mask[static_cast<std::size_t>(i)] = true;
    }
}

void require_count(Eigen::Index count, double ratio, Eigen::Index n) {
    if (count < 1 || ratio * static_cast<double>(n) < 1.0 - 1e-9) {
        throw InvalidInput("corrupt: ratio * N must be at least 1 (ratio " + std::to_string(ratio) +
                           ", N " + std::to_string(n) + ")");
    }
}

}  // namespace

std::string to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::sine: return "sine";
        case SignalKind::multi_peak: return "multi_peak";
        case SignalKind::damped_oscillation: return "damped_oscillation";
        case SignalKind::degradation_curve: return "degradation_curve";
    }
    return "unknown";
}

SignalKind signal_kind_from_string(std::string_view name) {
    for (auto k : {SignalKind::sine, SignalKind::multi_peak, SignalKind::damped_oscillation,
                   SignalKind::degradation_curve}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("unknown signal kind '" + std::string(name) + "'");
}

std::string to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::gaussian: return "gaussian";
        case CorruptionKind::impulse: return "impulse";
        case CorruptionKind::mixed: return "mixed";
        case CorruptionKind::missing_segment: return "missing_segment";
        case CorruptionKind::spike_cluster: return "spike_cluster";
        case CorruptionKind::drift_plus_impulse: return "drift_plus_impulse";
        case CorruptionKind::near_peak_impulse: return "near_peak_impulse";
    }
    return "unknown";
}

CorruptionKind corruption_kind_from_string(std::string_view name) {
    for (auto k : {CorruptionKind::gaussian, CorruptionKind::impulse, CorruptionKind::mixed,
                   CorruptionKind::missing_segment, CorruptionKind::spike_cluster,
                   CorruptionKind::drift_plus_impulse, CorruptionKind::near_peak_impulse}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("unknown corruption kind '" + std::string(name) + "'");
}

void SyntheticSignalSpec::validate() const {
    if (length < 32) throw InvalidInput("synthetic signal: length must be >= 32");
    if (!std::isfinite(frequency) || frequency <= 0) {
        throw InvalidInput("synthetic signal: frequency must be finite and > 0");
    }
    if (!std::isfinite(decay_rate) || decay_rate < 0) {
        throw InvalidInput("synthetic signal: decay_rate must be finite and >= 0");
    }
    if (!(knee >= 0.05 && knee <= 0.95)) {
        throw InvalidInput("synthetic signal: knee must lie in [0.05, 0.95]");
    }
    if (kind == SignalKind::multi_peak &&
        (peak_count < 2 || static_cast<Eigen::Index>(peak_count) * 12 > length)) {
        throw InvalidInput("synthetic signal: multi_peak needs 2 <= peak_count <= length / 12");
    }
}

TimeSeries generate_clean(const SyntheticSignalSpec& spec) {
    spec.validate();
    const VectorXd t = unit_grid(spec.length);
    VectorXd y(spec.length);
    switch (spec.kind) {
        case SignalKind::sine:
            y = (((2.0 * kPi * spec.frequency) * t.array()).sin() + 1.0) / 2.0;
            break;
        case SignalKind::multi_peak: {
            // Gaussian bumps six widths apart over a gentle upward trend.
            const double p = spec.peak_count;
            const double width = 1.0 / (6.0 * p);
            y = (0.1 + 0.15 * t.array()).matrix();
            for (int k = 0; k < spec.peak_count; ++k) {
                const double center = (k + 0.5) / p;
                const double golden = std::fmod((k + 1) * 0.6180339887498949, 1.0);
                const double height = 0.6 + 0.4 * golden;
                y.array() += height * (-0.5 * ((t.array() - center) / width).square()).exp();
            }
            y = rescale_to_unit(y);
            break;
        }
        case SignalKind::damped_oscillation:
            y = ((-spec.decay_rate * t.array()).exp() *
                 ((2.0 * kPi * spec.frequency) * t.array()).cos())
                    .matrix();
            y = rescale_to_unit(y);
            break;
        case SignalKind::degradation_curve: {
            // Linear fade, then quadratic acceleration past the knee.
            const double span = 1.0 - spec.knee;
            const auto past = ((t.array() - spec.knee).max(0.0) / span);
            y = (1.0 - 0.25 * t.array() - 0.75 * past.square()).matrix();
            y = rescale_to_unit(y);
            break;
        }
    }
    return TimeSeries(t, std::move(y));
}

void CorruptionSpec::validate() const {
    if (!std::isfinite(sigma) || !std::isfinite(ratio) || !std::isfinite(amplitude)) {
        throw InvalidInput("corruption spec: parameters must be finite");
    }
    if (sigma < 0) throw InvalidInput("corruption spec: sigma must be >= 0");
    if (ratio < 0 || ratio > 1) throw InvalidInput("corruption spec: ratio must lie in [0,1]");
    if (amplitude < 0) throw InvalidInput("corruption spec: amplitude must be >= 0");
}

Eigen::Index corrupted_count(double ratio, Eigen::Index n) {
    const double x = ratio * static_cast<double>(n);
    return static_cast<Eigen::Index>(std::ceil(x - 1e-9));
}

CorruptedSeries corrupt(const TimeSeries& series, const CorruptionSpec& spec) {
    spec.validate();
    const Eigen::Index n = series.size();
    const auto& clean = series.values();
    if (clean.minCoeff() < -0.01 || clean.maxCoeff() > 1.01) {
        throw InvalidInput("corrupt: input amplitudes must be normalized to [0,1]");
    }

    Rng rng(spec.seed);
    VectorXd y = clean;
    std::vector<bool> mask(static_cast<std::size_t>(n), false);

    switch (spec.kind) {
        case CorruptionKind::gaussian:
            add_gaussian(y, spec.sigma, rng);
            break;

        case CorruptionKind::impulse:
        case CorruptionKind::mixed:
        case CorruptionKind::drift_plus_impulse: {
            const auto count = corrupted_count(spec.ratio, n);
            require_count(count, spec.ratio, n);
            if (spec.kind == CorruptionKind::mixed) add_gaussian(y, spec.sigma, rng);
            if (spec.kind == CorruptionKind::drift_plus_impulse) {
                const auto& t = series.times();
                y.array() += spec.amplitude * (t.array() - t[0]) / (t[n - 1] - t[0]);
            }
            add_impulses(y, draw_distinct(index_range(n), count, rng), spec, mask, rng);
            break;
        }

        case CorruptionKind::missing_segment: {
            const auto count = corrupted_count(spec.ratio, n);
            require_count(count, spec.ratio, n);
            if (count > n - 1) {
                throw InvalidInput("corrupt: missing segment must leave one leading sample");
            }
            std::uniform_int_distribution<Eigen::Index> start_at(1, n - count);
            const Eigen::Index start = start_at(rng);
            const double held = clean[start - 1];
            for (Eigen::Index i = start; i < start + count; ++i) {
                y[i] = held;
                mask[static_cast<std::size_t>(i)] = true;
            }
            break;
        }

        case CorruptionKind::spike_cluster: {
            const auto runs = corrupted_count(spec.ratio / 3.0, n);
            require_count(runs, spec.ratio, n);
            if (3 * runs > n) throw InvalidInput("corrupt: too many spike clusters for N");
            // Distinct slots in a compressed index space map to non-overlapping runs.
            auto slots = draw_distinct(index_range(n - 2 * runs), runs, rng);
            std::sort(slots.begin(), slots.end());
            for (std::size_t c = 0; c < slots.size(); ++c) {
                const Eigen::Index start = slots[c] + 2 * static_cast<Eigen::Index>(c);
                const double offset = random_sign(rng) * spec.amplitude;
                for (Eigen::Index i = start; i < start + 3; ++i) {
                    y[i] = impulse_value(y[i], offset, spec);
                    mask[static_cast<std::size_t>(i)] = true;
                }
            }
            break;
        }

        case CorruptionKind::near_peak_impulse: {
            const auto count = corrupted_count(spec.ratio, n);
            require_count(count, spec.ratio, n);
            const auto peaks = detect_peaks(clean);
            if (peaks.empty()) throw InvalidInput("corrupt: no ground-truth peaks to target");
            std::set<Eigen::Index> near;
            for (const auto p : peaks.indices) {
                const auto c = static_cast<Eigen::Index>(p);
                for (Eigen::Index i = std::max<Eigen::Index>(0, c - 3);
                     i <= std::min<Eigen::Index>(n - 1, c + 3); ++i) {
                    near.insert(i);
                }
            }
            std::vector<Eigen::Index> pool(near.begin(), near.end());
            const auto k = std::min<Eigen::Index>(count, static_cast<Eigen::Index>(pool.size()));
            add_impulses(y, draw_distinct(std::move(pool), k, rng), spec, mask, rng);
            break;
        }
    }
    return {series.with_values(std::move(y)), std::move(mask)};
}

}  // namespace cascade_kde
