#include "cascade_kde/baselines.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

/// Index reflected about both end samples (the end sample is not repeated).
Eigen::Index mirror(Eigen::Index i, Eigen::Index n) {
    const Eigen::Index period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

std::vector<double> gather(const VectorXd& y, Eigen::Index center, Eigen::Index half) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(2 * half + 1));
    for (Eigen::Index k = -half; k <= half; ++k) w.push_back(y[mirror(center + k, y.size())]);
    return w;
}

double median_of(std::vector<double> w) {
    const auto mid = w.size() / 2;
    std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid), w.end());
    const double upper = w[mid];
    if (w.size() % 2 == 1) return upper;
    const double lower = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

VectorXd moving_average(const VectorXd& y, int window) {
    const Eigen::Index half = window / 2;
    VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double s = 0;
        for (Eigen::Index k = -half; k <= half; ++k) s += y[mirror(i + k, y.size())];
        out[i] = s / window;
    }
    return out;
}

VectorXd gaussian_filter(const VectorXd& y, double sigma) {
    const auto radius = static_cast<Eigen::Index>(std::ceil(4.0 * sigma));
    VectorXd weights(2 * radius + 1);
    for (Eigen::Index k = -radius; k <= radius; ++k) {
        weights[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    }
    weights /= weights.sum();
    VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double s = 0;
        for (Eigen::Index k = -radius; k <= radius; ++k) {
            s += weights[k + radius] * y[mirror(i + k, y.size())];
        }
        out[i] = s;
    }
    return out;
}

VectorXd median_filter(const VectorXd& y, int window) {
    VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = median_of(gather(y, i, window / 2));
    return out;
}

VectorXd trimmed_mean(const VectorXd& y, int window, double trim) {
    const auto cut = static_cast<std::size_t>(std::floor(trim * window));
    VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        auto w = gather(y, i, window / 2);
        std::sort(w.begin(), w.end());
        double s = 0;
        for (std::size_t k = cut; k < w.size() - cut; ++k) s += w[k];
        out[i] = s / static_cast<double>(w.size() - 2 * cut);
    }
    return out;
}

VectorXd hampel(const VectorXd& y, int window, double threshold) {
    VectorXd out = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        auto w = gather(y, i, window / 2);
        const double med = median_of(w);
        for (auto& v : w) v = std::abs(v - med);
        const double mad = median_of(std::move(w));
        if (std::abs(y[i] - med) > threshold * 1.4826 * mad) out[i] = med;
    }
    return out;
}

/// Local least-squares polynomial in (t - t_i), evaluated at t_i. Edge
/// samples use the first/last full window.
VectorXd savitzky_golay(const VectorXd& y, const VectorXd& t, int window, int polyorder) {
    const Eigen::Index n = y.size();
    if (window > n) {
        throw InvalidInput("savitzky_golay: window " + std::to_string(window) +
                           " exceeds series length " + std::to_string(n));
    }
    const Eigen::Index half = window / 2;
    VectorXd out(n);
    Eigen::MatrixXd design(window, polyorder + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index start = std::clamp<Eigen::Index>(i - half, 0, n - window);
        const double scale = t[start + window - 1] - t[start];
        for (Eigen::Index r = 0; r < window; ++r) {
            const double u = (t[start + r] - t[i]) / scale;
            double p = 1.0;
            for (int c = 0; c <= polyorder; ++c, p *= u) design(r, c) = p;
        }
        const VectorXd coeffs = design.colPivHouseholderQr().solve(y.segment(start, window));
        out[i] = coeffs[0];
    }
    return out;
}

}  // namespace

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::moving_average: return "moving_average";
        case BaselineKind::gaussian_filter: return "gaussian_filter";
        case BaselineKind::median_filter: return "median_filter";
        case BaselineKind::savitzky_golay: return "savitzky_golay";
        case BaselineKind::trimmed_mean: return "trimmed_mean";
        case BaselineKind::hampel_sg: return "hampel_sg";
        case BaselineKind::nadaraya_watson: return "nadaraya_watson";
    }
    return "unknown";
}

BaselineKind baseline_kind_from_string(std::string_view name) {
    for (auto k : {BaselineKind::moving_average, BaselineKind::gaussian_filter,
                   BaselineKind::median_filter, BaselineKind::savitzky_golay,
                   BaselineKind::trimmed_mean, BaselineKind::hampel_sg,
                   BaselineKind::nadaraya_watson}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown baseline '" + std::string(name) + "'");
}

void BaselineSpec::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("baseline: window must be odd and >= 3, got " + std::to_string(window));
    }
    if (kind == BaselineKind::savitzky_golay || kind == BaselineKind::hampel_sg) {
        if (polyorder < 0 || polyorder >= window) {
            throw ConfigError("baseline: polyorder must lie in [0, window)");
        }
    }
    if (!(std::isfinite(sigma) && sigma > 0)) throw ConfigError("baseline: sigma must be > 0");
    if (!(trim >= 0 && trim < 0.5)) throw ConfigError("baseline: trim must lie in [0, 0.5)");
    if (!(std::isfinite(hampel_threshold) && hampel_threshold > 0)) {
        throw ConfigError("baseline: hampel_threshold must be > 0");
    }
    if (!(std::isfinite(bandwidth) && bandwidth > 0)) {
        throw ConfigError("baseline: bandwidth must be > 0");
    }
}

TimeSeries apply_baseline(const TimeSeries& series, const BaselineSpec& spec) {
    spec.validate();
    const auto& y = series.values();
    const auto& t = series.times();
    switch (spec.kind) {
        case BaselineKind::moving_average:
            return series.with_values(moving_average(y, spec.window));
        case BaselineKind::gaussian_filter:
            return series.with_values(gaussian_filter(y, spec.sigma));
        case BaselineKind::median_filter:
            return series.with_values(median_filter(y, spec.window));
        case BaselineKind::savitzky_golay:
            return series.with_values(savitzky_golay(y, t, spec.window, spec.polyorder));
        case BaselineKind::trimmed_mean:
            return series.with_values(trimmed_mean(y, spec.window, spec.trim));
        case BaselineKind::hampel_sg:
            return series.with_values(savitzky_golay(hampel(y, spec.window, spec.hampel_threshold),
                                                     t, spec.window, spec.polyorder));
        case BaselineKind::nadaraya_watson: {
            const double span = t[t.size() - 1] - t[0];
            return series.with_values(nw_regression(series, spec.bandwidth * span, t));
        }
    }
    throw ConfigError("baseline: unhandled kind");
}

VectorXd nw_regression(const TimeSeries& series, double bandwidth, const VectorXd& query_times) {
    if (!(std::isfinite(bandwidth) && bandwidth > 0)) {
        throw InvalidInput("nw_regression: bandwidth must be finite and > 0");
    }
    const auto& t = series.times();
    const auto& y = series.values();
    const double inv = 1.0 / bandwidth;
    VectorXd out(query_times.size());
    for (Eigen::Index q = 0; q < query_times.size(); ++q) {
        const double tq = query_times[q];
        double num = 0;
        double den = 0;
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double u = (tq - t[i]) * inv;
            const double w = std::exp(-0.5 * u * u);
            num += w * y[i];
            den += w;
        }
        if (den > 1e-300) {
            out[q] = num / den;
        } else {
            Eigen::Index nearest = 0;
            (t.array() - tq).abs().minCoeff(&nearest);
            out[q] = y[nearest];
        }
    }
    return out;
}

}  // namespace cascade_kde
