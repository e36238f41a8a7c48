#include "cascade_kde/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

void require_same_length(const VectorXd& a, const VectorXd& b, const char* what) {
    if (a.size() != b.size()) {
        throw InvalidInput(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                           " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() == 0) throw InvalidInput(std::string(what) + ": empty input");
}

}  // namespace

double snr_db(const VectorXd& signal, const VectorXd& error) {
    const double noise = error.squaredNorm();
    if (noise == 0.0) return kSnrCapDb;
    const double power = signal.squaredNorm();
    if (power == 0.0) return -kSnrCapDb;
    return std::clamp(10.0 * std::log10(power / noise), -kSnrCapDb, kSnrCapDb);
}

PointwiseMetrics pointwise_metrics(const VectorXd& truth, const VectorXd& estimate) {
    require_same_length(truth, estimate, "pointwise_metrics");
    const VectorXd residual = estimate - truth;
    const auto n = static_cast<double>(truth.size());
    return {std::sqrt(residual.squaredNorm() / n), residual.cwiseAbs().sum() / n,
            snr_db(truth, residual)};
}

DerivativeMetrics derivative_metrics(const VectorXd& truth, const VectorXd& estimate,
                                     const VectorXd& times) {
    require_same_length(truth, estimate, "derivative_metrics");
    require_same_length(truth, times, "derivative_metrics");
    const VectorXd d_truth = finite_diff(truth, times, 1);
    const VectorXd d_est = finite_diff(estimate, times, 1);
    const auto pm = pointwise_metrics(d_truth, d_est);
    return {pm.rmse, pm.snr_db, pm.snr_db};
}

PeakSet detect_peaks(const VectorXd& values, double prominence_threshold) {
    PeakSet peaks;
    const Eigen::Index n = values.size();
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double h = values[i];
        if (!(h > values[i - 1] && h >= values[i + 1])) continue;

        // Lowest point on each side before the signal rises above the peak.
        double left_min = h;
        for (Eigen::Index j = i - 1; j >= 0 && values[j] <= h; --j) {
            left_min = std::min(left_min, values[j]);
        }
        double right_min = h;
        for (Eigen::Index j = i + 1; j < n && values[j] <= h; ++j) {
            right_min = std::min(right_min, values[j]);
        }
        const double prominence = h - std::max(left_min, right_min);
        if (prominence >= prominence_threshold) {
            peaks.indices.push_back(static_cast<std::size_t>(i));
            peaks.amplitudes.push_back(h);
            peaks.prominences.push_back(prominence);
        }
    }
    return peaks;
}

PeakMetrics peak_metrics(const PeakSet& truth, const PeakSet& estimate, std::size_t tolerance) {
    struct Candidate {
        std::size_t distance, truth, estimate;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < truth.size(); ++a) {
        for (std::size_t b = 0; b < estimate.size(); ++b) {
            const auto ta = truth.indices[a];
            const auto eb = estimate.indices[b];
            const std::size_t d = ta > eb ? ta - eb : eb - ta;
            if (d <= tolerance) candidates.push_back({d, a, b});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
        return std::tie(l.distance, l.truth, l.estimate) < std::tie(r.distance, r.truth, r.estimate);
    });

    std::vector<bool> truth_used(truth.size(), false);
    std::vector<bool> estimate_used(estimate.size(), false);
    PeakMetrics m;
    double amp_sum = 0;
    double loc_sum = 0;
    for (const auto& c : candidates) {
        if (truth_used[c.truth] || estimate_used[c.estimate]) continue;
        truth_used[c.truth] = estimate_used[c.estimate] = true;
        ++m.true_positives;
        amp_sum += std::abs(truth.amplitudes[c.truth] - estimate.amplitudes[c.estimate]);
        loc_sum += static_cast<double>(c.distance);
    }
    m.false_positives = estimate.size() - m.true_positives;
    m.false_negatives = truth.size() - m.true_positives;

    const auto tp = static_cast<double>(m.true_positives);
    const auto denom = 2.0 * tp + static_cast<double>(m.false_positives + m.false_negatives);
    // No peaks on either side counts as perfect agreement.
    m.f1 = denom == 0.0 ? 1.0 : 2.0 * tp / denom;
    if (m.true_positives == 0) {
        m.amplitude_error = std::numeric_limits<double>::quiet_NaN();
        m.location_error = std::numeric_limits<double>::quiet_NaN();
    } else {
        m.amplitude_error = amp_sum / tp;
        m.location_error = loc_sum / tp;
    }
    return m;
}

MetricsReport evaluate(const TimeSeries& truth, const TimeSeries& estimate,
                       const MetricsOptions& options) {
    if (truth.size() != estimate.size()) {
        throw InvalidInput("evaluate: truth and estimate differ in length");
    }
    const auto pm = pointwise_metrics(truth.values(), estimate.values());
    const auto dm = derivative_metrics(truth.values(), estimate.values(), truth.times());

    const double lo = truth.values().minCoeff();
    const double range = truth.values().maxCoeff() - lo;
    const double scale = range > 0 ? 1.0 / range : 1.0;
    const VectorXd truth_unit = (truth.values().array() - lo) * scale;
    const VectorXd est_unit = (estimate.values().array() - lo) * scale;
    const auto pk = peak_metrics(detect_peaks(truth_unit, options.prominence_threshold),
                                 detect_peaks(est_unit, options.prominence_threshold),
                                 options.peak_tolerance);

    MetricsReport r;
    r.rmse = pm.rmse;
    r.mae = pm.mae;
    r.snr_db = pm.snr_db;
    r.feature_snr_db = dm.feature_snr_db;
    r.derivative_rmse = dm.derivative_rmse;
    r.derivative_snr_db = dm.derivative_snr_db;
    r.peak_f1 = pk.f1;
    r.peak_amplitude_error = pk.amplitude_error;
    r.peak_location_error = pk.location_error;
    return r;
}

}  // namespace cascade_kde
