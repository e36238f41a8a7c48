#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "cascade_kde/errors.hpp"
#include "cascade_kde/series.hpp"

namespace cascade_kde {

/// Temporal and amplitude bandwidths, in normalized units.
template <typename Scalar>
struct BasicBandwidths {
    Scalar time{0.02};
    Scalar amplitude{0.02};

    void validate() const {
        if (!(std::isfinite(time) && std::isfinite(amplitude) && time > 0 && amplitude > 0)) {
            throw InvalidInput("bandwidths must be finite and strictly positive");
        }
    }
};

using Bandwidths = BasicBandwidths<double>;

/// Product Gaussian kernel density over the temporal-amplitude plane:
///
///   p(t, y) = 1 / (N h_t h_y) * sum_i K((t - t_i) / h_t, (y - y_i) / h_y),
///   K(u, v) = exp(-(u^2 + v^2) / 2) / (2 pi).
///
/// Evaluation is an exact sum over all source points. Immutable after
/// construction, so concurrent evaluation is safe.
template <typename Scalar>
class BasicDensityField {
public:
    using VectorType = Vector<Scalar>;

    BasicDensityField(VectorType times, VectorType values, BasicBandwidths<Scalar> bandwidths)
        : times_(std::move(times)), values_(std::move(values)), bandwidths_(bandwidths) {
        if (times_.size() == 0) throw InvalidInput("density field: empty point set");
        if (times_.size() != values_.size()) {
            throw InvalidInput("density field: times and values differ in length");
        }
        bandwidths_.validate();
        scale_ = Scalar(1) / (Scalar(2) * std::numbers::pi_v<Scalar> *
                              static_cast<Scalar>(times_.size()) * bandwidths_.time *
                              bandwidths_.amplitude);
    }

    BasicDensityField(const BasicTimeSeries<Scalar>& points, BasicBandwidths<Scalar> bandwidths)
        : BasicDensityField(points.times(), points.values(), bandwidths) {}

    [[nodiscard]] const VectorType& times() const noexcept { return times_; }
    [[nodiscard]] const VectorType& values() const noexcept { return values_; }
    [[nodiscard]] const BasicBandwidths<Scalar>& bandwidths() const noexcept { return bandwidths_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return times_.size(); }

    /// 1 / (2 pi N h_t h_y).
    [[nodiscard]] Scalar scale() const noexcept { return scale_; }

    /// exp(-((t - t_i) / h_t)^2 / 2) for every source.
    [[nodiscard]] VectorType temporal_weights(Scalar t) const {
        const Scalar inv = Scalar(1) / bandwidths_.time;
        return (-Scalar(0.5) * ((times_.array() - t) * inv).square()).exp().matrix();
    }

    [[nodiscard]] Scalar operator()(Scalar t, Scalar y) const {
        const Scalar inv_t = Scalar(1) / bandwidths_.time;
        const Scalar inv_y = Scalar(1) / bandwidths_.amplitude;
        Scalar sum = 0;
        for (Eigen::Index i = 0; i < times_.size(); ++i) {
            const Scalar u = (t - times_[i]) * inv_t;
            const Scalar v = (y - values_[i]) * inv_y;
            sum += std::exp(Scalar(-0.5) * (u * u + v * v));
        }
        return scale_ * sum;
    }

    /// Densities at (t, grid[m]) for every grid node.
    template <typename Derived>
    [[nodiscard]] VectorType column(Scalar t, const Eigen::MatrixBase<Derived>& grid) const {
        if (grid.size() == 0) throw InvalidInput("density column: empty amplitude grid");
        const VectorType wt = temporal_weights(t);
        return scale_ * unscaled_column(wt, grid);
    }

    /// sum_i wt[i] * exp(-((grid[m] - y_i) / h_y)^2 / 2), accumulated over
    /// sources in index order. Sources whose temporal weight is exactly zero
    /// contribute exactly zero and are skipped.
    template <typename Derived>
    [[nodiscard]] VectorType unscaled_column(const VectorType& temporal,
                                             const Eigen::MatrixBase<Derived>& grid) const {
        const Scalar inv_y = Scalar(1) / bandwidths_.amplitude;
        const auto g = (grid.derived().array() * inv_y).eval();
        Eigen::Array<Scalar, Eigen::Dynamic, 1> acc =
            Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(grid.size());
        for (Eigen::Index i = 0; i < times_.size(); ++i) {
            const Scalar w = temporal[i];
            if (w == Scalar(0)) continue;
            const Scalar yi = values_[i] * inv_y;
            acc += w * (Scalar(-0.5) * (g - yi).square()).exp();
        }
        return acc.matrix();
    }

private:
    VectorType times_;
    VectorType values_;
    BasicBandwidths<Scalar> bandwidths_;
    Scalar scale_{};
};

using DensityField = BasicDensityField<double>;

template <typename Scalar>
[[nodiscard]] Scalar kde_eval(const BasicDensityField<Scalar>& field, Scalar t, Scalar y) {
    return field(t, y);
}

template <typename Scalar, typename Derived>
[[nodiscard]] Vector<Scalar> kde_eval_column(const BasicDensityField<Scalar>& field, Scalar t,
                                             const Eigen::MatrixBase<Derived>& y_grid) {
    return field.column(t, y_grid);
}

/// Stage-wise bandwidth rule: h_k = bw0 + step * (k - 1), isotropic.
/// With `fixed` set every stage uses bw0.
struct BandwidthSchedule {
    double bw0 = 0.02;
    double step = 0.01;
    bool fixed = false;

    [[nodiscard]] Bandwidths at(int stage) const {
        if (stage < 1) {
            throw InvalidInput("bandwidth schedule: stage must be >= 1, got " +
                               std::to_string(stage));
        }
        if (!(bw0 > 0) || !std::isfinite(bw0)) {
            throw InvalidInput("bandwidth schedule: bw0 must be finite and > 0");
        }
        const double h = fixed ? bw0 : bw0 + step * static_cast<double>(stage - 1);
        return {h, h};
    }
};

/// Data-driven isotropic bandwidth (Silverman's rule on the amplitudes),
/// floored at `floor`. Experimental alternative to the fixed schedule.
template <typename Scalar>
[[nodiscard]] Scalar silverman_bandwidth(const Vector<Scalar>& values, Scalar floor) {
    const auto n = static_cast<Scalar>(values.size());
    const Scalar mean = values.mean();
    const Scalar sd = std::sqrt((values.array() - mean).square().sum() / n);
    const Scalar h = Scalar(1.06) * sd * std::pow(n, Scalar(-0.2));
    return std::isfinite(h) && h > floor ? h : floor;
}

}  // namespace cascade_kde
