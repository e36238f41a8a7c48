#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "cascade_kde/errors.hpp"

namespace cascade_kde {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using VectorXd = Vector<double>;

/// Ordered (time, value) samples.
///
/// Times are strictly increasing, both vectors have the same length N >= 3
/// and every entry is finite. The constructor enforces this, so any
/// BasicTimeSeries in hand is valid.
template <typename Scalar>
class BasicTimeSeries {
public:
    using VectorType = Vector<Scalar>;

    static constexpr Eigen::Index kMinLength = 3;

    BasicTimeSeries(VectorType times, VectorType values)
        : times_(std::move(times)), values_(std::move(values)) {
        validate();
    }

    [[nodiscard]] const VectorType& times() const noexcept { return times_; }
    [[nodiscard]] const VectorType& values() const noexcept { return values_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return times_.size(); }

    /// Same timestamps, new amplitudes.
    [[nodiscard]] BasicTimeSeries with_values(VectorType values) const {
        return BasicTimeSeries(times_, std::move(values));
    }

private:
    void validate() const {
        if (times_.size() != values_.size()) {
            throw InvalidInput("time series: times and values differ in length (" +
                               std::to_string(times_.size()) + " vs " +
                               std::to_string(values_.size()) + ")");
        }
        if (times_.size() < kMinLength) {
            throw InvalidInput("time series: need at least 3 samples, got " +
                               std::to_string(times_.size()));
        }
        if (!times_.allFinite() || !values_.allFinite()) {
            throw InvalidInput("time series: non-finite entry");
        }
        for (Eigen::Index i = 1; i < times_.size(); ++i) {
            if (!(times_[i] > times_[i - 1])) {
                throw InvalidInput("time series: times not strictly increasing at index " +
                                   std::to_string(i));
            }
        }
    }

    VectorType times_;
    VectorType values_;
};

using TimeSeries = BasicTimeSeries<double>;

/// Affine maps between raw units and the unit box.
///
/// `y_min == y_max` marks a constant series: normalized values are all 0.5
/// and denormalization restores the constant.
template <typename Scalar>
struct BasicNormalizationParams {
    Scalar t_min{0};
    Scalar t_max{1};
    Scalar y_min{0};
    Scalar y_max{1};

    [[nodiscard]] bool constant_values() const noexcept { return y_max == y_min; }

    template <typename Derived>
    [[nodiscard]] auto to_unit_time(const Eigen::MatrixBase<Derived>& t) const {
        return ((t.array() - t_min) / (t_max - t_min)).matrix();
    }
    template <typename Derived>
    [[nodiscard]] auto from_unit_time(const Eigen::MatrixBase<Derived>& u) const {
        return (u.array() * (t_max - t_min) + t_min).matrix();
    }

    [[nodiscard]] Vector<Scalar> to_unit_values(const Vector<Scalar>& y) const {
        if (constant_values()) return Vector<Scalar>::Constant(y.size(), Scalar(0.5));
        return ((y.array() - y_min) / (y_max - y_min)).matrix();
    }
    [[nodiscard]] Vector<Scalar> from_unit_values(const Vector<Scalar>& v) const {
        if (constant_values()) return Vector<Scalar>::Constant(v.size(), y_min);
        return (v.array() * (y_max - y_min) + y_min).matrix();
    }
};

using NormalizationParams = BasicNormalizationParams<double>;

template <typename Scalar>
[[nodiscard]] BasicNormalizationParams<Scalar> normalization_params(
    const BasicTimeSeries<Scalar>& series) {
    const auto& t = series.times();
    const auto& y = series.values();
    return {t[0], t[t.size() - 1], y.minCoeff(), y.maxCoeff()};
}

/// Maps both axes onto [0,1]. Times span exactly [0,1]; values span [0,1]
/// unless the series is constant, in which case every value becomes 0.5.
template <typename Scalar>
[[nodiscard]] std::pair<BasicTimeSeries<Scalar>, BasicNormalizationParams<Scalar>> normalize(
    const BasicTimeSeries<Scalar>& series) {
    const auto params = normalization_params(series);
    Vector<Scalar> t = params.to_unit_time(series.times());
    // Pin the endpoints; the affine map can land a few ulps off.
    t[0] = Scalar(0);
    t[t.size() - 1] = Scalar(1);
    return {BasicTimeSeries<Scalar>(std::move(t), params.to_unit_values(series.values())), params};
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> denormalize_values(const Vector<Scalar>& values,
                                                const BasicNormalizationParams<Scalar>& params) {
    return params.from_unit_values(values);
}

template <typename Scalar>
[[nodiscard]] BasicTimeSeries<Scalar> denormalize(const BasicTimeSeries<Scalar>& series,
                                                  const BasicNormalizationParams<Scalar>& params) {
    if (!(params.t_max > params.t_min) || !(params.y_max >= params.y_min)) {
        throw InvalidInput("denormalize: malformed normalization parameters");
    }
    Vector<Scalar> t = params.from_unit_time(series.times());
    return BasicTimeSeries<Scalar>(std::move(t), params.from_unit_values(series.values()));
}

/// Mirrors `window` samples about each end point:
///   left  (2 t_0 - t_j, y_j),             j = window..1
///   right (2 t_{N-1} - t_{N-1-j}, y_{N-1-j}), j = 1..window
/// The original samples sit unchanged in the middle.
template <typename Scalar>
[[nodiscard]] BasicTimeSeries<Scalar> reflect_pad(const BasicTimeSeries<Scalar>& series,
                                                  Eigen::Index window) {
    const Eigen::Index n = series.size();
    if (window < 1 || window > n - 1) {
        throw InvalidInput("reflect_pad: window must lie in [1, N-1], got " +
                           std::to_string(window));
    }
    const auto& t = series.times();
    const auto& y = series.values();
    Vector<Scalar> pt(n + 2 * window);
    Vector<Scalar> py(n + 2 * window);
    for (Eigen::Index j = window; j >= 1; --j) {
        const Eigen::Index out = window - j;
        pt[out] = Scalar(2) * t[0] - t[j];
        py[out] = y[j];
    }
    pt.segment(window, n) = t;
    py.segment(window, n) = y;
    for (Eigen::Index j = 1; j <= window; ++j) {
        const Eigen::Index out = window + n - 1 + j;
        pt[out] = Scalar(2) * t[n - 1] - t[n - 1 - j];
        py[out] = y[n - 1 - j];
    }
    return BasicTimeSeries<Scalar>(std::move(pt), std::move(py));
}

namespace detail {

template <typename Scalar>
Vector<Scalar> first_difference(const Vector<Scalar>& y, const Vector<Scalar>& t) {
    const Eigen::Index n = y.size();
    Vector<Scalar> d(n);
    d[0] = (y[1] - y[0]) / (t[1] - t[0]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
    }
    d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
    return d;
}

}  // namespace detail

/// Central differences in the interior, two-point one-sided at the ends.
/// Divides by the actual time gaps, so irregular sampling is fine.
/// Order 2 is the first-order stencil applied twice; only entries
/// 2..N-3 of it are free of the one-sided end stencils.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> finite_diff(const Vector<Scalar>& values, const Vector<Scalar>& times,
                                         int order) {
    if (values.size() != times.size()) {
        throw InvalidInput("finite_diff: times and values differ in length");
    }
    if (values.size() < 3) {
        throw InvalidInput("finite_diff: need at least 3 samples");
    }
    if (order != 1 && order != 2) {
        throw InvalidInput("finite_diff: order must be 1 or 2");
    }
    Vector<Scalar> d = detail::first_difference(values, times);
    if (order == 2) d = detail::first_difference(d, times);
    return d;
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> finite_diff(const BasicTimeSeries<Scalar>& series, int order) {
    return finite_diff(series.values(), series.times(), order);
}

}  // namespace cascade_kde
