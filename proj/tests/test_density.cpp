#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cascade_kde/density.hpp"
#include "test_support.hpp"

using namespace cascade_kde;

namespace {

DensityField field_from(const std::vector<double>& ts, const std::vector<double>& ys, double ht,
                        double hy) {
    VectorXd t = Eigen::Map<const VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    VectorXd y = Eigen::Map<const VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    return {t, y, Bandwidths{ht, hy}};
}

std::vector<double> uniform_draws(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST(KdeEval, KernelAtOrigin) {
    const auto f = field_from({0.5}, {0.5}, 1.0, 1.0);
    EXPECT_NEAR(kde_eval(f, 0.5, 0.5), 0.15915494309189535, 1e-15);
}

TEST(KdeEval, FarAwayUnderflows) {
    const auto f = field_from({0.5, 0.6}, {0.5, 0.4}, 0.02, 0.02);
    EXPECT_LT(kde_eval(f, 0.5 + 40 * 0.02 + 0.1, 0.5), 1e-300);
    EXPECT_LT(kde_eval(f, 0.5, 0.5 + 40 * 0.02 + 0.2), 1e-300);
}

TEST(KdeEval, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ts = uniform_draws(rng, 10);
        const auto ys = uniform_draws(rng, 10);
        const double h = 0.05 + 0.3 * uniform_draws(rng, 1)[0];
        const auto q = uniform_draws(rng, 2);
        const auto f = field_from(ts, ys, h, h * 0.8);
        const double oracle = testsupport::kde_oracle(ts, ys, h, h * 0.8, q[0], q[1]);
        EXPECT_NEAR(kde_eval(f, q[0], q[1]), oracle, 1e-12 * oracle);
    }
}

TEST(KdeEval, RejectsEmptyAndBadBandwidth) {
    EXPECT_THROW(DensityField(VectorXd(), VectorXd(), Bandwidths{}), InvalidInput);
    EXPECT_THROW(field_from({0.1}, {0.2}, 0.0, 0.1), InvalidInput);
    EXPECT_THROW(field_from({0.1}, {0.2}, 0.1, -1.0), InvalidInput);
    EXPECT_THROW(field_from({0.1}, {0.2}, NAN, 0.1), InvalidInput);
}

TEST(KdeColumn, SingleNodeAndSymmetry) {
    const auto f = field_from({0.3, 0.5, 0.9}, {0.2, 0.4, 0.8}, 0.1, 0.1);
    VectorXd one(1);
    one << 0.37;
    EXPECT_NEAR(kde_eval_column(f, 0.41, one)[0], kde_eval(f, 0.41, 0.37), 1e-12 * kde_eval(f, 0.41, 0.37));

    const auto lone = field_from({0.5}, {0.5}, 0.05, 0.05);
    const VectorXd grid = VectorXd::LinSpaced(41, 0.3, 0.7);
    const VectorXd col = kde_eval_column(lone, 0.52, grid);
    for (Eigen::Index m = 0; m < grid.size(); ++m) {
        EXPECT_NEAR(col[m], col[grid.size() - 1 - m], 1e-12 * col[m]);
    }
}

TEST(KdeColumn, MatchesPointwiseLoop) {
    std::mt19937_64 rng(4);
    const auto ts = uniform_draws(rng, 40);
    const auto ys = uniform_draws(rng, 40);
    const auto f = field_from(ts, ys, 0.04, 0.03);
    const VectorXd grid = VectorXd::LinSpaced(150, -0.1, 1.1);
    for (double t : {0.0, 0.33, 0.5, 0.97}) {
        const VectorXd col = kde_eval_column(f, t, grid);
        for (Eigen::Index m = 0; m < grid.size(); ++m) {
            const double p = kde_eval(f, t, grid[m]);
            EXPECT_NEAR(col[m], p, 1e-12 * std::max(p, 1e-300));
        }
    }
}

TEST(KdeProperties, NonNegativePermutationAndDuplication) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        auto ts = uniform_draws(rng, 25);
        auto ys = uniform_draws(rng, 25);
        const auto f = field_from(ts, ys, 0.07, 0.07);

        std::vector<std::size_t> perm(ts.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> pt, py;
        for (auto i : perm) {
            pt.push_back(ts[i]);
            py.push_back(ys[i]);
        }
        const auto g = field_from(pt, py, 0.07, 0.07);

        auto dt = ts, dy = ys;
        dt.insert(dt.end(), ts.begin(), ts.end());
        dy.insert(dy.end(), ys.begin(), ys.end());
        const auto d = field_from(dt, dy, 0.07, 0.07);

        for (int q = 0; q < 20; ++q) {
            const auto xy = uniform_draws(rng, 2);
            const double p = kde_eval(f, xy[0] * 1.4 - 0.2, xy[1] * 1.4 - 0.2);
            EXPECT_GE(p, 0.0);
            EXPECT_NEAR(kde_eval(g, xy[0] * 1.4 - 0.2, xy[1] * 1.4 - 0.2), p, 1e-12 * std::max(p, 1e-300));
            EXPECT_NEAR(kde_eval(d, xy[0] * 1.4 - 0.2, xy[1] * 1.4 - 0.2), p, 1e-12 * std::max(p, 1e-300));
        }
    }
}

TEST(KdeProperties, FlattensAsBandwidthDoubles) {
    std::mt19937_64 rng(12);
    const auto ts = uniform_draws(rng, 30);
    const auto ys = uniform_draws(rng, 30);
    double previous = INFINITY;
    for (double h = 0.05; h <= 6.4; h *= 2) {
        const auto f = field_from(ts, ys, h, h);
        double lo = INFINITY, hi = 0;
        for (int i = 0; i <= 10; ++i) {
            for (int j = 0; j <= 10; ++j) {
                const double p = kde_eval(f, i / 10.0, j / 10.0);
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
        }
        const double ratio = hi / lo;
        EXPECT_LT(ratio, previous) << "h=" << h;
        previous = ratio;
    }
}

TEST(BandwidthSchedule, TableValues) {
    const BandwidthSchedule s;
    EXPECT_DOUBLE_EQ(s.at(1).time, 0.02);
    EXPECT_DOUBLE_EQ(s.at(1).amplitude, 0.02);
    EXPECT_DOUBLE_EQ(s.at(3).time, 0.04);
    BandwidthSchedule fixed;
    fixed.fixed = true;
    EXPECT_DOUBLE_EQ(fixed.at(5).time, 0.02);
    EXPECT_THROW((void)s.at(0), InvalidInput);
}

TEST(Silverman, FloorAndScale) {
    EXPECT_DOUBLE_EQ(silverman_bandwidth(VectorXd(VectorXd::Constant(10, 0.3)), 0.01), 0.01);
    VectorXd v(4);
    v << 0, 1, 0, 1;
    EXPECT_NEAR(silverman_bandwidth(v, 0.0), 1.06 * 0.5 * std::pow(4.0, -0.2), 1e-15);
}
