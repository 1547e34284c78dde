#include <gtest/gtest.h>

#include <cmath>

#include "omcache/dual_rail.h"

using namespace omcache;

TEST(DualRail, LeakRateMatchesClosedForm) {
    for (double n : {0.0, 0.1, 1.0}) {
        auto d = dual_rail_lifetimes(1.0, n);
        EXPECT_NEAR(d.tau_leak, 1 / (4 * n + 1), 1e-12);
        EXPECT_NEAR(d.tau_leak_numeric / d.tau_leak, 1.0, 0.02) << n;
    }
}

TEST(DualRail, ZeroTemperatureNeverFlips) {
    auto d = dual_rail_lifetimes(1.0, 0.0);
    EXPECT_TRUE(std::isinf(d.tau_X));
    EXPECT_TRUE(std::isinf(d.tau_Z));
    EXPECT_DOUBLE_EQ(bit_flip_probability(1.0, 0.0, 5.0), 0.0);
}

TEST(DualRail, IdenticalRailsAreUnbiased) {
    auto d = dual_rail_lifetimes(1.0, 0.1);
    EXPECT_NEAR(d.bias, 1.0, 1e-6);
    EXPECT_DOUBLE_EQ(d.loss_rate, 1.1);
    EXPECT_DOUBLE_EQ(d.gain_rate, 0.1);
}

TEST(DualRail, LifetimesShortenWithTemperature) {
    double prev = INFINITY;
    for (double n : {0.01, 0.1, 1.0}) {
        double t = dual_rail_lifetimes(1.0, n).tau_X;
        EXPECT_LT(t, prev);
        prev = t;
    }
}

TEST(DualRail, FlipProbabilitiesGrowInTime) {
    EXPECT_LT(bit_flip_probability(1.0, 0.1, 0.5), bit_flip_probability(1.0, 0.1, 2.0));
    EXPECT_LT(phase_flip_probability(1.0, 0.1, 0.5), phase_flip_probability(1.0, 0.1, 2.0));
}

TEST(DualRail, RejectsBadInputs) {
    EXPECT_THROW(dual_rail_lifetimes(0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(dual_rail_lifetimes(1.0, -0.1), std::invalid_argument);
}
