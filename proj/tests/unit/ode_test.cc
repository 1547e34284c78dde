#include <gtest/gtest.h>

#include <cmath>

#include "omcache/errors.h"
#include "omcache/ode.h"

using namespace omcache;

TEST(Ode, ExponentialDecay) {
    OdeRhs rhs = [](const RealVector &x, RealVector &dx, double) { dx = -2.0 * x; };
    RealVector x0(1);
    x0 << 1.0;
    auto out = integrate_at(rhs, x0, {0.0, 0.5, 1.0, 3.0});
    ASSERT_EQ(out.size(), 4u);
    EXPECT_NEAR(out[1][0], std::exp(-1.0), 1e-8);
    EXPECT_NEAR(out[3][0], std::exp(-6.0), 1e-9);
}

TEST(Ode, Oscillator) {
    OdeRhs rhs = [](const RealVector &x, RealVector &dx, double) {
        dx[0] = x[1];
        dx[1] = -x[0];
    };
    RealVector x0(2);
    x0 << 1.0, 0.0;
    auto out = integrate_at(rhs, x0, {0.0, 10.0});
    EXPECT_NEAR(out[1][0], std::cos(10.0), 1e-6);
}

TEST(Ode, RejectsUnorderedTimes) {
    OdeRhs rhs = [](const RealVector &x, RealVector &dx, double) { dx = x; };
    EXPECT_THROW(integrate_at(rhs, RealVector::Ones(1), {0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Ode, NonFiniteIsStall) {
    OdeRhs rhs = [](const RealVector &x, RealVector &dx, double) { dx = x.array().square(); };
    RealVector x0(1);
    x0 << 1.0;
    EXPECT_THROW(integrate_at(rhs, x0, {0.0, 2.0}), IntegratorStall);
}

TEST(Ode, MaxStepResolvesNarrowPulse) {
    // A pulse centred at t=5 with width 1e-3 is missed by a large unconstrained step.
    OdeRhs rhs = [](const RealVector &, RealVector &dx, double t) {
        dx[0] = std::exp(-std::pow((t - 5.0) / 1e-3, 2));
    };
    OdeOptions opt;
    opt.max_step = 1e-4;
    auto out = integrate_at(rhs, RealVector::Zero(1), {0.0, 10.0}, opt);
    EXPECT_NEAR(out[1][0], std::sqrt(M_PI) * 1e-3, 1e-8);
}
