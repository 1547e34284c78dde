#include <gtest/gtest.h>

#include <cmath>

#include "omcache/config.h"
#include "omcache/constants.h"
#include "omcache/errors.h"
#include "omcache/om_dynamics.h"

using namespace omcache;

namespace {

SystemParams target() {
    return load_preset("target").system;
}

SystemParams near_term() {
    return load_preset("near-term").system;
}

}  // namespace

TEST(Thermal, OccupationAtTwoKelvin) {
    // 10 GHz at 2 K: kT/(hbar Omega) is about 4.2.
    EXPECT_NEAR(thermal_occupation(kTwoPi * 10e9, 2.0), 3.69, 0.01);
    EXPECT_EQ(thermal_occupation(kTwoPi * 10e9, 0.0), 0.0);
    EXPECT_LT(thermal_occupation(kTwoPi * 10e9, 0.04), 1e-5);
}

TEST(Pulse, TanhWindowAndEnvelope) {
    DrivePulse p{1e-3, 10e-9};
    EXPECT_NEAR(p.window(), 16e-9, 1e-18);
    double tau = 0.05 * p.duration;
    // Half power at the nominal edges.
    EXPECT_NEAR(p.envelope(6 * tau), 0.5, 1e-6);
    EXPECT_NEAR(p.envelope(6 * tau + p.duration), 0.5, 1e-6);
    EXPECT_NEAR(p.envelope(6 * tau + 0.5 * p.duration), 1.0, 1e-8);
}

TEST(Pulse, RejectsBadParameters) {
    EXPECT_THROW((DrivePulse{-1, 1e-9}).validate(), std::invalid_argument);
    EXPECT_THROW((DrivePulse{1e-3, 0}).validate(), std::invalid_argument);
}

TEST(Damping, TargetSteadyState) {
    auto s = target();
    s.n_th = 3.7;
    auto a = pump_photon_number(s, 1e-3);
    EXPECT_TRUE(a.stiff_pump_valid);
    auto d = optical_damping(s, a);
    EXPECT_NEAR(rad_to_hz(d.Gamma_opt) / 1e9, 0.2, 0.02);
    EXPECT_TRUE(d.weak_coupling);
    EXPECT_NEAR(cooled_population(s, a), 2e-7, 0.4e-7);
}

TEST(Cooling, TargetDurations) {
    auto s = target();
    EXPECT_NEAR(solve_pulse_duration(s, 1e-3, DurationTarget::population(1e-3, 3.7)) * 1e9, 5.2, 0.78);
    EXPECT_NEAR(solve_pulse_duration(s, 1e-3, DurationTarget::population(1e-3, 0.06)) * 1e9, 2.8, 0.42);
}

TEST(Cooling, NearTermDurations) {
    auto s = near_term();
    double n_star = 1 / 0.99 - 1;
    EXPECT_NEAR(solve_pulse_duration(s, 1e-3, DurationTarget::population(n_star, s.n_th)) * 1e9, 96, 14);
    EXPECT_NEAR(solve_pulse_duration(s, 1e-3, DurationTarget::population(n_star, 0.1)) * 1e9, 43, 6.5);
}

TEST(Cooling, RateEquationIsSlowerThanMoments) {
    auto s = target();
    DurationOptions o;
    o.model = CoolingModel::rate_equation;
    double rate = solve_pulse_duration(s, 1e-3, DurationTarget::population(1e-3, 3.7), o);
    double mom = solve_pulse_duration(s, 1e-3, DurationTarget::population(1e-3, 3.7));
    EXPECT_GT(rate, mom);
}

TEST(Cooling, TrajectoryStartsAtInitialPopulationAndDecreases) {
    auto s = target();
    DrivePulse p{1e-3, 5.2e-9};
    auto traj = cooling_trajectory(s, p, 3.7);
    auto v = traj.at({0.0, 2e-9, 4e-9, p.window()});
    EXPECT_DOUBLE_EQ(v[0], 3.7);
    EXPECT_GT(v[1], v[2]);
    EXPECT_GT(v[2], v[3]);
    EXPECT_LT(v[3], 1e-3);
}

TEST(Cooling, TrajectoryAcceptsThePulseEnd) {
    auto s = target();
    DrivePulse p{1e-3, 5.2e-9};
    auto traj = cooling_trajectory(s, p, 3.7);
    double end = p.window();
    auto v = traj.at({0.5 * end, end, 1.5 * end});
    EXPECT_EQ(v.size(), 3u);
    EXPECT_GT(v[0], v[1]);
    // Only the slow bath acts after the pulse.
    EXPECT_NEAR(v[2], v[1], 1e-5);
}

TEST(Cooling, UnreachableTargetThrows) {
    auto s = target();
    EXPECT_THROW(solve_pulse_duration(s, 1e-6, DurationTarget::population(1e-9, 3.7)), Unreachable);
}

TEST(Squeeze, LosslessLimitIsSinhSquared) {
    auto s = target();
    s.kappa_int = 1e-6;
    s.kappa_ex = 1e-6;
    PumpAmplitude a;
    a.alpha = 1e6 / s.gh;
    a.alpha_sq = a.alpha * a.alpha;
    EXPECT_NEAR(squeeze_population(s, a, 1e-6), std::pow(std::sinh(1.0), 2), 1e-6);
}

TEST(Squeeze, ZeroTimeGivesVacuumAndNegativeTimeThrows) {
    auto s = target();
    auto a = pump_photon_number(s, 1e-4);
    EXPECT_DOUBLE_EQ(squeeze_population(s, a, 0.0), 0.0);
    EXPECT_THROW(squeeze_population(s, a, -1.0), std::invalid_argument);
}

TEST(Pairs, GeometricStatistics) {
    PairDistribution d(0.25);
    double sum = 0, mean = 0;
    for (int k = 0; k < 200; k++) {
        sum += d(k);
        mean += k * d(k);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(mean, 0.25, 1e-12);
    EXPECT_DOUBLE_EQ(d.variance(), 0.25 * 1.25);
    EXPECT_THROW(PairDistribution(-0.1), std::invalid_argument);
}

TEST(Swap, ConservesExcitationWithoutLoss) {
    auto s = target();
    PumpAmplitude a;
    a.alpha = s.kappa() / 8 / s.g0;
    a.alpha_sq = a.alpha * a.alpha;
    auto z = swap_populations(s, a, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(z.n_ph, 1.0);
    EXPECT_DOUBLE_EQ(z.n_0, 0.0);
    auto later = swap_populations(s, a, 10 / s.kappa(), 1.0);
    EXPECT_LT(later.n_ph + later.n_0, 1.0);
}

TEST(Retrieval, TargetDurationsForHighEfficiency) {
    auto s = target();
    EXPECT_NEAR(solve_pulse_duration(s, 0.25e-3, DurationTarget::efficiency(0.998)) * 1e9, 21, 2.1);
    EXPECT_NEAR(solve_pulse_duration(s, 0.5e-3, DurationTarget::efficiency(0.998)) * 1e9, 10, 1.0);
    EXPECT_NEAR(solve_pulse_duration(s, 1e-3, DurationTarget::efficiency(0.998)) * 1e9, 4.4, 0.44);
}

TEST(Retrieval, EfficiencyBelowBoundAndProbabilityAbove) {
    auto s = target();
    DrivePulse p{0.5e-3, 5e-9};
    double eta = retrieval_efficiency(s, p);
    EXPECT_LE(eta, retrieval_efficiency_bound(s, p.power) + 1e-9);
    EXPECT_GE(retrieval_probability(s, p), eta);
}

TEST(Retrieval, StrongCouplingThresholds) {
    EXPECT_NEAR(strong_coupling_power(target()) * 1e3, 1.3, 0.05);
    EXPECT_NEAR(strong_coupling_power(near_term()) * 1e3, 1.6, 0.05);
    DrivePulse p{2e-3, 5e-9};
    EXPECT_THROW(retrieval_efficiency(target(), p), StrongCouplingRegime);
}
