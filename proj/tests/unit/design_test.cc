#include <gtest/gtest.h>

#include <cmath>

#include "omcache/config.h"
#include "omcache/design.h"
#include "omcache/errors.h"

using namespace omcache;
using namespace omcache::design;

namespace {

GivenParams corner() {
    GivenParams g;
    g.g0 = kTwoPi * 3e3;
    g.eta_d = 0.99;
    g.n_th = 1e-3;
    g.N = 10;
    return g;
}

}  // namespace

TEST(Given, Validation) {
    GivenParams g = corner();
    g.eta_d = 1.5;
    EXPECT_THROW(g.validate(), std::invalid_argument);
    g = corner();
    g.N = 0;
    EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Evaluate, BudgetIsProductOfFactors) {
    auto p = evaluate_total_fidelity(corner(), {kTwoPi * 1e8, 0.01, 50e-9});
    ASSERT_TRUE(p.feasible) << p.violation;
    const auto &b = p.budget;
    EXPECT_NEAR(b.F_tot, b.F_init * b.F_hsp * b.F_idle * b.eta_re, 1e-15);
    EXPECT_LE(p.drive_power, 1e-3);
    EXPECT_GT(p.T_h, p.T_squeeze);
}

TEST(Evaluate, InfeasiblePointsScoreZero) {
    auto p = evaluate_total_fidelity(corner(), {kTwoPi * 1e8, 0.3, 50e-9});
    EXPECT_FALSE(p.feasible);
    EXPECT_EQ(p.budget.F_tot, 0.0);
    EXPECT_FALSE(p.violation.empty());
}

TEST(Maximize, ReproducibleAndHonest) {
    auto a = maximize_fidelity(corner());
    auto b = maximize_fidelity(corner());
    EXPECT_EQ(a.best.budget.F_tot, b.best.budget.F_tot);
    EXPECT_EQ(a.argmax.kappa_ex, b.argmax.kappa_ex);
    EXPECT_EQ(a.argmax.p1, b.argmax.p1);
    auto re = evaluate_total_fidelity(corner(), a.argmax);
    EXPECT_NEAR(re.budget.F_tot, a.best.budget.F_tot, 1e-10);
    EXPECT_TRUE(re.feasible);
    EXPECT_LT(a.argmax.p1, 0.25);
    EXPECT_LE(re.drive_power, 1e-3);
    EXPECT_GE(a.near_optimal_count, 1u);
    EXPECT_EQ(a.refine_iterations.size(), 5u);
}

TEST(Maximize, MonotoneInGivenParameters) {
    auto F = [](double g_khz, double eta_d, double n_th, int N) {
        GivenParams g;
        g.g0 = kTwoPi * g_khz * 1e3;
        g.eta_d = eta_d;
        g.n_th = n_th;
        g.N = N;
        return maximize_fidelity(g).best.budget.F_tot;
    };
    const double tol = 1e-6;
    EXPECT_GE(F(3, 0.99, 1e-3, 10) + tol, F(1, 0.99, 1e-3, 10));
    EXPECT_GE(F(10, 0.99, 1e-3, 10) + tol, F(3, 0.99, 1e-3, 10));
    EXPECT_GE(F(3, 0.99, 1e-3, 10) + tol, F(3, 0.9, 1e-3, 10));
    EXPECT_GE(F(3, 0.99, 1e-3, 10) + tol, F(3, 0.99, 1e-1, 10));
    EXPECT_GE(F(3, 0.99, 1e-3, 10) + tol, F(3, 0.99, 1e-3, 1000));
}

TEST(Maximize, SingleSourceHasNoIdlingPenalty) {
    GivenParams g = corner();
    g.N = 1;
    auto one = maximize_fidelity(g);
    EXPECT_DOUBLE_EQ(one.best.budget.F_idle, 1.0);
    g.N = 1000;
    auto many = maximize_fidelity(g);
    EXPECT_GT(many.argmax.p1, one.argmax.p1);
}

TEST(Maximize, ThrowsWhenNothingFeasible) {
    SearchBounds b;
    b.T_init_min = 1e-12;
    b.T_init_max = 2e-12;
    EXPECT_THROW(maximize_fidelity(corner(), b), Infeasible);
}

TEST(MinG0, FavorableCornerInKilohertzRange) {
    GivenParams g = corner();
    auto r = min_g0(g);
    double hz = rad_to_hz(r.g0);
    EXPECT_GE(hz, 1e3);
    EXPECT_LE(hz, 10e3);
    EXPECT_GE(r.F_at_g0, 0.99);
    EXPECT_LT(r.F_at_lower, 0.99);
    EXPECT_LE(r.g0 / r.g_lower, 1.02 + 1e-12);
}

TEST(MinG0, ZeroTargetReturnsLowerBracket) {
    auto r = min_g0(corner(), 0.0);
    EXPECT_DOUBLE_EQ(r.g0, kTwoPi * 100);
}

TEST(MinG0, UnreachableTargetThrows) {
    EXPECT_THROW(min_g0(corner(), 0.999999), NoCrossing);
    EXPECT_THROW(min_g0(corner(), 1.5), std::invalid_argument);
}

TEST(FixedBudget, InteriorOptimumInP1) {
    Config c = load_preset("target");
    set_bath_temperature(c, 0.04);
    FixedBudgetParams p{c.schedule.F_init, c.schedule.eta_re, c.schedule.T_h, 1000, c.system.Gamma, c.system.n_th,
                        c.herald_model()};
    auto opt = optimize_p1(p);
    EXPECT_GT(opt.p1, 1e-6);
    EXPECT_LT(opt.p1, 0.24);
    EXPECT_GT(opt.budget.F_tot, fixed_budget_fidelity(p, opt.p1 / 10).budget.F_tot);
    EXPECT_GT(opt.budget.F_tot, fixed_budget_fidelity(p, std::min(0.24, opt.p1 * 10)).budget.F_tot);
    EXPECT_GE(opt.budget.F_tot, 0.99);
}
