#ifndef OMCACHE_DESIGN_H
#define OMCACHE_DESIGN_H

#include <string>
#include <vector>

#include "omcache/constants.h"
#include "omcache/herald_model.h"
#include "omcache/multiplex.h"

namespace omcache::design {

/// Quantities held fixed while the operating point is optimized.
struct GivenParams {
    double g0 = kTwoPi * 1e3;  // rad/s, also used for the squeezing coupling
    double eta_d = 0.99;
    double n_th = 1e-3;
    int N = 10;
    double max_power = 1e-3;               // W
    double kappa_int = kTwoPi * 1e6;       // rad/s
    double Gamma = kTwoPi * 50;            // rad/s
    double omega0 = kTwoPi * 193e12;       // rad/s
    double Omega = kTwoPi * 13e9;          // rad/s
    double dark_rate = 100;                // counts/s
    double feedback = 5e-9;                // s per cycle
    double rise_fall_periods = 8;          // cycle overhead in units of 2 pi / kappa

    void validate() const;
};

struct FreeParams {
    double kappa_ex = 0;  // rad/s
    double p1 = 0;
    double T_init = 0;    // s
};

struct DesignPoint {
    bool feasible = false;
    std::string violation;
    FidelityBudget budget;
    double T_squeeze = 0;      // s
    double T_h = 0;            // s
    double p_hsp = 0;
    double p_d = 0;
    double squeeze_power = 0;  // W
    double drive_power = 0;    // W, cooling and retrieval
    double C = 0;
    double n_init = 0;         // residual phonons after re-initialization
};

/// F_tot = F_init F_hsp F_idle eta_re for one operating point. Constraint
/// violations give feasible = false and F_tot = 0 rather than throwing.
DesignPoint evaluate_total_fidelity(const GivenParams &given, const FreeParams &free);

struct SearchBounds {
    double kappa_ex_min = kTwoPi * 1e6;
    double kappa_ex_max = kTwoPi * 1e10;
    double p1_min = 1e-4;
    double p1_max = 0.24;
    double T_init_min = 1e-9;
    double T_init_max = 1e-5;
    int points_per_decade = 20;
    int refine_starts = 5;
};

struct OptimizerResult {
    DesignPoint best;
    FreeParams argmax;
    size_t grid_points = 0;
    size_t feasible_points = 0;
    size_t evaluations = 0;
    std::vector<int> refine_iterations;
    /// Grid points within 1e-4 of the optimum.
    size_t near_optimal_count = 0;
    FreeParams near_optimal_min, near_optimal_max;
};

/// Logarithmic grid over (kappa_ex, p1, T_init), then Nelder-Mead from the
/// best grid points. Throws Infeasible when no grid point is feasible.
OptimizerResult maximize_fidelity(const GivenParams &given, const SearchBounds &bounds = {});

struct MinG0Result {
    double g0 = 0;  // rad/s, smallest bracket end reaching the target
    double g_lower = 0;
    double F_at_g0 = 0;
    double F_at_lower = 0;
    int iterations = 0;
    OptimizerResult optimum;
};

/// Bisection on log g0 over [2 pi 100 Hz, 2 pi 1 MHz] until the bracket
/// ratio is below 1.02. Throws NoCrossing when the upper end misses the target.
MinG0Result min_g0(GivenParams given, double target = 0.99, const SearchBounds &bounds = {},
                   double g_min = kTwoPi * 100, double g_max = kTwoPi * 1e6);

/// Operating point with F_init, eta_re and T_h fixed; only p1 is free.
struct FixedBudgetParams {
    double F_init = 1;
    double eta_re = 1;
    double T_h = 10e-9;
    int N = 1;
    double Gamma = 0;
    double n_th = 0;
    HeraldModel herald;
};

struct FixedBudgetPoint {
    double p1 = 0;
    double p_hsp = 0;
    FidelityBudget budget;
};

FixedBudgetPoint fixed_budget_fidelity(const FixedBudgetParams &params, double p1);
/// Log grid over p1 in [1e-6, 0.24] then golden-section refinement.
FixedBudgetPoint optimize_p1(const FixedBudgetParams &params);

}  // namespace omcache::design

#endif
