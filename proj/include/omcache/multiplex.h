#ifndef OMCACHE_MULTIPLEX_H
#define OMCACHE_MULTIPLEX_H

#include <cstdint>
#include <vector>

namespace omcache {

struct ScheduleParams {
    int N = 1;
    double p_hsp = 1;
    double T_h = 10e-9;  // s per heralding cycle
    double Gamma = 0;    // rad/s
    double n_th = 0;

    void validate() const;
};

/// Probability that all N sources have heralded within M cycles, (1-(1-p)^M)^N.
double herald_cdf(long M, const ScheduleParams &s);
double herald_cdf(long M, int N, double p);

struct MaxCycle {
    double M_bar;  // expected cycle of the last herald
    double m_bar;  // expected cycle of a single herald, 1/p
};

MaxCycle expected_max_cycle(const ScheduleParams &s);
double expected_max_cycle(int N, double p);
/// Direct sum of M (P(M) - P(M-1)) stopped by a geometric tail bound.
double expected_max_cycle_series(int N, double p);
/// sum_k C(N,k) (-1)^(k+1) / (1 - (1-p)^k) in 100-digit arithmetic. Requires N <= 200.
double expected_max_cycle_inclusion_exclusion(int N, double p);

struct IdlingResult {
    double F_idle = 1;
    double rate = 0;          // (3 n_th + 1) Gamma
    double loss_rate = 0;     // (n_th + 1) Gamma
    double heating_rate = 0;  // 2 n_th Gamma
    double idle_cycles = 0;   // M_bar - m_bar
};

IdlingResult idling_fidelity(const ScheduleParams &s);

struct FidelityBudget {
    double F_init = 1;
    double F_hsp = 1;
    double F_idle = 1;
    double eta_re = 1;
    double F_tot = 1;
};

/// Product of the four factors. Throws std::invalid_argument outside [0, 1].
FidelityBudget total_fidelity(double F_init, double F_hsp, double F_idle, double eta_re);

struct ScheduleSample {
    uint64_t trials = 0;
    double mean_M = 0, se_M = 0;
    double mean_idle = 0, se_idle = 0;           // per-source idle cycles
    double mean_survival = 0, se_survival = 0;   // per-source exp(-rate * idle * T_h)
    std::vector<uint64_t> M_counts;              // M_counts[M] trials ending on cycle M

    /// Empirical P(max cycle <= M).
    double cdf(long M) const;
};

/// Seeded simulation in fixed chunks; results do not depend on the thread count
/// (OMCACHE_THREADS caps the number of workers).
ScheduleSample monte_carlo_schedule(const ScheduleParams &s, uint64_t trials, uint64_t seed);

/// Worker count from OMCACHE_THREADS, defaulting to the hardware concurrency.
unsigned worker_threads();

}  // namespace omcache

#endif
