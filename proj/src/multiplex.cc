#include "omcache/multiplex.h"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace omcache {

void ScheduleParams::validate() const {
    if (N < 1) {
        throw std::invalid_argument("N must be at least 1");
    }
    if (!(p_hsp > 0 && p_hsp <= 1)) {
        throw std::invalid_argument("p_hsp must lie in (0, 1]");
    }
    if (!(T_h > 0)) {
        throw std::invalid_argument("T_h must be positive");
    }
    if (!(Gamma >= 0 && n_th >= 0)) {
        throw std::invalid_argument("Gamma and n_th must be non-negative");
    }
}

double herald_cdf(long M, int N, double p) {
    if (M <= 0) {
        return 0.0;
    }
    // (1 - q^M)^N with q^M = exp(M log1p(-p))
    double qM = p >= 1 ? 0.0 : std::exp(double(M) * std::log1p(-p));
    return std::exp(N * std::log1p(-qM));
}

double herald_cdf(long M, const ScheduleParams &s) {
    s.validate();
    return herald_cdf(M, s.N, s.p_hsp);
}

namespace {

// sum_{M>=0} (1 - (1 - q^M)^N), the tail-sum form of the expectation.
double tail_sum(int N, double p) {
    double log_q = std::log1p(-p);
    double total = 0;
    for (long M = 0;; M++) {
        double qM = std::exp(double(M) * log_q);
        double term = -std::expm1(N * std::log1p(-qM));
        total += term;
        // Remaining terms are bounded by N q^(M+1) / p.
        double bound = N * qM * (1 - p) / p;
        if (bound < 1e-13 * total) {
            break;
        }
    }
    return total;
}

}  // namespace

double expected_max_cycle(int N, double p) {
    if (N < 1 || !(p > 0 && p <= 1)) {
        throw std::invalid_argument("expected_max_cycle needs N >= 1 and p in (0, 1]");
    }
    if (p == 1) {
        return 1.0;
    }
    if (N == 1) {
        return 1 / p;
    }
    if (N <= 20) {
        double s = 0;
        for (int k = 1; k <= N; k++) {
            double c = boost::math::binomial_coefficient<double>(N, k);
            double denom = -std::expm1(k * std::log1p(-p));
            s += (k % 2 ? c : -c) / denom;
        }
        return s;
    }
    if (p < 0.05) {
        // Euler-Maclaurin: every correction term vanishes for N > 20 and the
        // residual is of order exp(-2 pi^2 / lambda).
        double lambda = -std::log1p(-p);
        double H = 0;
        for (int k = N; k >= 1; k--) {
            H += 1.0 / k;
        }
        return H / lambda + 0.5;
    }
    return tail_sum(N, p);
}

double expected_max_cycle_series(int N, double p) {
    if (N < 1 || !(p > 0 && p <= 1)) {
        throw std::invalid_argument("expected_max_cycle needs N >= 1 and p in (0, 1]");
    }
    double total = 0, prev = 0;
    for (long M = 1;; M++) {
        double P = herald_cdf(M, N, p);
        total += double(M) * (P - prev);
        prev = P;
        // Neglected mass of the mean: M (1 - P(M)) + sum_{m>=M} (1 - P(m)) <= M (1 - P(M)) + N q^M / p.
        double qM = std::pow(1 - p, double(M));
        double bound = double(M) * (1 - P) + N * qM / p;
        if (P >= 1 || bound < 1e-12 * total) {
            break;
        }
    }
    return total;
}

double expected_max_cycle_inclusion_exclusion(int N, double p) {
    if (N < 1 || N > 200 || !(p > 0 && p <= 1)) {
        throw std::invalid_argument("inclusion-exclusion oracle needs 1 <= N <= 200 and p in (0, 1]");
    }
    using Big = boost::multiprecision::cpp_bin_float_100;
    Big q = Big(1) - Big(p);
    Big sum = 0;
    Big binom = 1;
    Big qk = 1;
    for (int k = 1; k <= N; k++) {
        binom = binom * (N - k + 1) / k;
        qk *= q;
        Big term = binom / (Big(1) - qk);
        sum += (k % 2) ? term : Big(-term);
    }
    return static_cast<double>(sum);
}

MaxCycle expected_max_cycle(const ScheduleParams &s) {
    s.validate();
    return {expected_max_cycle(s.N, s.p_hsp), 1 / s.p_hsp};
}

IdlingResult idling_fidelity(const ScheduleParams &s) {
    s.validate();
    IdlingResult r;
    r.loss_rate = (s.n_th + 1) * s.Gamma;
    r.heating_rate = 2 * s.n_th * s.Gamma;
    r.rate = r.loss_rate + r.heating_rate;
    MaxCycle m = expected_max_cycle(s);
    r.idle_cycles = std::max(0.0, m.M_bar - m.m_bar);
    r.F_idle = std::exp(-r.rate * r.idle_cycles * s.T_h);
    return r;
}

FidelityBudget total_fidelity(double F_init, double F_hsp, double F_idle, double eta_re) {
    for (double f : {F_init, F_hsp, F_idle, eta_re}) {
        if (!(f >= 0 && f <= 1)) {
            throw std::invalid_argument("fidelity factors must lie in [0, 1]");
        }
    }
    return {F_init, F_hsp, F_idle, eta_re, F_init * F_hsp * F_idle * eta_re};
}

double ScheduleSample::cdf(long M) const {
    if (M <= 0 || trials == 0) {
        return 0.0;
    }
    uint64_t c = 0;
    for (long m = 0; m <= M && m < static_cast<long>(M_counts.size()); m++) {
        c += M_counts[static_cast<size_t>(m)];
    }
    return double(c) / double(trials);
}

unsigned worker_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("OMCACHE_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) {
                return static_cast<unsigned>(std::min<long>(v, 256));
            }
        } catch (const std::exception &) {
        }
    }
    return hw;
}

namespace {

struct ChunkTotals {
    double sum_M = 0, sum_M2 = 0;
    double sum_idle = 0, sum_idle2 = 0;
    double sum_surv = 0, sum_surv2 = 0;
    std::vector<uint64_t> counts;
};

constexpr uint64_t kChunk = 8192;

ChunkTotals run_chunk(const ScheduleParams &s, uint64_t chunk, uint64_t n_trials, uint64_t seed) {
    std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(chunk), uint32_t(chunk >> 32)};
    std::mt19937_64 rng(seq);
    std::geometric_distribution<long> geo(s.p_hsp);
    double decay = (s.n_th * 3 + 1) * s.Gamma * s.T_h;
    ChunkTotals t;
    std::vector<long> m(static_cast<size_t>(s.N));
    for (uint64_t i = 0; i < n_trials; i++) {
        long M = 0;
        for (auto &mi : m) {
            mi = geo(rng) + 1;
            M = std::max(M, mi);
        }
        double idle = 0, surv = 0;
        for (long mi : m) {
            idle += double(M - mi);
            surv += std::exp(-decay * double(M - mi));
        }
        idle /= s.N;
        surv /= s.N;
        t.sum_M += double(M);
        t.sum_M2 += double(M) * double(M);
        t.sum_idle += idle;
        t.sum_idle2 += idle * idle;
        t.sum_surv += surv;
        t.sum_surv2 += surv * surv;
        if (t.counts.size() <= static_cast<size_t>(M)) {
            t.counts.resize(static_cast<size_t>(M) + 1, 0);
        }
        t.counts[static_cast<size_t>(M)]++;
    }
    return t;
}

}  // namespace

ScheduleSample monte_carlo_schedule(const ScheduleParams &s, uint64_t trials, uint64_t seed) {
    s.validate();
    if (trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<ChunkTotals> chunks(n_chunks);
    unsigned workers = std::min<uint64_t>(worker_threads(), n_chunks);
    auto work = [&](unsigned w) {
        for (uint64_t c = w; c < n_chunks; c += workers) {
            uint64_t n = std::min(kChunk, trials - c * kChunk);
            chunks[c] = run_chunk(s, c, n, seed);
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; w++) {
            pool.emplace_back(work, w);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    ChunkTotals total;
    for (const auto &c : chunks) {
        total.sum_M += c.sum_M;
        total.sum_M2 += c.sum_M2;
        total.sum_idle += c.sum_idle;
        total.sum_idle2 += c.sum_idle2;
        total.sum_surv += c.sum_surv;
        total.sum_surv2 += c.sum_surv2;
        if (total.counts.size() < c.counts.size()) {
            total.counts.resize(c.counts.size(), 0);
        }
        for (size_t i = 0; i < c.counts.size(); i++) {
            total.counts[i] += c.counts[i];
        }
    }
    ScheduleSample out;
    out.trials = trials;
    double n = double(trials);
    auto mean_se = [n](double sum, double sum2, double &mean, double &se) {
        mean = sum / n;
        double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
        se = std::sqrt(var / n);
    };
    mean_se(total.sum_M, total.sum_M2, out.mean_M, out.se_M);
    mean_se(total.sum_idle, total.sum_idle2, out.mean_idle, out.se_idle);
    mean_se(total.sum_surv, total.sum_surv2, out.mean_survival, out.se_survival);
    out.M_counts = std::move(total.counts);
    return out;
}

}  // namespace omcache
