#include "omcache/design.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "omcache/errors.h"
#include "omcache/herald.h"
#include "omcache/om_dynamics.h"

namespace omcache::design {

void GivenParams::validate() const {
    if (!(g0 > 0 && kappa_int > 0 && Gamma > 0 && omega0 > 0 && Omega > 0 && max_power > 0)) {
        throw std::invalid_argument("given rates and power must be positive");
    }
    if (!(eta_d > 0 && eta_d <= 1)) {
        throw std::invalid_argument("eta_d must lie in (0, 1]");
    }
    if (!(n_th >= 0) || N < 1 || dark_rate < 0 || feedback < 0 || rise_fall_periods < 0) {
        throw std::invalid_argument("invalid n_th, N, dark rate or cycle overhead");
    }
}

namespace {

// Everything that depends on kappa_ex alone.
struct KappaStage {
    bool feasible = true;
    std::string violation;
    SystemParams sys;
    double kappa = 0;
    double floor = 0;  // optical rise/fall time 2 pi / kappa
    double drive_power = 0;
    PumpAmplitude alpha_r;
    PumpAmplitude alpha_b_max;
    double squeeze_power_max = 0;
    double C = 0;
    double eta_re = 0;
    Eigen::Matrix4d generator;  // affine cooling dynamics of (n_a, n_b, Y, 1)
};

KappaStage kappa_stage(const GivenParams &g, double kappa_ex) {
    KappaStage k;
    k.sys.omega0 = g.omega0;
    k.sys.Omega = g.Omega;
    k.sys.kappa_int = g.kappa_int;
    k.sys.kappa_ex = kappa_ex;
    k.sys.Gamma = g.Gamma;
    k.sys.g0 = g.g0;
    k.sys.gh = g.g0;
    k.sys.n_th = g.n_th;
    k.kappa = k.sys.kappa();
    k.floor = kTwoPi / k.kappa;
    try {
        k.sys.validate();
    } catch (const std::invalid_argument &e) {
        k.feasible = false;
        k.violation = e.what();
        return k;
    }
    // Drives stay at or below 1 mW and inside the weak-coupling region.
    double p_wc = 0.999 * strong_coupling_power(k.sys);
    k.drive_power = std::min(g.max_power, p_wc);
    k.squeeze_power_max = k.drive_power;
    k.alpha_r = pump_photon_number(k.sys, k.drive_power);
    k.alpha_b_max = k.alpha_r;
    k.C = k.sys.C0() * k.alpha_r.alpha_sq;
    k.eta_re = k.sys.eta_ex() * k.C / (k.C + 1);

    double G = g.g0 * k.alpha_r.alpha;
    double kap = k.kappa, Gam = g.Gamma;
    k.generator.setZero();
    k.generator(0, 0) = -kap;
    k.generator(0, 2) = 2 * G;
    k.generator(1, 1) = -Gam;
    k.generator(1, 2) = -2 * G;
    k.generator(1, 3) = Gam * g.n_th;
    k.generator(2, 0) = -G;
    k.generator(2, 1) = G;
    k.generator(2, 2) = -0.5 * (kap + Gam);
    return k;
}

// Everything that depends on (kappa_ex, p1).
struct SqueezeStage {
    bool feasible = true;
    std::string violation;
    double T_sq = 0;
    double power = 0;
    double p_hsp = 0;
    double F_hsp = 0;
    double p_d = 0;
    double idle_cycles = 0;
};

double squeeze_at(const SystemParams &sys, double alpha, double t) {
    PumpAmplitude a;
    a.alpha = alpha;
    a.alpha_sq = alpha * alpha;
    return squeeze_population(sys, a, t);
}

SqueezeStage squeeze_stage(const GivenParams &g, const KappaStage &k, double p1) {
    SqueezeStage s;
    if (!(p1 > 0 && p1 < 0.25)) {
        s.feasible = false;
        s.violation = "p1 outside (0, 0.25)";
        return s;
    }
    double n_bar = n_bar_from_p1(p1);
    double a_max = k.alpha_b_max.alpha;
    if (squeeze_at(k.sys, a_max, k.floor) >= n_bar) {
        // Shortest allowed pulse already suffices: lower the blue power instead.
        double lo = 0, hi = a_max;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * a_max; it++) {
            double mid = 0.5 * (lo + hi);
            (squeeze_at(k.sys, mid, k.floor) < n_bar ? lo : hi) = mid;
        }
        s.T_sq = k.floor;
        s.power = k.squeeze_power_max * (hi / a_max) * (hi / a_max);
    } else {
        double lo = k.floor, hi = 2 * k.floor;
        while (squeeze_at(k.sys, a_max, hi) < n_bar) {
            lo = hi;
            hi *= 2;
            if (hi > 1e-3) {
                s.feasible = false;
                s.violation = "squeezing cannot reach p1 within 1 ms";
                return s;
            }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; it++) {
            double mid = 0.5 * (lo + hi);
            (squeeze_at(k.sys, a_max, mid) < n_bar ? lo : hi) = mid;
        }
        s.T_sq = hi;
        s.power = k.squeeze_power_max;
    }
    HeraldModel h{g.eta_d, k.sys.eta_ex(), g.dark_rate, s.T_sq + k.floor};
    s.p_d = h.p_d();
    if (s.p_d >= 1e-2) {
        s.feasible = false;
        s.violation = "dark-count probability per window too large";
        return s;
    }
    HeraldResult hr = sp_herald_fidelity(p1, h);
    s.p_hsp = hr.probability;
    s.F_hsp = hr.fidelity;
    MaxCycle m = expected_max_cycle(ScheduleParams{g.N, s.p_hsp, 1.0, g.Gamma, g.n_th});
    s.idle_cycles = std::max(0.0, m.M_bar - m.m_bar);
    return s;
}

struct CoolingMap {
    double r = 1;  // fraction of phonons left after T_init
    double c = 0;  // phonons added from an empty start
};

CoolingMap cooling_map(const KappaStage &k, double T_init) {
    Eigen::Matrix4d phi = (k.generator * T_init).exp();
    return {phi(1, 1), phi(1, 3)};
}

DesignPoint combine(const GivenParams &g, const KappaStage &k, const SqueezeStage &s, const CoolingMap &cm, double T_init) {
    DesignPoint d;
    d.T_squeeze = s.T_sq;
    d.p_hsp = s.p_hsp;
    d.p_d = s.p_d;
    d.squeeze_power = s.power;
    d.drive_power = k.drive_power;
    d.C = k.C;
    d.T_h = s.T_sq + T_init + g.rise_fall_periods * k.floor + g.feedback;
    if (T_init < k.floor) {
        d.violation = "T_init shorter than the optical rise/fall time";
        return d;
    }
    if (!(cm.r < 1)) {
        d.violation = "re-initialization does not cool";
        return d;
    }
    double heat = (1 - s.p_hsp) * no_herald_residual(s.F_hsp) + g.n_th * (-std::expm1(-g.Gamma * d.T_h));
    d.n_init = (cm.r * heat + cm.c) / (1 - cm.r);
    double F_init = 1 / (1 + d.n_init);
    double rate = (3 * g.n_th + 1) * g.Gamma;
    double F_idle = std::exp(-rate * s.idle_cycles * d.T_h);
    d.budget = total_fidelity(F_init, s.F_hsp, F_idle, k.eta_re);
    d.feasible = true;
    return d;
}

}  // namespace

DesignPoint evaluate_total_fidelity(const GivenParams &given, const FreeParams &free) {
    given.validate();
    if (!(free.kappa_ex > 0 && free.T_init > 0)) {
        throw std::invalid_argument("kappa_ex and T_init must be positive");
    }
    KappaStage k = kappa_stage(given, free.kappa_ex);
    DesignPoint d;
    d.budget.F_tot = 0;
    if (!k.feasible) {
        d.violation = k.violation;
        return d;
    }
    SqueezeStage s = squeeze_stage(given, k, free.p1);
    if (!s.feasible) {
        d.violation = s.violation;
        return d;
    }
    d = combine(given, k, s, cooling_map(k, free.T_init), free.T_init);
    if (!d.feasible) {
        d.budget.F_tot = 0;
    }
    return d;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        v[static_cast<size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
    }
    return v;
}

struct Candidate {
    double F;
    FreeParams x;
};

// Higher fidelity first; ties go to smaller kappa_ex, then smaller p1, then smaller T_init.
bool better(const Candidate &a, const Candidate &b) {
    if (a.F != b.F) {
        return a.F > b.F;
    }
    if (a.x.kappa_ex != b.x.kappa_ex) {
        return a.x.kappa_ex < b.x.kappa_ex;
    }
    if (a.x.p1 != b.x.p1) {
        return a.x.p1 < b.x.p1;
    }
    return a.x.T_init < b.x.T_init;
}

using Vec3 = std::array<double, 3>;

// Plain Nelder-Mead minimization.
Vec3 nelder_mead(const std::function<double(const Vec3 &)> &f, Vec3 x0, const Vec3 &step, int max_iter, int &iters) {
    std::array<Vec3, 4> p;
    std::array<double, 4> fv;
    p[0] = x0;
    for (int i = 0; i < 3; i++) {
        p[static_cast<size_t>(i + 1)] = x0;
        p[static_cast<size_t>(i + 1)][static_cast<size_t>(i)] += step[static_cast<size_t>(i)];
    }
    for (size_t i = 0; i < 4; i++) {
        fv[i] = f(p[i]);
    }
    auto lerp = [](const Vec3 &a, const Vec3 &b, double t) {
        Vec3 r;
        for (size_t i = 0; i < 3; i++) {
            r[i] = a[i] + t * (b[i] - a[i]);
        }
        return r;
    };
    iters = 0;
    for (; iters < max_iter; iters++) {
        std::array<size_t, 4> o{0, 1, 2, 3};
        std::sort(o.begin(), o.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::array<Vec3, 4> q;
        std::array<double, 4> fq;
        for (size_t i = 0; i < 4; i++) {
            q[i] = p[o[i]];
            fq[i] = fv[o[i]];
        }
        p = q;
        fv = fq;
        if (std::abs(fv[3] - fv[0]) < 1e-13) {
            break;
        }
        Vec3 c{0, 0, 0};
        for (size_t i = 0; i < 3; i++) {
            for (size_t j = 0; j < 3; j++) {
                c[j] += p[i][j] / 3;
            }
        }
        Vec3 xr = lerp(c, p[3], -1);
        double fr = f(xr);
        if (fr < fv[0]) {
            Vec3 xe = lerp(c, p[3], -2);
            double fe = f(xe);
            if (fe < fr) {
                p[3] = xe;
                fv[3] = fe;
            } else {
                p[3] = xr;
                fv[3] = fr;
            }
        } else if (fr < fv[2]) {
            p[3] = xr;
            fv[3] = fr;
        } else {
            Vec3 xc = fr < fv[3] ? lerp(c, p[3], -0.5) : lerp(c, p[3], 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[3])) {
                p[3] = xc;
                fv[3] = fc;
            } else {
                for (size_t i = 1; i < 4; i++) {
                    p[i] = lerp(p[0], p[i], 0.5);
                    fv[i] = f(p[i]);
                }
            }
        }
    }
    size_t best = static_cast<size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return p[best];
}

}  // namespace

OptimizerResult maximize_fidelity(const GivenParams &given, const SearchBounds &b) {
    given.validate();
    auto kg = log_grid(b.kappa_ex_min, b.kappa_ex_max, b.points_per_decade);
    auto pg = log_grid(b.p1_min, b.p1_max, b.points_per_decade);
    auto tg = log_grid(b.T_init_min, b.T_init_max, b.points_per_decade);
    OptimizerResult res;
    std::vector<Candidate> all;
    for (double kex : kg) {
        KappaStage k = kappa_stage(given, kex);
        res.grid_points += pg.size() * tg.size();
        if (!k.feasible) {
            continue;
        }
        std::vector<CoolingMap> maps;
        for (double T : tg) {
            maps.push_back(cooling_map(k, T));
        }
        for (double p1 : pg) {
            SqueezeStage s = squeeze_stage(given, k, p1);
            if (!s.feasible) {
                continue;
            }
            for (size_t i = 0; i < tg.size(); i++) {
                DesignPoint d = combine(given, k, s, maps[i], tg[i]);
                res.evaluations++;
                if (d.feasible) {
                    res.feasible_points++;
                    all.push_back({d.budget.F_tot, {kex, p1, tg[i]}});
                }
            }
        }
    }
    if (all.empty()) {
        throw Infeasible("no operating point satisfies the constraints");
    }
    std::sort(all.begin(), all.end(), better);

    auto objective = [&](const Vec3 &v) {
        FreeParams x{std::exp(v[0]), std::exp(v[1]), std::exp(v[2])};
        if (x.kappa_ex < b.kappa_ex_min || x.kappa_ex > b.kappa_ex_max || x.p1 < b.p1_min || x.p1 > b.p1_max ||
            x.T_init < b.T_init_min || x.T_init > b.T_init_max) {
            return 1.0;
        }
        res.evaluations++;
        DesignPoint d = evaluate_total_fidelity(given, x);
        return d.feasible ? -d.budget.F_tot : 1.0;
    };
    double step = std::log(10.0) / b.points_per_decade;
    Candidate best = all.front();
    size_t starts = std::min<size_t>(static_cast<size_t>(b.refine_starts), all.size());
    for (size_t i = 0; i < starts; i++) {
        const auto &c = all[i];
        int iters = 0;
        Vec3 v = nelder_mead(objective, {std::log(c.x.kappa_ex), std::log(c.x.p1), std::log(c.x.T_init)},
                             {step, step, step}, 600, iters);
        res.refine_iterations.push_back(iters);
        double F = -objective(v);
        Candidate r{F, {std::exp(v[0]), std::exp(v[1]), std::exp(v[2])}};
        if (better(r, best)) {
            best = r;
        }
    }
    res.argmax = best.x;
    res.best = evaluate_total_fidelity(given, best.x);

    double thr = res.best.budget.F_tot - 1e-4;
    bool first = true;
    for (const auto &c : all) {
        if (c.F < thr) {
            break;
        }
        res.near_optimal_count++;
        if (first) {
            res.near_optimal_min = res.near_optimal_max = c.x;
            first = false;
        }
        res.near_optimal_min.kappa_ex = std::min(res.near_optimal_min.kappa_ex, c.x.kappa_ex);
        res.near_optimal_min.p1 = std::min(res.near_optimal_min.p1, c.x.p1);
        res.near_optimal_min.T_init = std::min(res.near_optimal_min.T_init, c.x.T_init);
        res.near_optimal_max.kappa_ex = std::max(res.near_optimal_max.kappa_ex, c.x.kappa_ex);
        res.near_optimal_max.p1 = std::max(res.near_optimal_max.p1, c.x.p1);
        res.near_optimal_max.T_init = std::max(res.near_optimal_max.T_init, c.x.T_init);
    }
    return res;
}

MinG0Result min_g0(GivenParams given, double target, const SearchBounds &bounds, double g_min, double g_max) {
    if (!(target >= 0 && target < 1)) {
        throw std::invalid_argument("target fidelity must lie in [0, 1)");
    }
    auto best_at = [&](double g0) {
        given.g0 = g0;
        try {
            return maximize_fidelity(given, bounds);
        } catch (const Infeasible &) {
            return OptimizerResult{};
        }
    };
    MinG0Result r;
    OptimizerResult hi_opt = best_at(g_max);
    if (hi_opt.best.budget.F_tot < target || !hi_opt.best.feasible) {
        throw NoCrossing("maximized F_tot stays below the target even at the upper g0 bracket");
    }
    OptimizerResult lo_opt = best_at(g_min);
    if (lo_opt.best.feasible && lo_opt.best.budget.F_tot >= target) {
        r.g0 = r.g_lower = g_min;
        r.F_at_g0 = r.F_at_lower = lo_opt.best.budget.F_tot;
        r.optimum = lo_opt;
        return r;
    }
    double lo = g_min, hi = g_max;
    double F_lo = lo_opt.best.budget.F_tot;
    while (hi / lo > 1.02) {
        double mid = std::sqrt(lo * hi);
        OptimizerResult m = best_at(mid);
        r.iterations++;
        if (m.best.feasible && m.best.budget.F_tot >= target) {
            hi = mid;
            hi_opt = m;
        } else {
            lo = mid;
            F_lo = m.best.budget.F_tot;
        }
    }
    r.g0 = hi;
    r.g_lower = lo;
    r.F_at_g0 = hi_opt.best.budget.F_tot;
    r.F_at_lower = F_lo;
    r.optimum = hi_opt;
    return r;
}

FixedBudgetPoint fixed_budget_fidelity(const FixedBudgetParams &p, double p1) {
    p.herald.validate();
    HeraldResult h = sp_herald_fidelity(p1, p.herald);
    IdlingResult idle = idling_fidelity(ScheduleParams{p.N, h.probability, p.T_h, p.Gamma, p.n_th});
    FixedBudgetPoint r;
    r.p1 = p1;
    r.p_hsp = h.probability;
    r.budget = total_fidelity(p.F_init, h.fidelity, idle.F_idle, p.eta_re);
    return r;
}

FixedBudgetPoint optimize_p1(const FixedBudgetParams &p) {
    auto grid = log_grid(1e-6, 0.24, 40);
    size_t best = 0;
    std::vector<double> F(grid.size());
    for (size_t i = 0; i < grid.size(); i++) {
        F[i] = fixed_budget_fidelity(p, grid[i]).budget.F_tot;
        if (F[i] > F[best]) {
            best = i;
        }
    }
    double a = std::log(grid[best > 0 ? best - 1 : 0]);
    double c = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    const double g = 0.61803398874989485;
    auto f = [&](double x) { return fixed_budget_fidelity(p, std::exp(x)).budget.F_tot; };
    double x1 = c - g * (c - a), x2 = a + g * (c - a);
    double f1 = f(x1), f2 = f(x2);
    while (c - a > 1e-9) {
        if (f1 > f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = f(x2);
        }
    }
    FixedBudgetPoint r = fixed_budget_fidelity(p, std::exp(0.5 * (a + c)));
    return r.budget.F_tot >= F[best] ? r : fixed_budget_fidelity(p, grid[best]);
}

}  // namespace omcache::design
