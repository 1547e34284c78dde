#include "omcache/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "omcache/constants.h"
#include "omcache/design.h"
#include "omcache/dual_rail.h"
#include "omcache/errors.h"
#include "omcache/ghz.h"
#include "omcache/herald.h"
#include "omcache/multiplex.h"
#include "omcache/om_dynamics.h"

#ifndef OMCACHE_VERSION
#define OMCACHE_VERSION "0.0.0"
#endif

namespace omcache::experiments {

const char *version() {
    return OMCACHE_VERSION;
}

std::string cell(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string cell(long v) {
    return std::to_string(v);
}

std::string cell(int v) {
    return std::to_string(v);
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("row width does not match the column count");
    }
    rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream &os) const {
    for (size_t i = 0; i < columns.size(); i++) {
        os << (i ? "," : "") << columns[i].name;
    }
    os << '\n';
    for (const auto &r : rows) {
        for (size_t i = 0; i < r.size(); i++) {
            os << (i ? "," : "") << r[i];
        }
        os << '\n';
    }
}

namespace {

std::vector<double> log_space(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; i++) {
        v.push_back(lo * std::pow(hi / lo, n > 1 ? double(i) / (n - 1) : 0.0));
    }
    return v;
}

Result cool(const RunContext &ctx) {
    const auto &c = ctx.config;
    DrivePulse pulse = c.drive("cool");
    double n_star = 1 / c.schedule.F_init - 1;
    std::vector<double> starts;
    if (c.system.n_th > 0) {
        starts.push_back(c.system.n_th);
    }
    if (c.schedule.residual > 0) {
        starts.push_back(c.schedule.residual);
    }
    Result r;
    r.table.columns = {
        {"n_init", "phonons", "phonon number before the pulse"},
        {"time_ns", "ns", "time from the pulse start"},
        {"n_ph_moments", "phonons", "phonon number, second-moment model"},
        {"n_ph_rate_equation", "phonons", "phonon number, rate-equation model"},
    };
    nlohmann::json durations = nlohmann::json::array();
    double span = pulse.window() * 1.5;
    std::vector<double> times;
    for (int i = 1; i <= 150; i++) {
        times.push_back(span * i / 150);
    }
    for (double n0 : starts) {
        auto m = cooling_trajectory(c.system, pulse, n0, CoolingModel::moments).at(times);
        auto q = cooling_trajectory(c.system, pulse, n0, CoolingModel::rate_equation).at(times);
        r.table.add_row({cell(n0), cell(0.0), cell(n0), cell(n0)});
        for (size_t i = 0; i < times.size(); i++) {
            r.table.add_row({cell(n0), cell(times[i] * 1e9), cell(m[i]), cell(q[i])});
        }
        nlohmann::json d{{"n_init", n0}, {"n_target", n_star}, {"power_w", pulse.power}};
        for (auto [model, label] : {std::pair{CoolingModel::moments, "duration_ns_moments"},
                                    std::pair{CoolingModel::rate_equation, "duration_ns_rate_equation"}}) {
            try {
                DurationOptions o;
                o.model = model;
                d[label] = 1e9 * solve_pulse_duration(c.system, pulse.power, DurationTarget::population(n_star, n0), o);
            } catch (const Unreachable &) {
                d[label] = nullptr;
            }
        }
        durations.push_back(d);
    }
    r.summary["durations"] = durations;
    r.summary["Gamma_opt_over_2pi_hz"] =
        rad_to_hz(optical_damping(c.system, pump_photon_number(c.system, pulse.power)).Gamma_opt);
    r.summary["steady_state_n_ph"] = cooled_population(c.system, pump_photon_number(c.system, pulse.power));
    return r;
}

Result herald_tradeoff(const RunContext &ctx) {
    const auto &c = ctx.config;
    std::set<double> etas{0.9, c.herald.eta_d};
    Result r;
    r.table.columns = {
        {"eta_d", "1", "detector efficiency"},
        {"p1", "1", "single-pair probability per squeeze"},
        {"p_h_sp", "1", "herald probability per cycle"},
        {"F_exact", "1", "heralded single-phonon fidelity, exact Bayes form"},
        {"F_simplified", "1", "heralded fidelity, first-order form"},
        {"dark_count_dominated", "bool", "1 when dark counts dominate the infidelity"},
    };
    for (double eta_d : etas) {
        HeraldModel h = c.herald;
        h.eta_d = eta_d;
        for (double p1 : log_space(1e-5, 0.2, 41)) {
            HeraldResult hr = sp_herald_fidelity(p1, h);
            r.table.add_row({cell(eta_d), cell(p1), cell(hr.probability), cell(hr.fidelity),
                             cell(hr.fidelity_simplified), cell(hr.dark_count_dominated ? 1 : 0)});
        }
    }
    return r;
}

Result retrieval(const RunContext &ctx) {
    const auto &c = ctx.config;
    DrivePulse base = c.drive("retrieve");
    std::set<double> powers{0.25e-3, 0.5e-3, 1e-3, base.power};
    Result r;
    r.table.columns = {
        {"power_mW", "mW", "peak red-drive power"},
        {"duration_ns", "ns", "pulse full width at half maximum"},
        {"eta_re", "1", "retrieval efficiency into the output waveguide"},
        {"p_re", "1", "retrieval probability"},
        {"eta_re_bound", "1", "long-time limit eta_ex C/(C+1)"},
    };
    nlohmann::json solved = nlohmann::json::array();
    for (double P : powers) {
        double bound = retrieval_efficiency_bound(c.system, P);
        try {
            for (double T : log_space(0.1 * base.duration, 3 * base.duration, 30)) {
                DrivePulse p = base;
                p.power = P;
                p.duration = T;
                r.table.add_row({cell(P * 1e3), cell(T * 1e9), cell(retrieval_efficiency(c.system, p)),
                                 cell(retrieval_probability(c.system, p)), cell(bound)});
            }
            nlohmann::json s{{"power_mW", P * 1e3}, {"eta_re_target", c.schedule.eta_re}};
            try {
                s["duration_ns"] =
                    1e9 * solve_pulse_duration(c.system, P, DurationTarget::efficiency(c.schedule.eta_re));
            } catch (const Unreachable &) {
                s["duration_ns"] = nullptr;
            }
            solved.push_back(s);
        } catch (const StrongCouplingRegime &e) {
            solved.push_back({{"power_mW", P * 1e3}, {"skipped", e.what()}});
        }
    }
    r.summary["durations_for_target"] = solved;
    return r;
}

Result schedule(const RunContext &ctx) {
    const auto &c = ctx.config;
    std::set<int> Ns{1, 2, 10, 100, 1000, c.schedule.N};
    Result r;
    r.table.columns = {
        {"N", "count", "sources prepared in parallel"},
        {"p_hsp", "1", "herald probability per cycle"},
        {"M_bar_cycles", "cycles", "expected cycle of the last herald"},
        {"m_bar_cycles", "cycles", "expected cycle of one herald"},
        {"F_idle", "1", "idling fidelity"},
        {"mc_M_bar_cycles", "cycles", "sampled mean of the last herald cycle"},
        {"mc_M_bar_se_cycles", "cycles", "standard error of the sampled mean"},
    };
    uint64_t k = 0;
    for (int N : Ns) {
        for (double p : {0.01, 0.1, 0.5}) {
            ScheduleParams s{N, p, c.schedule.T_h, c.system.Gamma, c.system.n_th};
            MaxCycle m = expected_max_cycle(s);
            IdlingResult idle = idling_fidelity(s);
            ScheduleSample mc = monte_carlo_schedule(s, 20000, ctx.seed * 1000003ULL + k++);
            r.table.add_row({cell(N), cell(p), cell(m.M_bar), cell(m.m_bar), cell(idle.F_idle), cell(mc.mean_M),
                             cell(mc.se_M)});
        }
    }
    return r;
}

Result total_fidelity_sweep(const RunContext &ctx) {
    const auto &c = ctx.config;
    std::vector<double> temps = ctx.bath_temperature ? std::vector<double>{*ctx.bath_temperature}
                                                     : std::vector<double>{0.04, 0.1, 0.5, 1.0, 2.0};
    Result r;
    r.table.columns = {
        {"Tb_K", "K", "bath temperature"},
        {"n_th", "phonons", "thermal occupation"},
        {"eta_d", "1", "detector efficiency"},
        {"p1_opt", "1", "pair probability maximizing F_tot"},
        {"p_hsp", "1", "herald probability at the optimum"},
        {"F_hsp", "1", "heralding fidelity"},
        {"F_idle", "1", "idling fidelity"},
        {"F_init", "1", "initialization fidelity (fixed)"},
        {"eta_re", "1", "retrieval efficiency (fixed)"},
        {"F_tot", "1", "total single-photon fidelity"},
    };
    double best = 0;
    for (double Tb : temps) {
        double n_th = thermal_occupation(c.system.Omega, Tb);
        for (int i = 0; i <= 10; i++) {
            double eta_d = 0.5 + 0.05 * i;
            design::FixedBudgetParams p;
            p.F_init = c.schedule.F_init;
            p.eta_re = c.schedule.eta_re;
            p.T_h = c.schedule.T_h;
            p.N = c.schedule.N;
            p.Gamma = c.system.Gamma;
            p.n_th = n_th;
            p.herald = c.herald;
            p.herald.eta_d = eta_d;
            auto o = design::optimize_p1(p);
            best = std::max(best, o.budget.F_tot);
            r.table.add_row({cell(Tb), cell(n_th), cell(eta_d), cell(o.p1), cell(o.p_hsp), cell(o.budget.F_hsp),
                             cell(o.budget.F_idle), cell(o.budget.F_init), cell(o.budget.eta_re),
                             cell(o.budget.F_tot)});
        }
    }
    r.summary["max_F_tot"] = best;
    return r;
}

Result min_g0(const RunContext &ctx) {
    const auto &c = ctx.config;
    design::GivenParams g;
    g.eta_d = c.herald.eta_d;
    g.n_th = c.system.n_th;
    g.N = c.schedule.N;
    auto m = design::min_g0(g);
    const auto &b = m.optimum.best;
    Result r;
    r.table.columns = {
        {"eta_d", "1", "detector efficiency"},
        {"n_th", "phonons", "thermal occupation"},
        {"N", "count", "sources prepared in parallel"},
        {"min_g0_over_2pi_Hz", "Hz", "smallest coupling reaching the target"},
        {"g_lower_over_2pi_Hz", "Hz", "largest bracketed coupling missing the target"},
        {"F_tot", "1", "maximized total fidelity at min_g0"},
        {"F_init", "1", "initialization fidelity"},
        {"F_hsp", "1", "heralding fidelity"},
        {"F_idle", "1", "idling fidelity"},
        {"eta_re", "1", "retrieval efficiency"},
        {"kappa_ex_over_2pi_Hz", "Hz", "optimal external coupling"},
        {"p1", "1", "optimal pair probability"},
        {"T_init_ns", "ns", "optimal re-initialization drive"},
        {"T_squeeze_ns", "ns", "squeeze drive duration"},
        {"T_h_ns", "ns", "heralding cycle"},
    };
    r.table.add_row({cell(g.eta_d), cell(g.n_th), cell(g.N), cell(rad_to_hz(m.g0)), cell(rad_to_hz(m.g_lower)),
                     cell(b.budget.F_tot), cell(b.budget.F_init), cell(b.budget.F_hsp), cell(b.budget.F_idle),
                     cell(b.budget.eta_re), cell(rad_to_hz(m.optimum.argmax.kappa_ex)), cell(m.optimum.argmax.p1),
                     cell(m.optimum.argmax.T_init * 1e9), cell(b.T_squeeze * 1e9), cell(b.T_h * 1e9)});
    r.summary["given"] = {{"eta_d", g.eta_d}, {"n_th", g.n_th}, {"N", g.N}, {"max_power_w", g.max_power},
                          {"kappa_int_over_2pi_hz", rad_to_hz(g.kappa_int)},
                          {"Gamma_over_2pi_hz", rad_to_hz(g.Gamma)}, {"dark_rate_cps", g.dark_rate}};
    r.summary["min_g0_over_2pi_hz"] = rad_to_hz(m.g0);
    r.summary["free_at_opt"] = {{"kappa_ex_over_2pi_hz", rad_to_hz(m.optimum.argmax.kappa_ex)},
                                {"p1", m.optimum.argmax.p1},
                                {"T_init_s", m.optimum.argmax.T_init}};
    r.summary["budget"] = {{"F_tot", b.budget.F_tot}, {"F_init", b.budget.F_init}, {"F_hsp", b.budget.F_hsp},
                           {"F_idle", b.budget.F_idle}, {"eta_re", b.budget.eta_re}};
    r.summary["diagnostics"] = {{"bisection_steps", m.iterations},
                                {"grid_points", m.optimum.grid_points},
                                {"evaluations", m.optimum.evaluations},
                                {"near_optimal_points", m.optimum.near_optimal_count}};
    return r;
}

Result lifetimes(const RunContext &ctx) {
    (void)ctx;
    Result r;
    r.table.columns = {
        {"n_th", "phonons", "bath occupation"},
        {"Gamma_tau_leak", "1/Gamma", "leakage lifetime, closed form"},
        {"Gamma_tau_leak_numeric", "1/Gamma", "leakage lifetime from the master equation"},
        {"Gamma_tau_X", "1/Gamma", "bit-flip lifetime"},
        {"Gamma_tau_Z", "1/Gamma", "phase-flip lifetime"},
        {"n_th_Gamma_tau_X", "1/Gamma", "n_th times the bit-flip lifetime"},
    };
    for (double n : {0.0, 0.01, 0.03, 0.1, 0.3, 1.0}) {
        DualRailRates d = dual_rail_lifetimes(1.0, n);
        r.table.add_row({cell(n), cell(d.tau_leak), cell(d.tau_leak_numeric), cell(d.tau_X), cell(d.tau_Z),
                         cell(n * d.tau_X)});
    }
    return r;
}

Result bell(const RunContext &ctx) {
    const auto &c = ctx.config;
    HeraldModel h = HeraldModel::from_eta(c.herald.eta(), c.herald.p_d());
    ghz::Network net(2);
    Result r;
    r.table.columns = {
        {"p_re", "1", "retrieval probability per mode"},
        {"P_formula", "1", "herald probability, closed form"},
        {"F_formula", "1", "herald fidelity, closed form"},
        {"P_oracle", "1", "herald probability, explicit optical model"},
        {"F_oracle", "1", "herald fidelity, explicit optical model"},
        {"F_mc", "1", "sampled herald fidelity"},
        {"F_mc_se", "1", "standard error of F_mc"},
    };
    for (int i = 1; i <= 19; i++) {
        double p = 0.05 * i;
        auto f = ghz_herald(2, p, h);
        auto o = ghz::single_shot_optical(2, p, h);
        auto s = ghz::sample_single_shot(o, 200000, ctx.seed * 7919ULL + static_cast<uint64_t>(i));
        r.table.add_row({cell(p), cell(f.probability), cell(f.fidelity), cell(o.p_complete), cell(o.fidelity),
                         cell(s.fidelity), cell(s.fidelity_se)});
    }
    auto ideal = ghz::single_shot(net, 0.5, HeraldModel::ideal());
    r.summary["ideal_p_complete_at_half"] = ideal.p_complete;
    r.summary["ideal_p_wrong_basis_at_half"] = ideal.p_wrong_basis;
    return r;
}

std::string pathway_label(const std::vector<int> &d) {
    std::string s;
    for (size_t i = 0; i < d.size(); i++) {
        s += (i ? "+" : "") + std::to_string(d[i]);
    }
    return s;
}

Result bleed(const RunContext &ctx) {
    const auto &c = ctx.config;
    auto opt = ghz::optimize_bleed(2, 2, HeraldModel::ideal());
    HeraldModel h = HeraldModel::from_eta(c.herald.eta(), c.herald.p_d());
    auto res = ghz::bleed_success_probability(2, opt.schedule, h);
    Result r;
    r.table.columns = {
        {"pathway", "detections", "detections per iteration, '+' separated"},
        {"probability", "1", "pathway probability"},
        {"share", "1", "fraction of all successes"},
        {"fidelity_exact", "1", "conditional Bell-state fidelity, enumerated"},
        {"fidelity_formula", "1", "closed form at the effective retrieval"},
        {"p_effective", "1", "accumulated retrieval probability"},
    };
    for (const auto &pw : res.pathways) {
        r.table.add_row({pathway_label(pw.detections), cell(pw.probability), cell(pw.probability / res.success),
                         cell(pw.fidelity), cell(pw.fidelity_formula), cell(pw.p_effective)});
    }
    r.summary["ideal_success"] = opt.result.success;
    r.summary["schedule"] = opt.schedule.p;
    r.summary["success"] = res.success;
    r.summary["average_fidelity"] = res.fidelity;
    r.summary["eta"] = h.eta();
    return r;
}

Result asymptotic(const RunContext &ctx) {
    (void)ctx;
    Result r;
    r.table.columns = {
        {"n", "qubits", "GHZ size"},
        {"p_asym", "1", "success for vanishing per-iteration retrieval"},
        {"fit", "1", "0.759/2.24^(n-1)"},
        {"single_shot", "1", "single-iteration bound 0.5/4^(n-1)"},
        {"p_exact_limit", "1", "same limit keeping the no-detection back-action (n <= 5)"},
    };
    for (int n = 2; n <= 6; n++) {
        auto a = ghz::asymptotic_success(n);
        double exact = n <= 5 ? ghz::asymptotic_success(n, ghz::AsymptoticMethod::exact_limit).success : NAN;
        r.table.add_row({cell(n), cell(a.success), cell(a.fit), cell(0.5 / std::pow(4.0, n - 1)), cell(exact)});
    }
    return r;
}

Result rounds_to_ghz(const RunContext &ctx) {
    (void)ctx;
    Result r;
    r.table.columns = {
        {"n", "qubits", "GHZ size"},
        {"p_hsp", "1", "single-phonon herald probability per cycle"},
        {"rounds_bleeding", "rounds", "expected rounds with optimized bleeding"},
        {"rounds_single_shot", "rounds", "expected rounds with single-shot retrieval"},
        {"success_per_attempt", "1", "bleeding success before a reset"},
        {"iterations_per_attempt", "rounds", "bleeding iterations per attempt"},
        {"p_re_0", "1", "retrieval with no detections yet"},
        {"p_re_1", "1", "retrieval after one detection"},
        {"p_re_2", "1", "retrieval after two detections"},
    };
    for (int n : {2, 3}) {
        for (double ph : log_space(0.01, 1.0, 20)) {
            auto a = ghz::optimize_rounds(n, ph);
            auto s = ghz::single_shot_rounds(n, ph);
            auto level = [&](size_t i) {
                return i < a.p_by_detections.size() ? cell(a.p_by_detections[i]) : std::string("nan");
            };
            r.table.add_row({cell(n), cell(ph), cell(a.expected_rounds), cell(s.expected_rounds), cell(a.success),
                             cell(a.iterations), level(0), level(1), level(2)});
        }
    }
    return r;
}

size_t edit_distance(const std::string &a, const std::string &b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); j++) {
        prev[j] = j;
    }
    for (size_t i = 1; i <= a.size(); i++) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); j++) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

const std::vector<Experiment> &registry() {
    static const std::vector<Experiment> list = {
        {"cool", "phonon number during the cooling pulse and the durations reaching F_init", cool},
        {"herald-tradeoff", "single-phonon herald probability and fidelity versus p1", herald_tradeoff},
        {"retrieval", "retrieval efficiency and probability versus pulse duration and power", retrieval},
        {"schedule", "expected last-herald cycle and idling fidelity, closed form and sampled", schedule},
        {"total-fidelity", "F_tot maximized over p1 versus detector efficiency and bath temperature",
         total_fidelity_sweep},
        {"min-g0", "minimum coupling reaching 99% total fidelity", min_g0},
        {"lifetimes", "dual-rail leakage, bit-flip and phase-flip lifetimes versus n_th", lifetimes},
        {"bell", "two-qubit herald probability and fidelity, closed form against the optical model", bell},
        {"bleed", "two-iteration Bell heralding with an optimized retrieval schedule", bleed},
        {"asymptotic", "GHZ success for vanishing per-iteration retrieval", asymptotic},
        {"rounds-to-ghz", "expected rounds to a GHZ state, bleeding against single-shot", rounds_to_ghz},
    };
    return list;
}

const Experiment *find(const std::string &name) {
    for (const auto &e : registry()) {
        if (e.name == name) {
            return &e;
        }
    }
    return nullptr;
}

std::string suggest(const std::string &name) {
    std::string best;
    size_t d = std::string::npos;
    for (const auto &e : registry()) {
        size_t k = edit_distance(name, e.name);
        if (k < d) {
            d = k;
            best = e.name;
        }
    }
    return best;
}

namespace {

std::string number_text(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

int run(const RunRequest &req, std::ostream &out, std::ostream &err) {
    const Experiment *exp = find(req.experiment);
    if (!exp) {
        err << "unknown experiment '" << req.experiment << "'; did you mean '" << suggest(req.experiment) << "'?\n";
        return kValidation;
    }
    RunContext ctx;
    std::vector<std::string> overrides = req.overrides;
    if (req.bath_temperature) {
        overrides.push_back("system.bath_temperature_k=" + number_text(*req.bath_temperature));
    }
    if (req.n_th) {
        overrides.push_back("system.n_th=" + number_text(*req.n_th));
    }
    if (req.eta_d) {
        overrides.push_back("herald.eta_d=" + number_text(*req.eta_d));
    }
    if (req.N) {
        overrides.push_back("schedule.N=" + std::to_string(*req.N));
    }
    try {
        ctx.config = load_preset(req.preset);
        for (const auto &o : overrides) {
            apply_override(ctx.config, o);
        }
    } catch (const ConfigError &e) {
        err << "configuration error: " << e.what() << '\n';
        return kValidation;
    }
    ctx.preset = req.preset;
    ctx.overrides = overrides;
    ctx.seed = req.seed;
    ctx.bath_temperature = req.bath_temperature;

    auto t0 = std::chrono::steady_clock::now();
    Result result;
    try {
        result = exp->run(ctx);
    } catch (const Infeasible &e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const NoCrossing &e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const Unreachable &e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ConfigError &e) {
        err << "configuration error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument &e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kValidation;
    } catch (const StrongCouplingRegime &e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kValidation;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(req.out_dir, ec);
    fs::path csv = fs::path(req.out_dir) / (exp->name + ".csv");
    fs::path meta = fs::path(req.out_dir) / (exp->name + ".meta.json");
    {
        std::ofstream f(csv);
        if (!f) {
            err << "cannot write " << csv.string() << '\n';
            return kValidation;
        }
        result.table.write_csv(f);
    }
    nlohmann::json m;
    m["experiment"] = exp->name;
    m["description"] = exp->description;
    m["preset"] = req.preset;
    m["overrides"] = overrides;
    m["parameters"] = to_json(ctx.config);
    m["version"] = version();
    m["seed"] = req.seed;
    m["wall_time_s"] = wall;
    m["columns"] = nlohmann::json::array();
    for (const auto &c : result.table.columns) {
        m["columns"].push_back({{"name", c.name}, {"unit", c.unit}, {"description", c.description}});
    }
    m["summary"] = result.summary;
    {
        std::ofstream f(meta);
        if (!f) {
            err << "cannot write " << meta.string() << '\n';
            return kValidation;
        }
        f << m.dump(2) << '\n';
    }
    nlohmann::json brief{{"experiment", exp->name}, {"csv", csv.string()}, {"rows", result.table.rows.size()}};
    if (!result.summary.empty()) {
        brief["summary"] = result.summary;
    }
    out << brief.dump(2) << '\n';
    return kOk;
}

}  // namespace omcache::experiments
