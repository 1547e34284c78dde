#include "omcache/om_dynamics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omcache/constants.h"
#include "omcache/errors.h"
#include "omcache/ode.h"

namespace omcache {

double SystemParams::C0() const {
    return 4 * g0 * g0 / (kappa() * Gamma);
}

void SystemParams::validate() const {
    if (!(omega0 > 0 && Omega > 0 && kappa_int > 0 && kappa_ex > 0 && Gamma > 0 && g0 > 0 && gh > 0)) {
        throw std::invalid_argument("all frequencies and rates must be positive");
    }
    if (!(n_th >= 0)) {
        throw std::invalid_argument("n_th must be non-negative");
    }
    if (!(Omega > kappa())) {
        throw std::invalid_argument("sideband resolution requires Omega > kappa");
    }
    if (!(Gamma < kappa())) {
        throw std::invalid_argument("acoustic loss must be well below the optical linewidth");
    }
}

double thermal_occupation(double Omega, double T_b) {
    if (T_b <= 0) {
        return 0.0;
    }
    return 1.0 / std::expm1(kHbar * Omega / (kBoltzmann * T_b));
}

double DrivePulse::window() const {
    if (shape == PulseShape::constant) {
        return duration;
    }
    return duration * (1 + 12 * ramp_fraction);
}

double DrivePulse::envelope(double t) const {
    if (shape == PulseShape::constant) {
        return (t >= 0 && t <= duration) ? 1.0 : 0.0;
    }
    double tau = ramp_fraction * duration;
    double t_on = 6 * tau;
    double t_off = t_on + duration;
    return 0.25 * (1 + std::tanh((t - t_on) / tau)) * (1 + std::tanh((t_off - t) / tau));
}

void DrivePulse::validate() const {
    if (!(power >= 0)) {
        throw std::invalid_argument("pulse power must be non-negative");
    }
    if (!(duration > 0)) {
        throw std::invalid_argument("pulse duration must be positive");
    }
    if (shape == PulseShape::tanh && !(ramp_fraction > 0 && ramp_fraction < 0.5)) {
        throw std::invalid_argument("ramp fraction must lie in (0, 0.5)");
    }
}

PumpAmplitude pump_photon_number(const SystemParams &params, double power) {
    PumpAmplitude a;
    double kappa = params.kappa();
    a.alpha_sq = 4 * params.kappa_ex / (kappa * kappa) * power / (kHbar * params.omega0);
    a.alpha = std::sqrt(a.alpha_sq);
    a.stiff_pump_valid = a.alpha >= 10 * 2 * params.g0 / kappa;
    return a;
}

PumpAmplitude pump_photon_number(const SystemParams &params, const DrivePulse &pulse) {
    PumpAmplitude a = pump_photon_number(params, pulse.power);
    a.steady_state = pulse.duration > 10 / params.kappa();
    return a;
}

PumpProfile::PumpProfile(const SystemParams &params, const DrivePulse &pulse) : pulse_(pulse) {
    pulse.validate();
    steady_alpha_ = pump_photon_number(params, pulse.power).alpha;
    double kappa = params.kappa();
    filtered_ = pulse.duration <= 10 / kappa && pulse.power > 0;
    if (!filtered_) {
        end_ = pulse.window();
        peak_alpha_ = steady_alpha_;
        return;
    }
    end_ = pulse.window() + 20 / kappa;
    double drive = std::sqrt(params.kappa_ex * pulse.power / (kHbar * params.omega0));
    auto source = [&](double t) { return drive * std::sqrt(pulse_.envelope(t)); };
    OdeRhs rhs = [&](const RealVector &x, RealVector &dx, double t) { dx[0] = -0.5 * kappa * x[0] + source(t); };
    const int samples = 4001;
    t_.resize(samples);
    for (int i = 0; i < samples; i++) {
        t_[i] = end_ * i / (samples - 1);
    }
    OdeOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12 * std::max(1.0, steady_alpha_);
    opt.max_step = end_ / (samples - 1);
    auto states = integrate_at(rhs, RealVector::Zero(1), t_, opt);
    a_.resize(samples);
    da_.resize(samples);
    for (int i = 0; i < samples; i++) {
        a_[i] = states[i][0];
        da_[i] = -0.5 * kappa * a_[i] + source(t_[i]);
        peak_alpha_ = std::max(peak_alpha_, a_[i]);
    }
}

double PumpProfile::alpha(double t) const {
    if (!filtered_) {
        return steady_alpha_ * std::sqrt(pulse_.envelope(t));
    }
    if (t <= 0) {
        return 0.0;
    }
    if (t >= end_) {
        return 0.0;
    }
    // Cubic Hermite interpolation on the uniform grid.
    double h = t_[1] - t_[0];
    auto i = std::min(static_cast<size_t>(t / h), t_.size() - 2);
    double s = (t - t_[i]) / h;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a_[i] + (s3 - 2 * s2 + s) * h * da_[i] + (-2 * s3 + 3 * s2) * a_[i + 1] +
           (s3 - s2) * h * da_[i + 1];
}

std::vector<double> PumpProfile::breakpoints() const {
    if (pulse_.shape == PulseShape::constant) {
        return {0.0, pulse_.duration};
    }
    double tau = pulse_.ramp_fraction * pulse_.duration;
    return {6 * tau, 6 * tau + pulse_.duration};
}

OpticalDamping optical_damping(const SystemParams &params, const PumpAmplitude &alpha) {
    OpticalDamping d;
    double kappa = params.kappa();
    d.Gamma_opt = 4 * params.g0 * params.g0 * alpha.alpha_sq / kappa;
    d.C0 = params.C0();
    d.C = d.C0 * alpha.alpha_sq;
    d.weak_coupling = 2 * params.g0 * alpha.alpha < kappa / 2;
    return d;
}

double cooled_population(const SystemParams &params, const PumpAmplitude &alpha) {
    return params.n_th / (params.C0() * alpha.alpha_sq + 1);
}

namespace {

// Largest step used inside a pulse so that ramps are never stepped over.
double pulse_max_step(const DrivePulse &pulse, const PumpProfile &profile, double kappa) {
    double resolve = pulse.shape == PulseShape::tanh ? pulse.ramp_fraction * pulse.duration : pulse.duration / 20;
    if (profile.filtered()) {
        resolve = std::min(resolve, 0.5 / kappa);
    }
    return resolve;
}

// Second moments of the red-detuned exchange G(t)(a^dag b + a b^dag):
// x = (n_a, n_b, Im<a^dag b>, integral of n_a).
OdeRhs exchange_rhs(const SystemParams &params, const PumpProfile &profile, double n_th) {
    double kappa = params.kappa();
    double Gamma = params.Gamma;
    double g0 = params.g0;
    return [kappa, Gamma, g0, n_th, &profile](const RealVector &x, RealVector &dx, double t) {
        double G = g0 * profile.alpha(t);
        dx[0] = 2 * G * x[2] - kappa * x[0];
        dx[1] = -2 * G * x[2] - Gamma * (x[1] - n_th);
        dx[2] = G * (x[1] - x[0]) - 0.5 * (kappa + Gamma) * x[2];
        dx[3] = x[0];
    };
}

void check_weak_retrieval(const SystemParams &params, double peak_alpha) {
    if (params.g0 * peak_alpha >= params.kappa() / 4) {
        double p = strong_coupling_power(params);
        throw StrongCouplingRegime(
            "drive exceeds the weak-coupling limit g0*alpha < kappa/4 (threshold " + std::to_string(p * 1e3) + " mW)",
            p);
    }
}

}  // namespace

CoolingTrajectory::CoolingTrajectory(const SystemParams &params, const DrivePulse &pulse, double n_init, CoolingModel model)
    : params_(params),
      profile_(std::make_shared<PumpProfile>(params, pulse)),
      n_init_(n_init),
      model_(model) {
    if (!(n_init >= 0)) {
        throw std::invalid_argument("initial population must be non-negative");
    }
    weak_coupling_ = 2 * params.g0 * profile_->peak_alpha() < params.kappa() / 2;
}

std::vector<double> CoolingTrajectory::at(const std::vector<double> &times) const {
    std::vector<double> grid{0.0};
    for (double t : times) {
        if (t < 0) {
            throw std::invalid_argument("cooling trajectory time must be non-negative");
        }
        if (t > grid.back()) {
            grid.push_back(t);
        }
    }
    std::vector<double> values;
    if (grid.size() > 1) {
        OdeOptions opt;
        opt.rel_tol = 1e-10;
        opt.abs_tol = 1e-16;
        DrivePulse pulse;
        double kappa = params_.kappa();
        opt.max_step = 0.5 / kappa;
        RealVector x0;
        OdeRhs rhs;
        const PumpProfile &profile = *profile_;
        double g0 = params_.g0, Gamma = params_.Gamma, n_th = params_.n_th;
        if (model_ == CoolingModel::moments) {
            x0 = RealVector::Zero(4);
            x0[1] = n_init_;
            rhs = exchange_rhs(params_, profile, n_th);
        } else {
            x0 = RealVector::Constant(1, n_init_);
            rhs = [&profile, g0, Gamma, n_th, kappa](const RealVector &x, RealVector &dx, double t) {
                double a = profile.alpha(t);
                double gopt = 4 * g0 * g0 * a * a / kappa;
                dx[0] = -gopt * x[0] - Gamma * (x[0] - n_th);
            };
        }
        // After the pump has died away only the slow bath acts; the step bound is lifted there.
        std::vector<double> inner, outer;
        for (double t : grid) {
            (t <= profile.end() ? inner : outer).push_back(t);
        }
        bool end_added = !outer.empty() && inner.back() < profile.end();
        if (end_added) {
            inner.push_back(profile.end());
        }
        auto s_in = integrate_at(rhs, x0, inner, opt);
        std::vector<RealVector> states(s_in.begin(), s_in.end());
        if (!outer.empty()) {
            if (end_added) {
                states.pop_back();
            }
            std::vector<double> tail{profile.end()};
            tail.insert(tail.end(), outer.begin(), outer.end());
            OdeOptions slow = opt;
            slow.max_step = 0;
            auto s_out = integrate_at(rhs, s_in.back(), tail, slow);
            states.insert(states.end(), s_out.begin() + 1, s_out.end());
        }
        for (const auto &x : states) {
            values.push_back(model_ == CoolingModel::moments ? x[1] : x[0]);
        }
    } else {
        values.push_back(n_init_);
    }
    std::vector<double> out;
    for (double t : times) {
        auto it = std::find(grid.begin(), grid.end(), t);
        out.push_back(values[static_cast<size_t>(it - grid.begin())]);
    }
    return out;
}

double CoolingTrajectory::operator()(double t) const {
    return at({t})[0];
}

CoolingTrajectory cooling_trajectory(const SystemParams &params, const DrivePulse &pulse, double n_init, CoolingModel model) {
    return CoolingTrajectory(params, pulse, n_init, model);
}

double squeeze_population(const SystemParams &params, const PumpAmplitude &alpha_b, double t) {
    if (t < 0) {
        throw std::invalid_argument("time must be non-negative");
    }
    double kappa = params.kappa();
    double G = params.gh * alpha_b.alpha;
    double gt = std::sqrt(G * G + kappa * kappa / 16);
    double f = std::cosh(gt * t) + kappa / (4 * gt) * std::sinh(gt * t);
    // e^{-kappa t/2} f^2 - 1, written to keep precision when G t is small
    double x = std::exp(-0.25 * kappa * t) * f;
    return (x - 1) * (x + 1);
}

double squeeze_population(const SystemParams &params, const DrivePulse &pulse) {
    PumpProfile profile(params, pulse);
    double kappa = params.kappa();
    double gh = params.gh;
    // x = (n_a, n_b, -Im<a b>)
    OdeRhs rhs = [&](const RealVector &x, RealVector &dx, double t) {
        double G = gh * profile.alpha(t);
        dx[0] = 2 * G * x[2] - kappa * x[0];
        dx[1] = 2 * G * x[2];
        dx[2] = G * (1 + x[0] + x[1]) - 0.5 * kappa * x[2];
    };
    OdeOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    opt.max_step = pulse_max_step(pulse, profile, kappa);
    auto states = integrate_at(rhs, RealVector::Zero(3), {0.0, profile.end()}, opt);
    return states.back()[1];
}

PairDistribution::PairDistribution(double n_bar) : n_bar_(n_bar) {
    if (!(n_bar >= 0)) {
        throw std::invalid_argument("mean pair number must be non-negative");
    }
}

double PairDistribution::p0() const {
    return 1 / (1 + n_bar_);
}

double PairDistribution::p1() const {
    return n_bar_ / ((1 + n_bar_) * (1 + n_bar_));
}

double PairDistribution::operator()(int k) const {
    if (k < 0) {
        return 0.0;
    }
    return p0() * std::pow(n_bar_ / (1 + n_bar_), k);
}

PairDistribution pair_distribution(double n_bar) {
    return PairDistribution(n_bar);
}

double strong_coupling_power(const SystemParams &params) {
    double kappa = params.kappa();
    double alpha_sq = kappa * kappa / (16 * params.g0 * params.g0);
    return alpha_sq * kappa * kappa * kHbar * params.omega0 / (4 * params.kappa_ex);
}

SwapPopulations swap_populations(const SystemParams &params, const PumpAmplitude &alpha_r, double t, double n_ph0) {
    if (t < 0) {
        throw std::invalid_argument("time must be non-negative");
    }
    check_weak_retrieval(params, alpha_r.alpha);
    double kappa = params.kappa();
    double G = params.g0 * alpha_r.alpha;
    double zeta = std::sqrt(kappa * kappa / 16 - G * G);
    double decay = std::exp(-0.5 * kappa * t);
    double c = std::cosh(zeta * t), s = std::sinh(zeta * t);
    double n_ph = decay * std::pow(c + kappa / (4 * zeta) * s, 2) * n_ph0;
    double n_0 = G * G / (zeta * zeta) * decay * s * s * n_ph0;
    return {n_ph, n_0};
}

namespace {

double retrieved_integral(const SystemParams &params, const DrivePulse &pulse, double T_re) {
    if (pulse.power == 0) {
        return 0.0;
    }
    PumpProfile profile(params, pulse);
    check_weak_retrieval(params, profile.peak_alpha());
    double kappa = params.kappa();
    if (T_re < 0) {
        T_re = profile.end() + 10 / kappa;
    }
    if (T_re < pulse.duration) {
        throw std::invalid_argument("retrieval time must not precede the end of the pulse");
    }
    OdeRhs rhs = exchange_rhs(params, profile, 0.0);
    OdeOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    opt.max_step = pulse_max_step(pulse, profile, kappa);
    RealVector x0 = RealVector::Zero(4);
    x0[1] = 1.0;
    auto states = integrate_at(rhs, x0, {0.0, T_re}, opt);
    return states.back()[3];
}

}  // namespace

double retrieval_efficiency(const SystemParams &params, const DrivePulse &pulse, double T_re) {
    return params.kappa_ex * retrieved_integral(params, pulse, T_re);
}

double retrieval_probability(const SystemParams &params, const DrivePulse &pulse, double T_re) {
    return params.kappa() * retrieved_integral(params, pulse, T_re);
}

double retrieval_efficiency_bound(const SystemParams &params, double power) {
    double C = params.C0() * pump_photon_number(params, power).alpha_sq;
    return params.eta_ex() * C / (C + 1);
}

double solve_pulse_duration(
    const SystemParams &params, double power, const DurationTarget &target, const DurationOptions &options) {
    auto make = [&](double T) {
        DrivePulse p;
        p.power = power;
        p.duration = T;
        p.shape = options.shape;
        p.role = CarrierRole::red;
        return p;
    };
    PumpAmplitude a = pump_photon_number(params, power);
    OpticalDamping d = optical_damping(params, a);
    std::function<bool(double)> reached;
    double guess;
    using Kind = DurationTarget::Kind;
    if (target.kind == Kind::population) {
        if (target.n_init <= target.value) {
            return 0.0;
        }
        SystemParams p = params;
        double n_floor = cooled_population(p, a);
        if (n_floor >= target.value) {
            throw Unreachable("steady-state population " + std::to_string(n_floor) + " does not reach the target");
        }
        reached = [&, p](double T) {
            DrivePulse pulse = make(T);
            return cooling_trajectory(p, pulse, target.n_init, options.model)(pulse.window()) <= target.value;
        };
        guess = std::log(target.n_init / target.value) / (d.Gamma_opt + params.Gamma);
    } else {
        if (target.value <= 0) {
            return 0.0;
        }
        double ceiling = d.C / (d.C + 1) * params.kappa() / (params.kappa() + params.Gamma);
        if (target.kind == Kind::retrieval_efficiency) {
            ceiling *= params.eta_ex();
        }
        if (ceiling <= target.value) {
            throw Unreachable("long-pulse retrieval " + std::to_string(ceiling) + " does not reach the target");
        }
        check_weak_retrieval(params, a.alpha);
        reached = [&](double T) {
            DrivePulse pulse = make(T);
            double v = target.kind == Kind::retrieval_efficiency ? retrieval_efficiency(params, pulse)
                                                                 : retrieval_probability(params, pulse);
            return v >= target.value;
        };
        guess = 1 / std::max(d.Gamma_opt, params.kappa());
    }
    double lo = 0, hi = guess;
    int doublings = 0;
    while (!reached(hi)) {
        lo = hi;
        hi *= 2;
        if (++doublings > 80) {
            throw Unreachable("no pulse duration reaches the target");
        }
    }
    while ((hi - lo) > options.rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        (reached(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace omcache
