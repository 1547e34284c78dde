#ifndef OMCACHE_OM_DYNAMICS_H
#define OMCACHE_OM_DYNAMICS_H

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace omcache {

/// Physical parameters. All rates are angular (rad/s).
struct SystemParams {
    double omega0 = 0;     // optical carrier
    double Omega = 0;      // acoustic frequency
    double kappa_int = 0;
    double kappa_ex = 0;
    double Gamma = 0;      // acoustic loss
    double g0 = 0;         // retrieval / cooling coupling
    double gh = 0;         // squeezing coupling
    double n_th = 0;

    double kappa() const {
        return kappa_int + kappa_ex;
    }
    double eta_ex() const {
        return kappa_ex / kappa();
    }
    /// Bare cooperativity 4 g0^2 / (kappa Gamma).
    double C0() const;
    /// Throws std::invalid_argument on non-positive rates or missing sideband resolution.
    void validate() const;
};

/// Bose occupation of a mode at angular frequency Omega and temperature T_b (K).
double thermal_occupation(double Omega, double T_b);

enum class PulseShape { constant, tanh };
enum class CarrierRole { red, blue };

/// Classical pump pulse. For the tanh shape the power envelope is
/// (1+tanh((t-t_on)/tau))(1+tanh((t_off-t)/tau))/4 with tau = ramp_fraction*duration,
/// t_on = 6 tau and t_off = t_on + duration, so `duration` is the full width
/// at half maximum and the pulse occupies [0, duration + 12 tau].
struct DrivePulse {
    double power = 0;     // W, peak
    double duration = 0;  // s
    PulseShape shape = PulseShape::tanh;
    CarrierRole role = CarrierRole::red;
    double ramp_fraction = 0.05;

    double window() const;
    /// Relative power at time t, in [0, 1].
    double envelope(double t) const;
    void validate() const;
};

struct PumpAmplitude {
    double alpha_sq = 0;
    double alpha = 0;
    bool stiff_pump_valid = true;  // alpha >= 10 * 2 g0 / kappa
    bool steady_state = true;      // pulse long compared with 1/kappa
};

/// Intracavity photon number 4 kappa_ex P / (kappa^2 hbar omega0) at the peak power.
PumpAmplitude pump_photon_number(const SystemParams &params, const DrivePulse &pulse);
PumpAmplitude pump_photon_number(const SystemParams &params, double power);

/// Pump amplitude versus time. Long pulses follow the envelope adiabatically;
/// pulses no longer than 10/kappa are passed through the cavity filter
/// d(alpha)/dt = -(kappa/2) alpha + sqrt(kappa_ex P(t) / hbar omega0).
class PumpProfile {
   public:
    PumpProfile(const SystemParams &params, const DrivePulse &pulse);

    double alpha(double t) const;
    /// Time after which the pump is negligible.
    double end() const {
        return end_;
    }
    bool filtered() const {
        return filtered_;
    }
    double peak_alpha() const {
        return peak_alpha_;
    }
    /// Times at which the pump changes quickly; integrators should step on them.
    std::vector<double> breakpoints() const;

   private:
    DrivePulse pulse_;
    double steady_alpha_ = 0;
    double peak_alpha_ = 0;
    double end_ = 0;
    bool filtered_ = false;
    std::vector<double> t_, a_, da_;
};

struct OpticalDamping {
    double Gamma_opt = 0;   // rad/s
    double C0 = 0;
    double C = 0;
    bool weak_coupling = true;  // 2 g0 alpha < kappa / 2
};

OpticalDamping optical_damping(const SystemParams &params, const PumpAmplitude &alpha);

/// Steady-state phonon number n_th / (C0 |alpha|^2 + 1).
double cooled_population(const SystemParams &params, const PumpAmplitude &alpha);

enum class CoolingModel {
    moments,        // exact second moments of the linearized exchange
    rate_equation,  // dn/dt = -(Gamma_opt + Gamma)(n - n_ss)
};

/// Phonon number during and after a red pulse, starting from n_init with the
/// optical mode empty. Each call integrates from t = 0.
class CoolingTrajectory {
   public:
    CoolingTrajectory(const SystemParams &params, const DrivePulse &pulse, double n_init, CoolingModel model);
    double operator()(double t) const;
    std::vector<double> at(const std::vector<double> &times) const;
    bool weak_coupling() const {
        return weak_coupling_;
    }

   private:
    SystemParams params_;
    std::shared_ptr<PumpProfile> profile_;
    double n_init_;
    CoolingModel model_;
    bool weak_coupling_;
};

CoolingTrajectory cooling_trajectory(
    const SystemParams &params, const DrivePulse &pulse, double n_init, CoolingModel model = CoolingModel::moments);

/// Phonon number after time t of constant blue drive from vacuum, optical loss kappa, Gamma neglected.
double squeeze_population(const SystemParams &params, const PumpAmplitude &alpha_b, double t);
/// Phonon number at the end of a blue pulse (second-moment integration, Gamma neglected).
double squeeze_population(const SystemParams &params, const DrivePulse &pulse);

/// Geometric pair-number distribution with mean n_bar.
class PairDistribution {
   public:
    explicit PairDistribution(double n_bar);
    double operator()(int k) const;
    double p0() const;
    double p1() const;
    double mean() const {
        return n_bar_;
    }
    double variance() const {
        return n_bar_ * (n_bar_ + 1);
    }

   private:
    double n_bar_;
};

PairDistribution pair_distribution(double n_bar);

struct SwapPopulations {
    double n_ph;
    double n_0;
};

/// Constant red drive, Gamma neglected. Throws StrongCouplingRegime when g0 alpha >= kappa/4.
SwapPopulations swap_populations(const SystemParams &params, const PumpAmplitude &alpha_r, double t, double n_ph0);

/// Peak power at which g0 alpha reaches kappa/4.
double strong_coupling_power(const SystemParams &params);

/// kappa_ex * integral n_0 dt / n_ph(0) up to T_re (negative T_re picks the
/// pump end plus 10/kappa). Throws StrongCouplingRegime.
double retrieval_efficiency(const SystemParams &params, const DrivePulse &pulse, double T_re = -1);
/// kappa * integral n_0 dt / n_ph(0).
double retrieval_probability(const SystemParams &params, const DrivePulse &pulse, double T_re = -1);

/// Long-time constant-drive ceiling eta_ex * C / (C + 1).
double retrieval_efficiency_bound(const SystemParams &params, double power);

struct DurationTarget {
    enum class Kind { population, retrieval_probability, retrieval_efficiency };
    Kind kind = Kind::population;
    double value = 0;
    double n_init = 0;  // population targets only

    static DurationTarget population(double n_star, double n_init) {
        return {Kind::population, n_star, n_init};
    }
    static DurationTarget retrieval(double p_star) {
        return {Kind::retrieval_probability, p_star, 0};
    }
    static DurationTarget efficiency(double eta_star) {
        return {Kind::retrieval_efficiency, eta_star, 0};
    }
};

struct DurationOptions {
    PulseShape shape = PulseShape::tanh;
    CoolingModel model = CoolingModel::moments;
    double rel_tol = 1e-4;
};

/// Shortest pulse (FWHM) reaching the target at the given power.
/// Throws Unreachable if the long-pulse limit never crosses it.
double solve_pulse_duration(
    const SystemParams &params, double power, const DurationTarget &target, const DurationOptions &options = {});

}  // namespace omcache

#endif
