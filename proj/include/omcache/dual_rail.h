#ifndef OMCACHE_DUAL_RAIL_H
#define OMCACHE_DUAL_RAIL_H

#include <limits>

namespace omcache {

/// Lifetimes of a qubit stored as one phonon in one of two identical modes,
/// |0_L> = |10>, |1_L> = |01>, each mode coupled to a bath at rate Gamma with occupation n_th.
struct DualRailRates {
    double tau_leak = 0;          // 1 / ((4 n_th + 1) Gamma)
    double tau_leak_numeric = 0;  // from the two-mode master equation
    double loss_rate = 0;         // (n_th + 1) Gamma
    double gain_rate = 0;         // n_th Gamma, excitation of the empty rail
    double heating_rate = 0;      // 2 n_th Gamma, |1> -> |2>
    double tau_X = std::numeric_limits<double>::infinity();
    double tau_Z = std::numeric_limits<double>::infinity();
    double bias = 1;              // tau_X / tau_Z
};

/// Error probabilities conditional on the qubit remaining in the dual-rail subspace.
/// Bit flip: prepared in |0_L>, found in |1_L>. Phase flip: prepared in |+_L>, found in |-_L>.
double bit_flip_probability(double Gamma, double n_th, double t);
double phase_flip_probability(double Gamma, double n_th, double t);

/// Short-time escape rate from the dual-rail subspace, -ln P_DR(t)/t at t = 1e-3/((4 n_th+1) Gamma).
double leak_rate_numeric(double Gamma, double n_th);

/// Threshold probability 1/(2e) used to define tau_X and tau_Z.
inline constexpr double kFlipThreshold = 0.18393972058572117;

DualRailRates dual_rail_lifetimes(double Gamma, double n_th);

}  // namespace omcache

#endif
