#ifndef OMCACHE_LINDBLAD_H
#define OMCACHE_LINDBLAD_H

#include <functional>
#include <string>
#include <vector>

#include "omcache/fock.h"
#include "omcache/ode.h"

namespace omcache::lindblad {

using fock::CMatrix;
using fock::Complex;
using fock::DensityMatrix;
using fock::ModeRegistry;
using fock::SparseOp;

using CoefficientFn = std::function<Complex(double t)>;

/// Contributes c(t) O + conj(c(t)) O^dag to the Hamiltonian (units of rad/s).
struct HamiltonianTerm {
    CoefficientFn coefficient;
    SparseOp op;
    std::string label;
};

struct CollapseTerm {
    double rate;  // 1/s
    SparseOp op;
    std::string label;
};

struct LindbladSpec {
    ModeRegistry registry;
    std::vector<HamiltonianTerm> hamiltonian;
    std::vector<CollapseTerm> collapse;

    /// Throws std::invalid_argument on negative rates, DimensionMismatch on foreign operators.
    void validate() const;
};

CoefficientFn constant(Complex c);

/// c (a b^dag) + h.c.: photon-phonon exchange.
HamiltonianTerm beam_splitter_term(const ModeRegistry &reg, const std::string &optical, const std::string &acoustic, CoefficientFn c);
/// c (a^dag b^dag) + h.c.: pair creation.
HamiltonianTerm squeezing_term(const ModeRegistry &reg, const std::string &optical, const std::string &acoustic, CoefficientFn c);
CollapseTerm damping(const ModeRegistry &reg, const std::string &label, double rate);
/// Loss at rate*(n_th+1) and gain at rate*n_th.
std::vector<CollapseTerm> thermal_damping(const ModeRegistry &reg, const std::string &label, double rate, double n_th);

struct EvolveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0;
    double truncation_threshold = 1e-6;
    bool check_truncation = true;
};

/// Integrates the master equation and returns the state at each requested time.
/// times[0] is the time of rho0.
std::vector<DensityMatrix> evolve(
    const LindbladSpec &spec, const DensityMatrix &rho0, const std::vector<double> &times, const EvolveOptions &options = {});

/// Master equation resolved by the number of quantum jumps of one collapse
/// channel. Block k holds the unnormalized state after k jumps; the last block
/// collects max_count jumps or more. Result is indexed [time][k].
std::vector<std::vector<CMatrix>> evolve_counting(
    const LindbladSpec &spec,
    size_t counted_term,
    size_t max_count,
    const DensityMatrix &rho0,
    const std::vector<double> &times,
    const EvolveOptions &options = {});

}  // namespace omcache::lindblad

#endif
