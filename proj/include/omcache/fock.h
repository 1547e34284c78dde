#ifndef OMCACHE_FOCK_H
#define OMCACHE_FOCK_H

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "omcache/herald_model.h"

namespace omcache::fock {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseOp = Eigen::SparseMatrix<Complex>;

enum class ModeKind { optical, acoustic };

struct Mode {
    std::string label;
    int dim;
    ModeKind kind = ModeKind::optical;
};

/// Ordered list of truncated bosonic modes. The first mode is the most
/// significant digit of a basis index.
class ModeRegistry {
   public:
    ModeRegistry() = default;
    explicit ModeRegistry(std::vector<Mode> modes);

    size_t num_modes() const {
        return modes_.size();
    }
    const std::vector<Mode> &modes() const {
        return modes_;
    }
    const Mode &mode(size_t k) const {
        return modes_[k];
    }
    size_t total_dim() const {
        return total_dim_;
    }
    size_t stride(size_t k) const {
        return strides_[k];
    }
    bool contains(std::string_view label) const;
    size_t index_of(std::string_view label) const;
    int digit(size_t basis_index, size_t k) const {
        return static_cast<int>((basis_index / strides_[k]) % modes_[k].dim);
    }
    std::vector<int> digits(size_t basis_index) const;
    size_t basis_index(const std::vector<int> &occupations) const;
    /// Registry restricted to the given labels, keeping this registry's order.
    ModeRegistry subset(const std::vector<std::string> &labels) const;

    bool operator==(const ModeRegistry &other) const;

   private:
    std::vector<Mode> modes_;
    std::vector<size_t> strides_;
    size_t total_dim_ = 1;
};

struct PureState {
    ModeRegistry registry;
    CVector amplitudes;
    bool normalized = true;
    bool null = false;
};

struct DensityMatrix {
    ModeRegistry registry;
    CMatrix matrix;
    bool null = false;
};

PureState basis_state(const ModeRegistry &registry, const std::vector<int> &occupations);
PureState vacuum_state(const ModeRegistry &registry);
DensityMatrix to_density(const PureState &state);

/// Thermal state on one mode, all other modes in vacuum.
/// Throws TruncationError when the discarded tail weight exceeds 1e-6.
DensityMatrix make_thermal_state(const ModeRegistry &registry, std::string_view label, double n_th);

/// Smallest dimension whose discarded thermal tail is below the threshold.
int thermal_dim(double n_th, double tail_threshold = 1e-8);

SparseOp annihilation(const ModeRegistry &registry, std::string_view label);
SparseOp creation(const ModeRegistry &registry, std::string_view label);
SparseOp number_op(const ModeRegistry &registry, std::string_view label);
SparseOp identity_op(const ModeRegistry &registry);

double trace(const DensityMatrix &rho);
double expectation(const DensityMatrix &rho, const SparseOp &op);
double mode_population(const DensityMatrix &rho, std::string_view label);
/// Diagonal photon-number distribution of one mode.
std::vector<double> number_distribution(const DensityMatrix &rho, std::string_view label);
/// Largest top-Fock-level population over all modes.
double top_level_population(const DensityMatrix &rho);
void check_truncation(const DensityMatrix &rho, double threshold = 1e-6);

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep);
double fidelity(const DensityMatrix &rho, const PureState &target);
double fidelity(const PureState &state, const PureState &target);

struct StateDiagnostics {
    double hermiticity_error;
    double trace;
    double min_eigenvalue;
};
StateDiagnostics diagnose(const DensityMatrix &rho);

struct KrausOp {
    SparseOp op;
    std::string label;
};

struct PureKrausResult {
    PureState state;
    double probability;
};
struct DensityKrausResult {
    DensityMatrix state;
    double probability;
};

/// Applies a Kraus operator and renormalizes. A zero-probability branch
/// returns a state flagged null.
PureKrausResult apply_kraus(const KrausOp &k, const PureState &state);
DensityKrausResult apply_kraus(const KrausOp &k, const DensityMatrix &rho);
/// Max-norm deviation of sum K^dag K from the identity.
double completeness_error(const std::vector<KrausOp> &set);

/// Fock-space representation of a passive linear transform of the listed
/// modes, a_out = S a_in. Basis columns whose image leaves the truncated
/// space are dropped; the state-level transforms throw TruncationError when
/// the input carries weight there. Throws NonUnitary.
SparseOp mode_transform_operator(const ModeRegistry &registry, const std::vector<std::string> &labels, const CMatrix &S);
PureState linear_mode_transform(const PureState &state, const std::vector<std::string> &labels, const CMatrix &S);
DensityMatrix linear_mode_transform(const DensityMatrix &rho, const std::vector<std::string> &labels, const CMatrix &S);
/// As linear_mode_transform, restricted to optical modes.
PureState optical_scatter(const PureState &state, const std::vector<std::string> &labels, const CMatrix &S);
DensityMatrix optical_scatter(const DensityMatrix &rho, const std::vector<std::string> &labels, const CMatrix &S);

/// 50/50 splitter (a, b) -> ((a+b)/sqrt2, (a-b)/sqrt2).
CMatrix balanced_splitter();

/// Click classes per detector: 0, 1, or 2 meaning "more than one".
struct DetectionOutcome {
    std::vector<int> clicks;
    double probability;
    DensityMatrix state;  // conditional state of the undetected modes
};

/// Probability of each click class for k incident photons.
std::array<double, 3> click_probabilities(int photons, double eta, double p_d);

/// Photon-number detection of the listed modes with binomial loss and
/// independent dark counts. Exhaustive when at most 1e4 outcomes exist,
/// otherwise estimated from `shots` seeded samples.
std::vector<DetectionOutcome> detect_photon_number(
    const DensityMatrix &rho,
    const std::vector<std::string> &labels,
    const HeraldModel &model,
    uint64_t seed = 0,
    size_t shots = 1'000'000);
std::vector<DetectionOutcome> detect_photon_number(
    const PureState &state,
    const std::vector<std::string> &labels,
    const HeraldModel &model,
    uint64_t seed = 0,
    size_t shots = 1'000'000);

nlohmann::json to_json(const DensityMatrix &rho);

}  // namespace omcache::fock

#endif
