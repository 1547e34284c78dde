#ifndef OMCACHE_GHZ_H
#define OMCACHE_GHZ_H

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "omcache/fock.h"
#include "omcache/herald_model.h"

namespace omcache::ghz {

constexpr int kMaxQubits = 12;

/// Ring of n dual-rail pairs. Mode and detector index 2i+q carries the label
/// "[i+1,q]". Detector pair i is {(i,1), (i+1 mod n,0)}; a click on (i,1)
/// sets s_i = +1, a click on (i+1,0) sets s_i = -1.
class Network {
   public:
    /// Throws std::invalid_argument for n < 2 and ComplexityLimit for n > 12.
    explicit Network(int n);

    int n() const {
        return n_;
    }
    int modes() const {
        return 2 * n_;
    }
    const fock::ModeRegistry &registry() const {
        return registry_;
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }
    /// Detector amplitudes in terms of mode operators: A_d = sum_j S(d,j) b_j.
    const Eigen::MatrixXd &S() const {
        return S_;
    }
    static int index(int i, int q) {
        return 2 * i + q;
    }
    std::array<int, 2> detector_pair(int i) const;
    int pair_of_detector(int d) const;
    int sign_of_detector(int d) const;
    /// Detector pairs touching dual-rail pair i: i-1 and i.
    std::array<int, 2> adjacent_pairs(int i) const;

   private:
    int n_;
    fock::ModeRegistry registry_;
    std::vector<std::string> labels_;
    Eigen::MatrixXd S_;
};

enum class RecordClass { partial, complete, failed, wrong_basis };
const char *to_string(RecordClass c);

/// Cumulative click counts per detector (2 means more than one).
struct DetectionRecord {
    std::vector<int> counts;
    RecordClass cls = RecordClass::partial;
    int detections = 0;
    std::vector<int> parity;  // per detector pair: +1, -1 or 0 when empty
    int total_parity = 0;     // product of pair parities once complete
    std::string key() const;  // e.g. "0100"
};

/// For n = 2 a single pair with both detectors clicked and nothing else is
/// wrong_basis; any other double click is failed.
DetectionRecord classify(const Network &net, const std::vector<int> &counts);

fock::PureState all_ones(const Network &net);
/// (|+...+> + s|-...->)/sqrt2 with |+-> = (b_[i,0]^dag +- b_[i,1]^dag)|vac>/sqrt2.
fock::PureState ghz_target(const Network &net, int parity);

/// Kraus operator of the complete herald with pair signs s (each +1 or -1).
fock::KrausOp ghz_kraus(const Network &net, const std::vector<int> &s, double p_re);
/// One iteration with ideal detection: click pattern k (0/1 per detector) on
/// the retrieved modes, no-jump factor on the left.
fock::KrausOp detection_kraus(const Network &net, const std::vector<int> &k, double p_re, const std::vector<bool> &retrieved);

/// Modes retrieved in the next iteration: pairs with both adjacent detector
/// pairs complete are skipped.
std::vector<bool> retrieved_modes(const Network &net, const DetectionRecord &record);

struct BleedState {
    fock::DensityMatrix rho;
    DetectionRecord record;
    int iteration = 0;
};

struct BleedBranch {
    std::vector<int> clicks;  // this iteration
    BleedState state;         // rho normalized; empty matrix for the lumped failure branch
    double probability = 0;
};

/// One bleeding iteration with loss and dark counts. Returns one branch per
/// surviving click pattern and a single lumped failure branch. Throws
/// InvalidState when the record is terminal or the state is unnormalized.
std::vector<BleedBranch> bleed_step(const Network &net, const BleedState &state, double p_re, const HeraldModel &herald);

struct ShotOutcome {
    std::string pattern;
    RecordClass cls = RecordClass::partial;
    int parity = 0;
    double probability = 0;
    double fidelity = 0;  // with the GHZ state of matching parity; 0 unless complete or wrong_basis
};

struct SingleShotResult {
    int n = 0;
    double p_re = 0;
    std::vector<ShotOutcome> outcomes;
    double p_complete = 0;
    double p_wrong_basis = 0;
    double fidelity = 0;  // probability-weighted over complete outcomes
};

/// Single iteration from |1...1> with the Kraus engine.
SingleShotResult single_shot(const Network &net, double p_re, const HeraldModel &herald);
/// Same experiment through explicit optical modes: per-mode beam splitter of
/// transmissivity p_re, the two splitter layers, then photon-number detection.
/// Only n = 2 fits in memory; larger n throws ComplexityLimit.
SingleShotResult single_shot_optical(int n, double p_re, const HeraldModel &herald);

struct SampledFidelity {
    size_t shots = 0;
    size_t heralds = 0;
    double herald_probability = 0;
    double fidelity = 0;
    double fidelity_se = 0;
};
/// Samples outcomes, then a projective GHZ test on each herald.
SampledFidelity sample_single_shot(const SingleShotResult &r, size_t shots, uint64_t seed);

void write_outcomes_csv(std::ostream &os, const SingleShotResult &r);

/// p_re per iteration and detections-so-far. Missing entries reuse the last
/// row or column.
struct RetrievalSchedule {
    std::vector<std::vector<double>> p;
    int iterations() const {
        return static_cast<int>(p.size());
    }
    double at(int iteration, int detections) const;
};

struct Pathway {
    std::vector<int> detections;  // per iteration, up to completion
    double probability = 0;
    double fidelity = 0;          // exact conditional fidelity
    double fidelity_formula = 0;  // herald formula at the effective retrieval
    double p_effective = 0;
};

struct BleedResult {
    double success = 0;
    double wrong_basis = 0;
    double fidelity = 0;
    double fidelity_formula = 0;
    std::vector<Pathway> pathways;  // sorted by decreasing probability
};

BleedResult bleed_success_probability(
    int n, const RetrievalSchedule &schedule, const HeraldModel &herald, bool include_wrong_basis = false);

struct BleedOptimum {
    RetrievalSchedule schedule;
    BleedResult result;
};
/// Maximizes the success probability over per-iteration, per-detection-count p_re.
BleedOptimum optimize_bleed(int n, int iterations, const HeraldModel &herald);

enum class AsymptoticMethod {
    normalized_kraus,  // successive normalized detections, no-jump back-action dropped
    exact_limit,       // p_re -> 0 limit keeping the no-jump evolution
};

struct AsymptoticResult {
    int n = 0;
    double success = 0;
    double fit = 0;  // 0.759 / 2.24^(n-1)
    size_t records = 0;
};
/// Success probability for vanishing p_re per iteration. Throws ComplexityLimit for n > 12.
AsymptoticResult asymptotic_success(int n, AsymptoticMethod method = AsymptoticMethod::normalized_kraus);

struct RoundsResult {
    int n = 0;
    double p_hsp = 0;
    std::vector<double> p_by_detections;
    double success = 0;           // per attempt
    double iterations = 0;        // expected iterations per attempt
    double reset_cost = 0;        // M_bar(2n, p_hsp)
    double expected_rounds = 0;   // (iterations + (1 - success) reset_cost) / success
};

/// Bleeding with p_re depending only on the detections so far, repeated
/// until completion or failure; ideal detectors.
RoundsResult expected_rounds(int n, const std::vector<double> &p_by_detections, double p_hsp);
RoundsResult optimize_rounds(int n, double p_hsp);
/// One iteration at p_re = 1/2, success 1/2^(2n-1), reset after every failure.
RoundsResult single_shot_rounds(int n, double p_hsp);

}  // namespace omcache::ghz

#endif
