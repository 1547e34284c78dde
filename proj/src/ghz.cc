#include "omcache/ghz.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "omcache/errors.h"
#include "omcache/herald.h"
#include "omcache/multiplex.h"

namespace omcache::ghz {

using fock::CMatrix;
using fock::Complex;
using fock::CVector;
using fock::SparseOp;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_p(double p_re) {
    if (!(p_re >= 0 && p_re <= 1)) {
        throw std::invalid_argument("p_re must lie in [0, 1]");
    }
}

int popcount(uint32_t x) {
    return __builtin_popcount(x);
}

}  // namespace

Network::Network(int n) : n_(n) {
    if (n < 2) {
        throw std::invalid_argument("a GHZ network needs at least two qubits");
    }
    if (n > kMaxQubits) {
        throw ComplexityLimit("GHZ networks are limited to " + std::to_string(kMaxQubits) + " qubits");
    }
    std::vector<fock::Mode> modes;
    for (int i = 0; i < n; i++) {
        for (int q = 0; q < 2; q++) {
            std::string label = "[" + std::to_string(i + 1) + "," + std::to_string(q) + "]";
            labels_.push_back(label);
            modes.push_back({label, 2, fock::ModeKind::acoustic});
        }
    }
    registry_ = fock::ModeRegistry(modes);

    // Layer 1 within each pair: sum to (i,1), difference to (i,0).
    Eigen::MatrixXd L1 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; i++) {
        int a = index(i, 0), b = index(i, 1);
        L1(b, a) = kInvSqrt2;
        L1(b, b) = kInvSqrt2;
        L1(a, a) = kInvSqrt2;
        L1(a, b) = -kInvSqrt2;
    }
    // Layer 2 on ((i,1), (i+1,0)): sum to (i+1,0), difference to (i,1).
    Eigen::MatrixXd L2 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; i++) {
        int a = index(i, 1), b = index((i + 1) % n, 0);
        L2(b, a) = kInvSqrt2;
        L2(b, b) = kInvSqrt2;
        L2(a, a) = kInvSqrt2;
        L2(a, b) = -kInvSqrt2;
    }
    S_ = L2 * L1;
}

std::array<int, 2> Network::detector_pair(int i) const {
    return {index(i, 1), index((i + 1) % n_, 0)};
}

int Network::pair_of_detector(int d) const {
    int i = d / 2;
    return d % 2 == 1 ? i : (i + n_ - 1) % n_;
}

int Network::sign_of_detector(int d) const {
    return d % 2 == 1 ? 1 : -1;
}

std::array<int, 2> Network::adjacent_pairs(int i) const {
    return {(i + n_ - 1) % n_, i};
}

const char *to_string(RecordClass c) {
    switch (c) {
        case RecordClass::partial:
            return "partial";
        case RecordClass::complete:
            return "complete";
        case RecordClass::failed:
            return "failed";
        case RecordClass::wrong_basis:
            return "wrong_basis";
    }
    return "?";
}

std::string DetectionRecord::key() const {
    std::string s;
    for (int c : counts) {
        s += static_cast<char>('0' + std::min(c, 9));
    }
    return s;
}

DetectionRecord classify(const Network &net, const std::vector<int> &counts) {
    if (static_cast<int>(counts.size()) != net.modes()) {
        throw DimensionMismatch("record length must equal the number of detectors");
    }
    DetectionRecord r;
    r.counts = counts;
    r.parity.assign(static_cast<size_t>(net.n()), 0);
    bool multi = false;
    for (int c : counts) {
        if (c < 0) {
            throw std::invalid_argument("negative click count");
        }
        r.detections += c;
        multi = multi || c >= 2;
    }
    int doubled = 0, empty = 0;
    for (int i = 0; i < net.n(); i++) {
        auto [d1, d0] = net.detector_pair(i);
        int c1 = counts[static_cast<size_t>(d1)], c0 = counts[static_cast<size_t>(d0)];
        if (c1 > 0 && c0 > 0) {
            doubled++;
        } else if (c1 > 0) {
            r.parity[static_cast<size_t>(i)] = 1;
        } else if (c0 > 0) {
            r.parity[static_cast<size_t>(i)] = -1;
        } else {
            empty++;
        }
    }
    if (multi) {
        r.cls = RecordClass::failed;
    } else if (doubled > 0) {
        bool wrong = net.n() == 2 && doubled == 1 && empty == 1;
        r.cls = wrong ? RecordClass::wrong_basis : RecordClass::failed;
    } else if (empty == 0) {
        r.cls = RecordClass::complete;
        r.total_parity = 1;
        for (int s : r.parity) {
            r.total_parity *= s;
        }
    } else {
        r.cls = RecordClass::partial;
    }
    return r;
}

fock::PureState all_ones(const Network &net) {
    return fock::basis_state(net.registry(), std::vector<int>(static_cast<size_t>(net.modes()), 1));
}

fock::PureState ghz_target(const Network &net, int parity) {
    if (parity != 1 && parity != -1) {
        throw std::invalid_argument("GHZ parity must be +1 or -1");
    }
    const auto &reg = net.registry();
    CVector v = CVector::Zero(static_cast<Eigen::Index>(reg.total_dim()));
    int n = net.n();
    double amp = std::pow(0.5, 0.5 * n) * kInvSqrt2;
    for (uint32_t choice = 0; choice < (1u << n); choice++) {
        std::vector<int> occ(static_cast<size_t>(net.modes()), 0);
        double minus = 1;
        for (int i = 0; i < n; i++) {
            int q = (choice >> i) & 1;
            occ[static_cast<size_t>(Network::index(i, q))] = 1;
            if (q == 1) {
                minus = -minus;
            }
        }
        v[static_cast<Eigen::Index>(reg.basis_index(occ))] += amp * (1.0 + parity * minus);
    }
    return fock::PureState{reg, v};
}

namespace {

// Mode operators on the dual-rail registry.
struct ModeOps {
    std::vector<SparseOp> b;
    SparseOp identity;

    explicit ModeOps(const Network &net) {
        for (const auto &l : net.labels()) {
            b.push_back(fock::annihilation(net.registry(), l));
        }
        identity = fock::identity_op(net.registry());
    }

    SparseOp detector(const Network &net, int d, const std::vector<bool> &retrieved) const {
        SparseOp a(identity.rows(), identity.cols());
        for (int j = 0; j < net.modes(); j++) {
            double s = net.S()(d, j);
            if (retrieved[static_cast<size_t>(j)] && s != 0) {
                a += Complex(s) * b[static_cast<size_t>(j)];
            }
        }
        return a;
    }
};

// (1-p)^{n_R/2} as a diagonal.
Eigen::VectorXd no_jump_diagonal(const Network &net, double p_re, const std::vector<bool> &retrieved) {
    const auto &reg = net.registry();
    Eigen::VectorXd d(static_cast<Eigen::Index>(reg.total_dim()));
    for (size_t i = 0; i < reg.total_dim(); i++) {
        int m = 0;
        for (int j = 0; j < net.modes(); j++) {
            if (retrieved[static_cast<size_t>(j)]) {
                m += reg.digit(i, static_cast<size_t>(j));
            }
        }
        d[static_cast<Eigen::Index>(i)] = m == 0 ? 1.0 : std::pow(1.0 - p_re, 0.5 * m);
    }
    return d;
}

SparseOp diagonal_op(const Eigen::VectorXd &d) {
    SparseOp m(d.size(), d.size());
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < d.size(); i++) {
        t.emplace_back(i, i, d[i]);
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

CMatrix sandwich(const SparseOp &a, const CMatrix &rho) {
    CMatrix half = a * rho;
    return a * CMatrix(half.adjoint());
}

struct RawBranch {
    std::vector<int> clicks;
    DetectionRecord record;
    CMatrix rho;  // unnormalized
};

struct RawStep {
    std::vector<RawBranch> branches;
    double failure = 0;
};

// One iteration on an unnormalized state: loss folded in before the
// detection pattern, dark counts spread over the undetected detectors.
RawStep raw_step(
    const Network &net, const ModeOps &ops, const CMatrix &rho, const DetectionRecord &record, double p_re,
    const HeraldModel &herald) {
    int D = net.modes();
    double eta = herald.eta();
    double p_d = herald.p_d();
    auto retrieved = retrieved_modes(net, record);
    double tin = rho.trace().real();

    CMatrix sigma = rho;
    if (eta < 1) {
        for (int j = 0; j < D; j++) {
            if (retrieved[static_cast<size_t>(j)]) {
                sigma += (1 - eta) * p_re * sandwich(ops.b[static_cast<size_t>(j)], sigma);
            }
        }
    }
    Eigen::VectorXd dj = no_jump_diagonal(net, p_re, retrieved);
    std::vector<SparseOp> A;
    for (int d = 0; d < D; d++) {
        A.push_back(ops.detector(net, d, retrieved));
    }

    std::map<std::string, RawBranch> acc;
    double prune = 1e-300;
    // Depth-first over detected patterns; X = M_k sigma M_k^dag before the prefactors.
    std::vector<int> k(static_cast<size_t>(D), 0);
    std::function<void(int, const CMatrix &, int)> visit = [&](int from, const CMatrix &X, int nk) {
        CMatrix rk = std::pow(eta * p_re, nk) * dj.asDiagonal() * X * dj.asDiagonal();
        double tk = rk.trace().real();
        if (tk > prune) {
            // Darks on detectors without a photon; a dark on a photon detector is a multi-click.
            std::vector<int> free;
            for (int d = 0; d < D; d++) {
                if (k[static_cast<size_t>(d)] == 0) {
                    free.push_back(d);
                }
            }
            std::vector<int> c = k;
            double base = std::pow(1 - p_d, D);
            std::function<void(size_t, double)> darks = [&](size_t idx, double w) {
                if (idx == free.size()) {
                    std::vector<int> total = record.counts;
                    for (int d = 0; d < D; d++) {
                        total[static_cast<size_t>(d)] += c[static_cast<size_t>(d)];
                    }
                    DetectionRecord r = classify(net, total);
                    if (r.cls == RecordClass::failed) {
                        return;
                    }
                    std::string key = r.key();
                    auto it = acc.find(key);
                    if (it == acc.end()) {
                        it = acc.emplace(key, RawBranch{c, r, CMatrix::Zero(rho.rows(), rho.cols())}).first;
                    }
                    it->second.rho += w * rk;
                    return;
                }
                darks(idx + 1, w);
                if (p_d > 0 && w * tk * p_d / (1 - p_d) > 1e-16 * tin) {
                    c[static_cast<size_t>(free[idx])] = 1;
                    darks(idx + 1, w * p_d / (1 - p_d));
                    c[static_cast<size_t>(free[idx])] = 0;
                }
            };
            darks(0, base);
        }
        if (X.trace().real() <= prune) {
            return;
        }
        for (int d = from; d < D; d++) {
            k[static_cast<size_t>(d)] = 1;
            visit(d + 1, sandwich(A[static_cast<size_t>(d)], X), nk + 1);
            k[static_cast<size_t>(d)] = 0;
        }
    };
    visit(0, sigma, 0);

    RawStep out;
    double kept = 0;
    for (auto &[key, br] : acc) {
        br.rho = 0.5 * (br.rho + CMatrix(br.rho.adjoint()));
        kept += br.rho.trace().real();
        out.branches.push_back(std::move(br));
    }
    out.failure = std::max(0.0, tin - kept);
    return out;
}

double wrong_basis_fidelity(const Network &net, const CMatrix &rho) {
    // Bell pair re-paired across the two dual rails: |1100> +- |0011>.
    const auto &reg = net.registry();
    auto i1 = static_cast<Eigen::Index>(reg.basis_index({1, 1, 0, 0}));
    auto i2 = static_cast<Eigen::Index>(reg.basis_index({0, 0, 1, 1}));
    double tr = rho.trace().real();
    double diag = 0.5 * (rho(i1, i1).real() + rho(i2, i2).real());
    double off = std::abs(rho(i1, i2).real());
    return tr > 0 ? (diag + off) / tr : 0.0;
}

double ghz_fidelity(const Network &net, const CMatrix &rho, int parity) {
    double tr = rho.trace().real();
    if (tr <= 0) {
        return 0;
    }
    CVector v = ghz_target(net, parity).amplitudes;
    return (v.adjoint() * rho * v)(0, 0).real() / tr;
}

}  // namespace

fock::KrausOp ghz_kraus(const Network &net, const std::vector<int> &s, double p_re) {
    check_p(p_re);
    if (static_cast<int>(s.size()) != net.n()) {
        throw DimensionMismatch("one sign per dual-rail pair is required");
    }
    ModeOps ops(net);
    SparseOp k = ops.identity;
    for (int i = 0; i < net.n(); i++) {
        int v = s[static_cast<size_t>(i)];
        if (v != 1 && v != -1) {
            throw std::invalid_argument("pair signs must be +1 or -1");
        }
        int ip = (i + 1) % net.n();
        SparseOp plus = Complex(kInvSqrt2) * (ops.b[static_cast<size_t>(Network::index(i, 0))] +
                                              ops.b[static_cast<size_t>(Network::index(i, 1))]);
        SparseOp minus = Complex(kInvSqrt2) * (ops.b[static_cast<size_t>(Network::index(ip, 0))] -
                                               ops.b[static_cast<size_t>(Network::index(ip, 1))]);
        SparseOp f = plus - Complex(double(v)) * minus;
        k = SparseOp(f * k);
    }
    std::vector<bool> all(static_cast<size_t>(net.modes()), true);
    SparseOp dj = diagonal_op(no_jump_diagonal(net, p_re, all));
    std::string label = "K_GHZ";
    for (int v : s) {
        label += v > 0 ? '+' : '-';
    }
    return {SparseOp(Complex(std::pow(0.5 * p_re, 0.5 * net.n())) * (dj * k)), label};
}

fock::KrausOp detection_kraus(const Network &net, const std::vector<int> &k, double p_re, const std::vector<bool> &retrieved) {
    check_p(p_re);
    if (static_cast<int>(k.size()) != net.modes() || static_cast<int>(retrieved.size()) != net.modes()) {
        throw DimensionMismatch("pattern and retrieved set need one entry per detector");
    }
    ModeOps ops(net);
    SparseOp m = ops.identity;
    std::string label = "K_";
    for (int d = 0; d < net.modes(); d++) {
        int kd = k[static_cast<size_t>(d)];
        if (kd < 0) {
            throw std::invalid_argument("negative click count");
        }
        label += static_cast<char>('0' + std::min(kd, 9));
        SparseOp a = ops.detector(net, d, retrieved);
        for (int r = 0; r < kd; r++) {
            m = SparseOp(Complex(std::sqrt(p_re / (r + 1))) * (a * m));
        }
    }
    SparseOp dj = diagonal_op(no_jump_diagonal(net, p_re, retrieved));
    return {SparseOp(dj * m), label};
}

std::vector<bool> retrieved_modes(const Network &net, const DetectionRecord &record) {
    std::vector<bool> r(static_cast<size_t>(net.modes()), true);
    if (record.parity.size() != static_cast<size_t>(net.n())) {
        return r;
    }
    for (int i = 0; i < net.n(); i++) {
        auto adj = net.adjacent_pairs(i);
        if (record.parity[static_cast<size_t>(adj[0])] != 0 && record.parity[static_cast<size_t>(adj[1])] != 0) {
            r[static_cast<size_t>(Network::index(i, 0))] = false;
            r[static_cast<size_t>(Network::index(i, 1))] = false;
        }
    }
    return r;
}

std::vector<BleedBranch> bleed_step(const Network &net, const BleedState &state, double p_re, const HeraldModel &herald) {
    check_p(p_re);
    herald.validate();
    if (!(state.rho.registry == net.registry())) {
        throw DimensionMismatch("bleed_step: state does not live on the network modes");
    }
    if (state.record.counts.size() != static_cast<size_t>(net.modes())) {
        throw InvalidState("bleed_step: record does not match the network");
    }
    if (state.record.cls != RecordClass::partial) {
        throw InvalidState(std::string("bleed_step: record is terminal (") + to_string(state.record.cls) + ")");
    }
    double tr = state.rho.matrix.trace().real();
    if (state.rho.null || std::abs(tr - 1) > 1e-8) {
        throw InvalidState("bleed_step: state must be normalized");
    }
    ModeOps ops(net);
    RawStep raw = raw_step(net, ops, state.rho.matrix, state.record, p_re, herald);
    std::vector<BleedBranch> out;
    for (auto &b : raw.branches) {
        double p = b.rho.trace().real();
        if (p <= 0) {
            continue;
        }
        BleedBranch br;
        br.clicks = b.clicks;
        br.probability = p;
        br.state = BleedState{fock::DensityMatrix{net.registry(), b.rho / p}, b.record, state.iteration + 1};
        out.push_back(std::move(br));
    }
    BleedBranch fail;
    fail.probability = raw.failure;
    fail.state.record = state.record;
    fail.state.record.cls = RecordClass::failed;
    fail.state.iteration = state.iteration + 1;
    fail.state.rho.registry = net.registry();
    fail.state.rho.null = true;
    out.push_back(std::move(fail));
    return out;
}

namespace {

BleedState initial_state(const Network &net) {
    BleedState s;
    s.rho = fock::to_density(all_ones(net));
    s.record = classify(net, std::vector<int>(static_cast<size_t>(net.modes()), 0));
    return s;
}

ShotOutcome make_outcome(const Network &net, const DetectionRecord &r, const CMatrix &rho, double p) {
    ShotOutcome o;
    o.pattern = r.key();
    o.cls = r.cls;
    o.parity = r.total_parity;
    o.probability = p;
    if (r.cls == RecordClass::complete) {
        o.fidelity = ghz_fidelity(net, rho, r.total_parity);
    } else if (r.cls == RecordClass::wrong_basis) {
        o.fidelity = wrong_basis_fidelity(net, rho);
    }
    return o;
}

void summarize(SingleShotResult &r) {
    double fsum = 0;
    for (const auto &o : r.outcomes) {
        if (o.cls == RecordClass::complete) {
            r.p_complete += o.probability;
            fsum += o.probability * o.fidelity;
        } else if (o.cls == RecordClass::wrong_basis) {
            r.p_wrong_basis += o.probability;
        }
    }
    r.fidelity = r.p_complete > 0 ? fsum / r.p_complete : 0.0;
}

}  // namespace

SingleShotResult single_shot(const Network &net, double p_re, const HeraldModel &herald) {
    check_p(p_re);
    herald.validate();
    ModeOps ops(net);
    BleedState s0 = initial_state(net);
    RawStep raw = raw_step(net, ops, s0.rho.matrix, s0.record, p_re, herald);
    SingleShotResult r;
    r.n = net.n();
    r.p_re = p_re;
    for (const auto &b : raw.branches) {
        r.outcomes.push_back(make_outcome(net, b.record, b.rho, b.rho.trace().real()));
    }
    ShotOutcome fail;
    fail.pattern = "fail";
    fail.cls = RecordClass::failed;
    fail.probability = raw.failure;
    r.outcomes.push_back(fail);
    summarize(r);
    return r;
}

SingleShotResult single_shot_optical(int n, double p_re, const HeraldModel &herald) {
    check_p(p_re);
    herald.validate();
    if (n != 2) {
        throw ComplexityLimit("the explicit optical model is limited to two qubits");
    }
    Network net(n);
    std::vector<fock::Mode> modes = net.registry().modes();
    std::vector<std::string> optical;
    int max_photons = net.modes();
    for (const auto &l : net.labels()) {
        optical.push_back("o" + l);
        modes.push_back({optical.back(), max_photons + 1, fock::ModeKind::optical});
    }
    fock::ModeRegistry reg(modes);
    std::vector<int> occ(modes.size(), 0);
    for (int j = 0; j < net.modes(); j++) {
        occ[static_cast<size_t>(j)] = 1;
    }
    fock::PureState psi = fock::basis_state(reg, occ);
    CMatrix bs(2, 2);
    double t = std::sqrt(1 - p_re), r = std::sqrt(p_re);
    bs << t, -r, r, t;
    for (int j = 0; j < net.modes(); j++) {
        psi = fock::linear_mode_transform(psi, {net.labels()[static_cast<size_t>(j)], optical[static_cast<size_t>(j)]}, bs);
    }
    psi = fock::optical_scatter(psi, optical, net.S().cast<Complex>());
    auto outcomes = fock::detect_photon_number(psi, optical, herald);

    SingleShotResult res;
    res.n = n;
    res.p_re = p_re;
    double fail = 0;
    for (const auto &o : outcomes) {
        DetectionRecord rec = classify(net, o.clicks);
        if (rec.cls == RecordClass::failed) {
            fail += o.probability;
            continue;
        }
        res.outcomes.push_back(make_outcome(net, rec, o.state.matrix, o.probability));
    }
    ShotOutcome f;
    f.pattern = "fail";
    f.cls = RecordClass::failed;
    f.probability = fail;
    res.outcomes.push_back(f);
    summarize(res);
    return res;
}

SampledFidelity sample_single_shot(const SingleShotResult &r, size_t shots, uint64_t seed) {
    std::vector<double> w;
    for (const auto &o : r.outcomes) {
        w.push_back(std::max(0.0, o.probability));
    }
    std::mt19937_64 rng(seed);
    std::discrete_distribution<size_t> pick(w.begin(), w.end());
    std::uniform_real_distribution<double> u(0, 1);
    SampledFidelity s;
    s.shots = shots;
    size_t good = 0;
    for (size_t k = 0; k < shots; k++) {
        const auto &o = r.outcomes[pick(rng)];
        if (o.cls != RecordClass::complete) {
            continue;
        }
        s.heralds++;
        if (u(rng) < o.fidelity) {
            good++;
        }
    }
    s.herald_probability = double(s.heralds) / double(shots);
    if (s.heralds > 0) {
        s.fidelity = double(good) / double(s.heralds);
        s.fidelity_se = std::sqrt(std::max(s.fidelity * (1 - s.fidelity), 1.0 / double(s.heralds)) / double(s.heralds));
    }
    return s;
}

void write_outcomes_csv(std::ostream &os, const SingleShotResult &r) {
    os << "pattern,class,parity,probability,fidelity\n";
    os.precision(12);
    for (const auto &o : r.outcomes) {
        os << o.pattern << ',' << to_string(o.cls) << ',' << o.parity << ',' << o.probability << ',' << o.fidelity
           << '\n';
    }
}

double RetrievalSchedule::at(int iteration, int detections) const {
    if (p.empty()) {
        throw std::invalid_argument("empty retrieval schedule");
    }
    const auto &row = p[static_cast<size_t>(std::clamp(iteration, 0, iterations() - 1))];
    if (row.empty()) {
        throw std::invalid_argument("empty retrieval schedule row");
    }
    return row[static_cast<size_t>(std::clamp(detections, 0, static_cast<int>(row.size()) - 1))];
}

BleedResult bleed_success_probability(
    int n, const RetrievalSchedule &schedule, const HeraldModel &herald, bool include_wrong_basis) {
    herald.validate();
    Network net(n);
    ModeOps ops(net);
    int K = schedule.iterations();
    if (K < 1) {
        throw std::invalid_argument("at least one iteration is required");
    }
    for (const auto &row : schedule.p) {
        for (double p : row) {
            check_p(p);
        }
    }
    struct Acc {
        double p = 0, fw = 0, ffw = 0, peff = 0;
    };
    std::map<std::vector<int>, Acc> paths;
    BleedResult res;

    std::function<void(const CMatrix &, const DetectionRecord &, int, std::vector<int> &, double)> walk =
        [&](const CMatrix &rho, const DetectionRecord &rec, int it, std::vector<int> &path, double keep) {
            double p = schedule.at(it, rec.detections);
            RawStep raw = raw_step(net, ops, rho, rec, p, herald);
            for (const auto &b : raw.branches) {
                double w = b.rho.trace().real();
                if (w <= 0) {
                    continue;
                }
                path.push_back(b.record.detections - rec.detections);
                double keep_next = keep * (1 - p);
                if (b.record.cls == RecordClass::complete) {
                    double peff = 1 - keep_next;
                    double pd_eff = effective_dark_probability(herald.p_d(), it + 1);
                    double ff = ghz_herald_fidelity(n, peff, HeraldModel::from_eta(herald.eta(), pd_eff));
                    auto &a = paths[path];
                    a.p += w;
                    a.fw += w * ghz_fidelity(net, b.rho, b.record.total_parity);
                    a.ffw += w * ff;
                    a.peff = peff;
                } else if (b.record.cls == RecordClass::wrong_basis) {
                    res.wrong_basis += w;
                } else if (it + 1 < K) {
                    walk(b.rho, b.record, it + 1, path, keep_next);
                }
                path.pop_back();
            }
        };
    BleedState s0 = initial_state(net);
    std::vector<int> path;
    walk(s0.rho.matrix, s0.record, 0, path, 1.0);

    double fsum = 0, ffsum = 0;
    for (const auto &[key, a] : paths) {
        // Trailing empty iterations are not part of a completed pathway.
        Pathway pw;
        pw.detections = key;
        pw.probability = a.p;
        pw.fidelity = a.fw / a.p;
        pw.fidelity_formula = a.ffw / a.p;
        pw.p_effective = a.peff;
        res.success += a.p;
        fsum += a.fw;
        ffsum += a.ffw;
        res.pathways.push_back(pw);
    }
    if (res.success > 0) {
        res.fidelity = fsum / res.success;
        res.fidelity_formula = ffsum / res.success;
    }
    if (include_wrong_basis) {
        res.success += res.wrong_basis;
    }
    std::sort(res.pathways.begin(), res.pathways.end(), [](const Pathway &a, const Pathway &b) {
        return a.probability > b.probability;
    });
    return res;
}

namespace {

// Golden-section maximization of f on [lo, hi].
double golden_max(const std::function<double(double)> &f, double lo, double hi, double tol, double &best) {
    const double g = 0.61803398874989485;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    best = f(x);
    return x;
}

// Coordinate-wise ascent; each coordinate keeps its value unless the line search improves it.
void coordinate_ascent(std::vector<double> &x, const std::function<double(const std::vector<double> &)> &f, double lo,
                       double hi) {
    double current = f(x);
    for (int sweep = 0; sweep < 40; sweep++) {
        double before = current;
        for (size_t i = 0; i < x.size(); i++) {
            std::vector<double> y = x;
            double val = 0;
            double xi = golden_max(
                [&](double v) {
                    y[i] = v;
                    return f(y);
                },
                lo, hi, 1e-7, val);
            if (val > current) {
                x[i] = xi;
                current = val;
            }
        }
        if (current - before < 1e-12) {
            break;
        }
    }
}

}  // namespace

BleedOptimum optimize_bleed(int n, int iterations, const HeraldModel &herald) {
    if (iterations < 1) {
        throw std::invalid_argument("at least one iteration is required");
    }
    // First iteration starts from zero detections; later ones depend on the count so far.
    auto unpack = [&](const std::vector<double> &x) {
        RetrievalSchedule s;
        size_t idx = 0;
        for (int k = 0; k < iterations; k++) {
            int cols = k == 0 ? 1 : n;
            s.p.emplace_back(x.begin() + static_cast<long>(idx), x.begin() + static_cast<long>(idx + static_cast<size_t>(cols)));
            idx += static_cast<size_t>(cols);
        }
        return s;
    };
    size_t nvar = 1 + static_cast<size_t>((iterations - 1) * n);
    std::vector<double> x(nvar, 0.4);
    coordinate_ascent(
        x, [&](const std::vector<double> &y) { return bleed_success_probability(n, unpack(y), herald).success; }, 0.0,
        1.0);
    BleedOptimum o;
    o.schedule = unpack(x);
    o.result = bleed_success_probability(n, o.schedule, herald);
    return o;
}

namespace {

// Fixed-phonon-number sector of the 2n modes, bit j = mode j.
struct Sector {
    std::vector<uint32_t> states;
    std::unordered_map<uint32_t, int> index;
};

Sector make_sector(int modes, int phonons) {
    Sector s;
    for (uint32_t b = 0; b < (1u << modes); b++) {
        if (popcount(b) == phonons) {
            s.index[b] = static_cast<int>(s.states.size());
            s.states.push_back(b);
        }
    }
    return s;
}

// Record of detector-pair outcomes: 0 none, 1 detector (i,1), 2 detector (i+1,0).
struct PairRecord {
    std::vector<int> pair;

    int level() const {
        int l = 0;
        for (int v : pair) {
            l += v != 0;
        }
        return l;
    }
    long key() const {
        long k = 0;
        for (auto it = pair.rbegin(); it != pair.rend(); ++it) {
            k = 3 * k + *it;
        }
        return k;
    }
};

uint32_t retrieved_mask(const Network &net, const PairRecord &r) {
    uint32_t mask = 0;
    for (int i = 0; i < net.n(); i++) {
        auto adj = net.adjacent_pairs(i);
        bool skip = r.pair[static_cast<size_t>(adj[0])] != 0 && r.pair[static_cast<size_t>(adj[1])] != 0;
        if (!skip) {
            mask |= 3u << (2 * i);
        }
    }
    return mask;
}

// Detector d applied to a sector (dim_out x dim_in), restricted to the retrieved modes.
Eigen::MatrixXd detector_block(const Network &net, int d, uint32_t mask, const Sector &in, const Sector &out) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.states.size()),
                                              static_cast<Eigen::Index>(in.states.size()));
    for (size_t c = 0; c < in.states.size(); c++) {
        uint32_t b = in.states[c];
        for (int j = 0; j < net.modes(); j++) {
            uint32_t bit = 1u << j;
            double s = net.S()(d, j);
            if ((b & bit) && (mask & bit) && s != 0) {
                A(out.index.at(b ^ bit), static_cast<Eigen::Index>(c)) += s;
            }
        }
    }
    return A;
}

// Outcome of adding a click on detector d to a pair record.
enum class Extend { ok, failed, wrong_basis };

Extend extend(const Network &net, const PairRecord &r, int d, PairRecord &next) {
    int i = net.pair_of_detector(d);
    int v = net.sign_of_detector(d) > 0 ? 1 : 2;
    int have = r.pair[static_cast<size_t>(i)];
    if (have != 0) {
        if (net.n() == 2 && have != v && r.level() == 1) {
            return Extend::wrong_basis;
        }
        return Extend::failed;
    }
    next = r;
    next.pair[static_cast<size_t>(i)] = v;
    return Extend::ok;
}

using SparseVec = std::map<uint32_t, double>;

}  // namespace

AsymptoticResult asymptotic_success(int n, AsymptoticMethod method) {
    Network net(n);
    int D = net.modes();
    AsymptoticResult res;
    res.n = n;
    res.fit = 0.759 / std::pow(2.24, n - 1);

    PairRecord start{std::vector<int>(static_cast<size_t>(n), 0)};
    if (method == AsymptoticMethod::normalized_kraus) {
        struct Node {
            PairRecord r;
            double P = 0;
            SparseVec psi;
        };
        std::map<long, Node> level;
        level[start.key()] = Node{start, 1.0, SparseVec{{(1u << D) - 1, 1.0}}};
        for (int l = 0; l < n; l++) {
            std::map<long, Node> next;
            for (auto &[key, node] : level) {
                res.records++;
                uint32_t mask = retrieved_mask(net, node.r);
                double nR = 0;
                for (const auto &[b, a] : node.psi) {
                    nR += a * a * popcount(b & mask);
                }
                if (nR < 1e-14) {
                    continue;
                }
                for (int d = 0; d < D; d++) {
                    SparseVec v;
                    for (const auto &[b, a] : node.psi) {
                        for (int j = 0; j < D; j++) {
                            uint32_t bit = 1u << j;
                            double s = net.S()(d, j);
                            if ((b & bit) && (mask & bit) && s != 0) {
                                v[b ^ bit] += s * a;
                            }
                        }
                    }
                    double norm2 = 0;
                    for (const auto &[b, a] : v) {
                        norm2 += a * a;
                    }
                    double w = norm2 / nR;
                    if (w < 1e-15) {
                        continue;
                    }
                    PairRecord nr;
                    Extend e = extend(net, node.r, d, nr);
                    if (e != Extend::ok) {
                        continue;
                    }
                    auto it = next.find(nr.key());
                    if (it == next.end()) {
                        double inv = 1 / std::sqrt(norm2);
                        for (auto &kv : v) {
                            kv.second *= inv;
                        }
                        it = next.emplace(nr.key(), Node{nr, 0.0, std::move(v)}).first;
                    }
                    it->second.P += node.P * w;
                }
            }
            level = std::move(next);
        }
        for (const auto &[key, node] : level) {
            res.records++;
            res.success += node.P;
        }
        return res;
    }

    // p_re -> 0 with the no-jump evolution kept: time-integrated entry state
    // weighted by 2/(m_i + m_j) per coherence.
    if (n > 5) {
        throw ComplexityLimit("the exact asymptotic limit is limited to 5 qubits");
    }
    struct Node {
        PairRecord r;
        Eigen::MatrixXd sigma;
    };
    std::map<long, Node> level;
    Sector cur = make_sector(D, D);
    level[start.key()] = Node{start, Eigen::MatrixXd::Ones(1, 1)};
    for (int l = 0; l < n; l++) {
        Sector nxt = make_sector(D, D - l - 1);
        std::map<long, Node> next;
        for (auto &[key, node] : level) {
            res.records++;
            uint32_t mask = retrieved_mask(net, node.r);
            auto dim = static_cast<Eigen::Index>(cur.states.size());
            Eigen::MatrixXd tilde = node.sigma;
            for (Eigen::Index a = 0; a < dim; a++) {
                for (Eigen::Index b = 0; b < dim; b++) {
                    int m = popcount(cur.states[static_cast<size_t>(a)] & mask) +
                            popcount(cur.states[static_cast<size_t>(b)] & mask);
                    tilde(a, b) = m > 0 ? tilde(a, b) * 2.0 / m : 0.0;
                }
            }
            for (int d = 0; d < D; d++) {
                PairRecord nr;
                if (extend(net, node.r, d, nr) != Extend::ok) {
                    continue;
                }
                Eigen::MatrixXd A = detector_block(net, d, mask, cur, nxt);
                Eigen::MatrixXd out = A * tilde * A.transpose();
                auto it = next.find(nr.key());
                if (it == next.end()) {
                    next.emplace(nr.key(), Node{nr, out});
                } else {
                    it->second.sigma += out;
                }
            }
        }
        level = std::move(next);
        cur = std::move(nxt);
    }
    for (const auto &[key, node] : level) {
        res.records++;
        res.success += node.sigma.trace();
    }
    return res;
}

RoundsResult expected_rounds(int n, const std::vector<double> &p_by_detections, double p_hsp) {
    Network net(n);
    if (p_by_detections.empty()) {
        throw std::invalid_argument("at least one retrieval level is required");
    }
    for (double p : p_by_detections) {
        if (!(p > 0 && p <= 1)) {
            throw std::invalid_argument("p_re levels must lie in (0, 1]");
        }
    }
    int D = net.modes();
    RoundsResult res;
    res.n = n;
    res.p_hsp = p_hsp;
    res.p_by_detections = p_by_detections;
    res.reset_cost = expected_max_cycle(D, p_hsp);

    // Records form a DAG by detection count. Rounds spent in one record sum
    // geometrically because the no-jump factor is diagonal.
    struct Node {
        PairRecord r;
        Eigen::MatrixXd sigma;
    };
    std::vector<Sector> sectors;
    for (int m = 0; m <= D; m++) {
        sectors.push_back(make_sector(D, m));
    }
    std::vector<std::map<long, Node>> levels(static_cast<size_t>(n));
    PairRecord start{std::vector<int>(static_cast<size_t>(n), 0)};
    levels[0][start.key()] = Node{start, Eigen::MatrixXd::Ones(1, 1)};
    for (int l = 0; l < n; l++) {
        double p = p_by_detections[std::min(static_cast<size_t>(l), p_by_detections.size() - 1)];
        const Sector &cur = sectors[static_cast<size_t>(D - l)];
        for (auto &[key, node] : levels[static_cast<size_t>(l)]) {
            uint32_t mask = retrieved_mask(net, node.r);
            auto dim = static_cast<Eigen::Index>(cur.states.size());
            Eigen::VectorXd dj(dim);
            for (Eigen::Index a = 0; a < dim; a++) {
                dj[a] = std::pow(1 - p, 0.5 * popcount(cur.states[static_cast<size_t>(a)] & mask));
            }
            Eigen::MatrixXd tilde = node.sigma;
            for (Eigen::Index a = 0; a < dim; a++) {
                for (Eigen::Index b = 0; b < dim; b++) {
                    double denom = 1 - dj[a] * dj[b];
                    if (denom <= 0) {
                        if (std::abs(node.sigma(a, b)) > 1e-15) {
                            throw InvalidState("a record with no retrievable phonons never terminates");
                        }
                        tilde(a, b) = 0;
                        continue;
                    }
                    tilde(a, b) /= denom;
                }
                res.iterations += tilde(a, a);
            }
            // At most one new click per open pair; anything else fails.
            std::vector<int> open;
            for (int i = 0; i < n; i++) {
                if (node.r.pair[static_cast<size_t>(i)] == 0) {
                    open.push_back(i);
                }
            }
            size_t combos = 1;
            for (size_t k = 0; k < open.size(); k++) {
                combos *= 3;
            }
            for (size_t code = 1; code < combos; code++) {
                PairRecord nr = node.r;
                std::vector<int> dets;
                size_t c = code;
                for (int i : open) {
                    int v = static_cast<int>(c % 3);
                    c /= 3;
                    if (v != 0) {
                        nr.pair[static_cast<size_t>(i)] = v;
                        auto pr = net.detector_pair(i);
                        dets.push_back(v == 1 ? pr[0] : pr[1]);
                    }
                }
                int m = D - l;
                Eigen::MatrixXd X = tilde;
                for (int d : dets) {
                    Eigen::MatrixXd A =
                        detector_block(net, d, mask, sectors[static_cast<size_t>(m)], sectors[static_cast<size_t>(m - 1)]);
                    X = A * X * A.transpose();
                    m--;
                }
                const Sector &out = sectors[static_cast<size_t>(m)];
                Eigen::VectorXd dout(static_cast<Eigen::Index>(out.states.size()));
                for (size_t a = 0; a < out.states.size(); a++) {
                    dout[static_cast<Eigen::Index>(a)] = std::pow(1 - p, 0.5 * popcount(out.states[a] & mask));
                }
                X = std::pow(p, static_cast<double>(dets.size())) * dout.asDiagonal() * X * dout.asDiagonal();
                int nl = nr.level();
                if (nl == n) {
                    res.success += X.trace();
                    continue;
                }
                auto &target = levels[static_cast<size_t>(nl)];
                auto it = target.find(nr.key());
                if (it == target.end()) {
                    target.emplace(nr.key(), Node{nr, X});
                } else {
                    it->second.sigma += X;
                }
            }
        }
        levels[static_cast<size_t>(l)].clear();
    }
    res.expected_rounds = (res.iterations + (1 - res.success) * res.reset_cost) / res.success;
    return res;
}

RoundsResult optimize_rounds(int n, double p_hsp) {
    std::vector<double> x(static_cast<size_t>(n), 0.3);
    coordinate_ascent(
        x, [&](const std::vector<double> &y) { return -expected_rounds(n, y, p_hsp).expected_rounds; }, 0.01, 1.0);
    return expected_rounds(n, x, p_hsp);
}

RoundsResult single_shot_rounds(int n, double p_hsp) {
    Network net(n);
    RoundsResult r;
    r.n = n;
    r.p_hsp = p_hsp;
    r.p_by_detections = {0.5};
    r.success = std::pow(0.5, 2 * n - 1);
    r.iterations = 1;
    r.reset_cost = expected_max_cycle(net.modes(), p_hsp);
    r.expected_rounds = (1 + (1 - r.success) * r.reset_cost) / r.success;
    return r;
}

}  // namespace omcache::ghz
