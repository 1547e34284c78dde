#include "omcache/fock.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "omcache/errors.h"

namespace omcache::fock {

ModeRegistry::ModeRegistry(std::vector<Mode> modes) : modes_(std::move(modes)) {
    for (size_t i = 0; i < modes_.size(); i++) {
        if (modes_[i].dim < 2) {
            throw std::invalid_argument("mode '" + modes_[i].label + "' needs fock_dim >= 2");
        }
        for (size_t j = 0; j < i; j++) {
            if (modes_[j].label == modes_[i].label) {
                throw std::invalid_argument("duplicate mode label '" + modes_[i].label + "'");
            }
        }
    }
    strides_.assign(modes_.size(), 1);
    total_dim_ = 1;
    for (size_t k = modes_.size(); k-- > 0;) {
        strides_[k] = total_dim_;
        total_dim_ *= static_cast<size_t>(modes_[k].dim);
    }
}

bool ModeRegistry::contains(std::string_view label) const {
    return std::any_of(modes_.begin(), modes_.end(), [&](const Mode &m) { return m.label == label; });
}

size_t ModeRegistry::index_of(std::string_view label) const {
    for (size_t k = 0; k < modes_.size(); k++) {
        if (modes_[k].label == label) {
            return k;
        }
    }
    throw DimensionMismatch("unknown mode label '" + std::string(label) + "'");
}

std::vector<int> ModeRegistry::digits(size_t basis_index) const {
    std::vector<int> d(modes_.size());
    for (size_t k = 0; k < modes_.size(); k++) {
        d[k] = digit(basis_index, k);
    }
    return d;
}

size_t ModeRegistry::basis_index(const std::vector<int> &occupations) const {
    if (occupations.size() != modes_.size()) {
        throw DimensionMismatch("occupation vector length does not match registry");
    }
    size_t idx = 0;
    for (size_t k = 0; k < modes_.size(); k++) {
        if (occupations[k] < 0 || occupations[k] >= modes_[k].dim) {
            throw TruncationError("occupation outside truncated space of mode '" + modes_[k].label + "'");
        }
        idx += strides_[k] * static_cast<size_t>(occupations[k]);
    }
    return idx;
}

ModeRegistry ModeRegistry::subset(const std::vector<std::string> &labels) const {
    std::vector<Mode> keep;
    for (const auto &m : modes_) {
        if (std::find(labels.begin(), labels.end(), m.label) != labels.end()) {
            keep.push_back(m);
        }
    }
    for (const auto &l : labels) {
        index_of(l);
    }
    return ModeRegistry(std::move(keep));
}

bool ModeRegistry::operator==(const ModeRegistry &other) const {
    if (modes_.size() != other.modes_.size()) {
        return false;
    }
    for (size_t k = 0; k < modes_.size(); k++) {
        if (modes_[k].label != other.modes_[k].label || modes_[k].dim != other.modes_[k].dim) {
            return false;
        }
    }
    return true;
}

PureState basis_state(const ModeRegistry &registry, const std::vector<int> &occupations) {
    PureState s{registry, CVector::Zero(static_cast<Eigen::Index>(registry.total_dim()))};
    s.amplitudes[static_cast<Eigen::Index>(registry.basis_index(occupations))] = 1.0;
    return s;
}

PureState vacuum_state(const ModeRegistry &registry) {
    return basis_state(registry, std::vector<int>(registry.num_modes(), 0));
}

DensityMatrix to_density(const PureState &state) {
    DensityMatrix rho{state.registry, state.amplitudes * state.amplitudes.adjoint()};
    rho.null = state.null;
    return rho;
}

int thermal_dim(double n_th, double tail_threshold) {
    if (n_th <= 0) {
        return 2;
    }
    double q = n_th / (1 + n_th);
    int d = static_cast<int>(std::ceil(std::log(tail_threshold) / std::log(q)));
    return std::max(d, 2);
}

DensityMatrix make_thermal_state(const ModeRegistry &registry, std::string_view label, double n_th) {
    if (n_th < 0) {
        throw std::invalid_argument("n_th must be non-negative");
    }
    size_t k = registry.index_of(label);
    int dim = registry.mode(k).dim;
    double q = n_th / (1 + n_th);
    double tail = std::pow(q, dim);
    if (tail > 1e-6) {
        throw TruncationError(
            "thermal tail weight " + std::to_string(tail) + " exceeds 1e-6 for mode '" + std::string(label) + "'");
    }
    std::vector<double> p(dim);
    double total = 0;
    for (int j = 0; j < dim; j++) {
        p[j] = (1 - q) * std::pow(q, j);
        total += p[j];
    }
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    DensityMatrix rho{registry, CMatrix::Zero(n, n)};
    std::vector<int> occ(registry.num_modes(), 0);
    for (int j = 0; j < dim; j++) {
        occ[k] = j;
        auto idx = static_cast<Eigen::Index>(registry.basis_index(occ));
        rho.matrix(idx, idx) = p[j] / total;
    }
    return rho;
}

SparseOp annihilation(const ModeRegistry &registry, std::string_view label) {
    size_t k = registry.index_of(label);
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (size_t i = 0; i < registry.total_dim(); i++) {
        int d = registry.digit(i, k);
        if (d > 0) {
            trips.emplace_back(
                static_cast<Eigen::Index>(i - registry.stride(k)), static_cast<Eigen::Index>(i), std::sqrt(double(d)));
        }
    }
    SparseOp a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

SparseOp creation(const ModeRegistry &registry, std::string_view label) {
    return SparseOp(annihilation(registry, label).adjoint());
}

SparseOp number_op(const ModeRegistry &registry, std::string_view label) {
    size_t k = registry.index_of(label);
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (size_t i = 0; i < registry.total_dim(); i++) {
        int d = registry.digit(i, k);
        if (d > 0) {
            trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), double(d));
        }
    }
    SparseOp op(n, n);
    op.setFromTriplets(trips.begin(), trips.end());
    return op;
}

SparseOp identity_op(const ModeRegistry &registry) {
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    SparseOp id(n, n);
    id.setIdentity();
    return id;
}

double trace(const DensityMatrix &rho) {
    return rho.matrix.trace().real();
}

double expectation(const DensityMatrix &rho, const SparseOp &op) {
    CMatrix prod = op * rho.matrix;
    return prod.trace().real();
}

double mode_population(const DensityMatrix &rho, std::string_view label) {
    size_t k = rho.registry.index_of(label);
    double s = 0;
    for (size_t i = 0; i < rho.registry.total_dim(); i++) {
        auto ii = static_cast<Eigen::Index>(i);
        s += rho.registry.digit(i, k) * rho.matrix(ii, ii).real();
    }
    return s;
}

std::vector<double> number_distribution(const DensityMatrix &rho, std::string_view label) {
    size_t k = rho.registry.index_of(label);
    std::vector<double> p(rho.registry.mode(k).dim, 0.0);
    for (size_t i = 0; i < rho.registry.total_dim(); i++) {
        auto ii = static_cast<Eigen::Index>(i);
        p[rho.registry.digit(i, k)] += rho.matrix(ii, ii).real();
    }
    return p;
}

double top_level_population(const DensityMatrix &rho) {
    double worst = 0;
    for (size_t k = 0; k < rho.registry.num_modes(); k++) {
        auto p = number_distribution(rho, rho.registry.mode(k).label);
        worst = std::max(worst, p.back());
    }
    return worst;
}

void check_truncation(const DensityMatrix &rho, double threshold) {
    for (size_t k = 0; k < rho.registry.num_modes(); k++) {
        const auto &m = rho.registry.mode(k);
        double top = number_distribution(rho, m.label).back();
        if (top > threshold) {
            throw TruncationError(
                "top Fock level of mode '" + m.label + "' holds population " + std::to_string(top));
        }
    }
}

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep) {
    ModeRegistry kept = rho.registry.subset(keep);
    std::vector<size_t> keep_idx;
    for (const auto &m : kept.modes()) {
        keep_idx.push_back(rho.registry.index_of(m.label));
    }
    auto n_keep = static_cast<Eigen::Index>(kept.total_dim());
    DensityMatrix out{kept, CMatrix::Zero(n_keep, n_keep)};
    size_t total = rho.registry.total_dim();
    // Index of each full basis state within the kept registry, and within the traced part.
    std::vector<size_t> kpart(total), tpart(total);
    for (size_t i = 0; i < total; i++) {
        size_t ki = 0, ti = 0;
        for (size_t m = 0; m < rho.registry.num_modes(); m++) {
            int d = rho.registry.digit(i, m);
            auto it = std::find(keep_idx.begin(), keep_idx.end(), m);
            if (it != keep_idx.end()) {
                ki += kept.stride(static_cast<size_t>(it - keep_idx.begin())) * d;
            } else {
                ti = ti * rho.registry.mode(m).dim + d;
            }
        }
        kpart[i] = ki;
        tpart[i] = ti;
    }
    for (size_t i = 0; i < total; i++) {
        for (size_t j = 0; j < total; j++) {
            if (tpart[i] == tpart[j]) {
                out.matrix(static_cast<Eigen::Index>(kpart[i]), static_cast<Eigen::Index>(kpart[j])) +=
                    rho.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return out;
}

double fidelity(const DensityMatrix &rho, const PureState &target) {
    if (!(rho.registry == target.registry)) {
        throw DimensionMismatch("fidelity: registries differ");
    }
    CVector v = target.amplitudes.normalized();
    return (v.adjoint() * rho.matrix * v)(0, 0).real();
}

double fidelity(const PureState &state, const PureState &target) {
    if (!(state.registry == target.registry)) {
        throw DimensionMismatch("fidelity: registries differ");
    }
    return std::norm(target.amplitudes.normalized().dot(state.amplitudes.normalized()));
}

StateDiagnostics diagnose(const DensityMatrix &rho) {
    StateDiagnostics d{};
    d.hermiticity_error = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    d.trace = trace(rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

static void check_kraus_dims(const KrausOp &k, const ModeRegistry &registry) {
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    if (k.op.rows() != n || k.op.cols() != n) {
        throw DimensionMismatch("Kraus operator '" + k.label + "' does not match the registry dimension");
    }
}

PureKrausResult apply_kraus(const KrausOp &k, const PureState &state) {
    check_kraus_dims(k, state.registry);
    PureState out{state.registry, k.op * state.amplitudes};
    double norm_in = state.amplitudes.squaredNorm();
    double p = norm_in > 0 ? out.amplitudes.squaredNorm() / norm_in : 0.0;
    if (p > 0) {
        out.amplitudes /= std::sqrt(out.amplitudes.squaredNorm());
    } else {
        out.null = true;
        out.normalized = false;
    }
    return {out, p};
}

DensityKrausResult apply_kraus(const KrausOp &k, const DensityMatrix &rho) {
    check_kraus_dims(k, rho.registry);
    CMatrix half = k.op * rho.matrix;
    CMatrix m = k.op * CMatrix(half.adjoint());
    DensityMatrix out{rho.registry, m.adjoint()};
    double tin = trace(rho);
    double p = tin > 0 ? trace(out) / tin : 0.0;
    if (p > 0) {
        out.matrix /= trace(out);
    } else {
        out.null = true;
        p = 0;
    }
    return {out, p};
}

double completeness_error(const std::vector<KrausOp> &set) {
    if (set.empty()) {
        return 1.0;
    }
    CMatrix sum = CMatrix::Zero(set[0].op.rows(), set[0].op.cols());
    for (const auto &k : set) {
        sum += CMatrix(SparseOp(k.op.adjoint()) * k.op);
    }
    sum -= CMatrix::Identity(sum.rows(), sum.cols());
    return sum.cwiseAbs().maxCoeff();
}

CMatrix balanced_splitter() {
    CMatrix s(2, 2);
    double r = 1 / std::sqrt(2.0);
    s << r, r, r, -r;
    return s;
}

namespace {

using Occupation = std::vector<int>;

// Expands prod_j (a_j^dag)^{n_j}/sqrt(n_j!) |0> with a_j^dag -> sum_k S_kj a_k^dag.
std::map<Occupation, Complex> transform_fock_basis(const Occupation &in, const CMatrix &S) {
    size_t m = in.size();
    std::map<Occupation, Complex> terms;
    terms[Occupation(m, 0)] = 1.0;
    double norm = 1;
    for (size_t j = 0; j < m; j++) {
        for (int rep = 0; rep < in[j]; rep++) {
            std::map<Occupation, Complex> next;
            for (const auto &[occ, amp] : terms) {
                for (size_t k = 0; k < m; k++) {
                    Complex s = S(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                    if (s == Complex(0)) {
                        continue;
                    }
                    Occupation o = occ;
                    o[k] += 1;
                    next[o] += amp * s * std::sqrt(double(o[k]));
                }
            }
            terms.swap(next);
            norm *= rep + 1;
        }
    }
    double scale = 1 / std::sqrt(norm);
    for (auto &[occ, amp] : terms) {
        amp *= scale;
    }
    return terms;
}

void check_unitary(const CMatrix &S, size_t m) {
    if (S.rows() != static_cast<Eigen::Index>(m) || S.cols() != static_cast<Eigen::Index>(m)) {
        throw DimensionMismatch("transform size does not match the number of listed modes");
    }
    double err = (S * S.adjoint() - CMatrix::Identity(S.rows(), S.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
        throw NonUnitary("transform deviates from unitarity by " + std::to_string(err));
    }
}

void check_optical(const ModeRegistry &registry, const std::vector<std::string> &labels) {
    for (const auto &l : labels) {
        if (registry.mode(registry.index_of(l)).kind != ModeKind::optical) {
            throw DimensionMismatch("mode '" + l + "' is not optical");
        }
    }
}

struct TransformOperator {
    SparseOp U;
    std::vector<size_t> overflow_columns;
};

TransformOperator build_transform(const ModeRegistry &registry, const std::vector<std::string> &labels, const CMatrix &S) {
    check_unitary(S, labels.size());
    std::vector<size_t> idx;
    for (const auto &l : labels) {
        idx.push_back(registry.index_of(l));
    }
    size_t total = registry.total_dim();
    TransformOperator result;
    std::map<Occupation, std::map<Occupation, Complex>> cache;
    std::vector<Eigen::Triplet<Complex>> trips;
    for (size_t col = 0; col < total; col++) {
        Occupation in(idx.size());
        for (size_t j = 0; j < idx.size(); j++) {
            in[j] = registry.digit(col, idx[j]);
        }
        auto it = cache.find(in);
        if (it == cache.end()) {
            it = cache.emplace(in, transform_fock_basis(in, S)).first;
        }
        size_t base = col;
        for (size_t j = 0; j < idx.size(); j++) {
            base -= registry.stride(idx[j]) * static_cast<size_t>(in[j]);
        }
        std::vector<Eigen::Triplet<Complex>> col_trips;
        bool overflow = false;
        for (const auto &[out, amp] : it->second) {
            if (std::abs(amp) < 1e-15) {
                continue;
            }
            size_t row = base;
            for (size_t j = 0; j < idx.size() && !overflow; j++) {
                if (out[j] >= registry.mode(idx[j]).dim) {
                    overflow = true;
                }
                row += registry.stride(idx[j]) * static_cast<size_t>(out[j]);
            }
            if (overflow) {
                break;
            }
            col_trips.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), amp);
        }
        if (overflow) {
            result.overflow_columns.push_back(col);
        } else {
            trips.insert(trips.end(), col_trips.begin(), col_trips.end());
        }
    }
    auto n = static_cast<Eigen::Index>(total);
    result.U.resize(n, n);
    result.U.setFromTriplets(trips.begin(), trips.end());
    return result;
}

void check_overflow_weight(const TransformOperator &t, const std::function<double(size_t)> &weight) {
    for (size_t col : t.overflow_columns) {
        if (weight(col) > 1e-12) {
            throw TruncationError("linear transform populates levels beyond the mode truncation");
        }
    }
}

}  // namespace

SparseOp mode_transform_operator(const ModeRegistry &registry, const std::vector<std::string> &labels, const CMatrix &S) {
    return build_transform(registry, labels, S).U;
}

PureState linear_mode_transform(const PureState &state, const std::vector<std::string> &labels, const CMatrix &S) {
    TransformOperator t = build_transform(state.registry, labels, S);
    check_overflow_weight(t, [&](size_t c) { return std::norm(state.amplitudes[static_cast<Eigen::Index>(c)]); });
    PureState out = state;
    out.amplitudes = t.U * state.amplitudes;
    return out;
}

DensityMatrix linear_mode_transform(const DensityMatrix &rho, const std::vector<std::string> &labels, const CMatrix &S) {
    TransformOperator t = build_transform(rho.registry, labels, S);
    check_overflow_weight(t, [&](size_t c) {
        auto i = static_cast<Eigen::Index>(c);
        return std::abs(rho.matrix(i, i));
    });
    const SparseOp &U = t.U;
    CMatrix half = U * rho.matrix;
    CMatrix full = U * CMatrix(half.adjoint());
    DensityMatrix out = rho;
    out.matrix = full.adjoint();
    return out;
}

PureState optical_scatter(const PureState &state, const std::vector<std::string> &labels, const CMatrix &S) {
    check_optical(state.registry, labels);
    return linear_mode_transform(state, labels, S);
}

DensityMatrix optical_scatter(const DensityMatrix &rho, const std::vector<std::string> &labels, const CMatrix &S) {
    check_optical(rho.registry, labels);
    return linear_mode_transform(rho, labels, S);
}

std::array<double, 3> click_probabilities(int photons, double eta, double p_d) {
    double miss_all = std::pow(1 - eta, photons);
    double one_real = photons > 0 ? photons * eta * std::pow(1 - eta, photons - 1) : 0.0;
    double c0 = miss_all * (1 - p_d);
    double c1 = one_real * (1 - p_d) + miss_all * p_d;
    double c2 = std::max(0.0, 1 - c0 - c1);
    return {c0, c1, c2};
}

namespace {

struct DetectionLayout {
    ModeRegistry rest;
    std::vector<size_t> det_idx;
    // For each detected photon vector (mixed-radix index), the full-space indices ordered by the rest index.
    std::vector<std::vector<size_t>> blocks;
    std::vector<Occupation> photon_vectors;
};

DetectionLayout make_layout(const ModeRegistry &registry, const std::vector<std::string> &labels) {
    DetectionLayout L;
    std::vector<std::string> rest_labels;
    for (const auto &m : registry.modes()) {
        if (std::find(labels.begin(), labels.end(), m.label) == labels.end()) {
            rest_labels.push_back(m.label);
        }
    }
    for (const auto &l : labels) {
        L.det_idx.push_back(registry.index_of(l));
    }
    if (!rest_labels.empty()) {
        L.rest = registry.subset(rest_labels);
    }
    size_t n_det = 1;
    for (size_t k : L.det_idx) {
        n_det *= static_cast<size_t>(registry.mode(k).dim);
    }
    size_t n_rest = rest_labels.empty() ? 1 : L.rest.total_dim();
    L.blocks.assign(n_det, std::vector<size_t>(n_rest));
    L.photon_vectors.assign(n_det, Occupation(labels.size()));
    for (size_t i = 0; i < registry.total_dim(); i++) {
        size_t d = 0;
        Occupation occ(labels.size());
        for (size_t j = 0; j < L.det_idx.size(); j++) {
            occ[j] = registry.digit(i, L.det_idx[j]);
            d = d * static_cast<size_t>(registry.mode(L.det_idx[j]).dim) + static_cast<size_t>(occ[j]);
        }
        size_t r = 0;
        for (size_t m = 0; m < registry.num_modes(); m++) {
            if (std::find(L.det_idx.begin(), L.det_idx.end(), m) == L.det_idx.end()) {
                r = r * static_cast<size_t>(registry.mode(m).dim) + static_cast<size_t>(registry.digit(i, m));
            }
        }
        L.blocks[d][r] = i;
        L.photon_vectors[d] = occ;
    }
    return L;
}

CMatrix extract_block(const CMatrix &m, const std::vector<size_t> &indices) {
    auto n = static_cast<Eigen::Index>(indices.size());
    CMatrix b(n, n);
    for (Eigen::Index r = 0; r < n; r++) {
        for (Eigen::Index c = 0; c < n; c++) {
            b(r, c) = m(static_cast<Eigen::Index>(indices[r]), static_cast<Eigen::Index>(indices[c]));
        }
    }
    return b;
}

size_t outcome_key(const Occupation &clicks) {
    size_t key = 0;
    for (int c : clicks) {
        key = key * 3 + static_cast<size_t>(c);
    }
    return key;
}

Occupation outcome_from_key(size_t key, size_t n) {
    Occupation c(n);
    for (size_t j = n; j-- > 0;) {
        c[j] = static_cast<int>(key % 3);
        key /= 3;
    }
    return c;
}

}  // namespace

namespace {

// Shared by both overloads; `block(d)` returns the unnormalized conditional
// state of the undetected modes for photon vector d.
template <typename BlockFn>
std::vector<DetectionOutcome> detect_blocks(
    const DetectionLayout &L, size_t n_det, const HeraldModel &model, uint64_t seed, size_t shots, BlockFn block) {
    double eta = model.eta();
    double p_d = model.p_d();
    size_t n_outcomes = 1;
    for (size_t j = 0; j < n_det; j++) {
        n_outcomes *= 3;
    }
    size_t n_rest = L.blocks.empty() ? 1 : L.blocks[0].size();
    auto nr = static_cast<Eigen::Index>(n_rest);

    // Per photon vector: unnormalized conditional block and its weight.
    std::vector<CMatrix> blocks(L.blocks.size());
    std::vector<double> weights(L.blocks.size());
    for (size_t d = 0; d < L.blocks.size(); d++) {
        blocks[d] = block(d);
        weights[d] = blocks[d].trace().real();
    }
    auto per_detector = [&](const Occupation &photons) {
        std::vector<std::array<double, 3>> w(n_det);
        for (size_t j = 0; j < n_det; j++) {
            w[j] = click_probabilities(photons[j], eta, p_d);
        }
        return w;
    };

    std::map<size_t, CMatrix> acc;
    std::map<size_t, double> prob;
    if (n_outcomes <= 10'000) {
        for (size_t d = 0; d < blocks.size(); d++) {
            if (weights[d] <= 0) {
                continue;
            }
            auto w = per_detector(L.photon_vectors[d]);
            for (size_t key = 0; key < n_outcomes; key++) {
                Occupation c = outcome_from_key(key, n_det);
                double p = 1;
                for (size_t j = 0; j < n_det && p > 0; j++) {
                    p *= w[j][static_cast<size_t>(c[j])];
                }
                if (p <= 0) {
                    continue;
                }
                auto it = acc.find(key);
                if (it == acc.end()) {
                    it = acc.emplace(key, CMatrix::Zero(nr, nr)).first;
                }
                it->second += p * blocks[d];
            }
        }
        for (auto &[key, m] : acc) {
            prob[key] = m.trace().real();
        }
    } else {
        // Too many outcomes to enumerate: sample photon vectors, then click classes.
        std::mt19937_64 rng(seed);
        std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
        std::uniform_real_distribution<double> u(0, 1);
        std::map<size_t, size_t> counts;
        for (size_t s = 0; s < shots; s++) {
            size_t d = pick(rng);
            auto w = per_detector(L.photon_vectors[d]);
            Occupation c(n_det);
            for (size_t j = 0; j < n_det; j++) {
                double x = u(rng);
                c[j] = x < w[j][0] ? 0 : (x < w[j][0] + w[j][1] ? 1 : 2);
            }
            counts[outcome_key(c)]++;
        }
        double total_weight = 0;
        for (double w : weights) {
            total_weight += w;
        }
        for (const auto &[key, count] : counts) {
            Occupation c = outcome_from_key(key, n_det);
            CMatrix m = CMatrix::Zero(nr, nr);
            for (size_t d = 0; d < blocks.size(); d++) {
                if (weights[d] <= 0) {
                    continue;
                }
                auto w = per_detector(L.photon_vectors[d]);
                double p = 1;
                for (size_t j = 0; j < n_det; j++) {
                    p *= w[j][static_cast<size_t>(c[j])];
                }
                m += p * blocks[d];
            }
            acc[key] = m;
            prob[key] = total_weight * double(count) / double(shots);
        }
    }

    std::vector<DetectionOutcome> out;
    for (auto &[key, m] : acc) {
        double p = prob[key];
        if (p <= 0) {
            continue;
        }
        DetectionOutcome o;
        o.clicks = outcome_from_key(key, n_det);
        o.probability = p;
        ModeRegistry reg = L.rest.num_modes() ? L.rest : ModeRegistry();
        double tr = m.trace().real();
        o.state = DensityMatrix{reg, tr > 0 ? CMatrix(m / tr) : m};
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace

std::vector<DetectionOutcome> detect_photon_number(
    const DensityMatrix &rho,
    const std::vector<std::string> &labels,
    const HeraldModel &model,
    uint64_t seed,
    size_t shots) {
    check_optical(rho.registry, labels);
    DetectionLayout L = make_layout(rho.registry, labels);
    return detect_blocks(L, labels.size(), model, seed, shots, [&](size_t d) {
        return extract_block(rho.matrix, L.blocks[d]);
    });
}

std::vector<DetectionOutcome> detect_photon_number(
    const PureState &state,
    const std::vector<std::string> &labels,
    const HeraldModel &model,
    uint64_t seed,
    size_t shots) {
    check_optical(state.registry, labels);
    DetectionLayout L = make_layout(state.registry, labels);
    return detect_blocks(L, labels.size(), model, seed, shots, [&](size_t d) {
        const auto &idx = L.blocks[d];
        CVector v(static_cast<Eigen::Index>(idx.size()));
        for (size_t r = 0; r < idx.size(); r++) {
            v[static_cast<Eigen::Index>(r)] = state.amplitudes[static_cast<Eigen::Index>(idx[r])];
        }
        return CMatrix(v * v.adjoint());
    });
}

nlohmann::json to_json(const DensityMatrix &rho) {
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const auto &m : rho.registry.modes()) {
        j["modes"].push_back({{"label", m.label}, {"dim", m.dim}});
    }
    nlohmann::json flat = nlohmann::json::array();
    for (Eigen::Index r = 0; r < rho.matrix.rows(); r++) {
        for (Eigen::Index c = 0; c < rho.matrix.cols(); c++) {
            flat.push_back({rho.matrix(r, c).real(), rho.matrix(r, c).imag()});
        }
    }
    j["matrix"] = flat;
    return j;
}

}  // namespace omcache::fock
