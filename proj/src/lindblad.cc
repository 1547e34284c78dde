#include "omcache/lindblad.h"

#include <stdexcept>

#include "omcache/errors.h"

namespace omcache::lindblad {

namespace {

struct PreparedTerm {
    CoefficientFn coefficient;
    SparseOp op;
    SparseOp op_dag;
};

struct PreparedCollapse {
    SparseOp L;      // sqrt(rate) * op
    SparseOp L_dag;
    SparseOp LdL;
};

struct Prepared {
    std::vector<PreparedTerm> h;
    std::vector<PreparedCollapse> c;
    Eigen::Index n;
};

Prepared prepare(const LindbladSpec &spec) {
    spec.validate();
    Prepared p;
    p.n = static_cast<Eigen::Index>(spec.registry.total_dim());
    for (const auto &t : spec.hamiltonian) {
        p.h.push_back({t.coefficient, t.op, SparseOp(t.op.adjoint())});
    }
    for (const auto &c : spec.collapse) {
        SparseOp L = c.op * Complex(std::sqrt(c.rate));
        SparseOp Ld = L.adjoint();
        SparseOp LdL = Ld * L;
        p.c.push_back({L, Ld, LdL});
    }
    return p;
}

// d rho/dt without the jump term of collapse `skip` (none if skip >= size).
void liouvillian(const Prepared &p, const CMatrix &rho, CMatrix &out, double t, size_t skip) {
    out.setZero();
    // -i [H, rho] with H = sum c O + conj(c) O^dag
    CMatrix hrho = CMatrix::Zero(p.n, p.n);
    for (const auto &term : p.h) {
        Complex c = term.coefficient(t);
        if (c == Complex(0)) {
            continue;
        }
        hrho.noalias() += c * (term.op * rho);
        hrho.noalias() += std::conj(c) * (term.op_dag * rho);
    }
    // rho is Hermitian, so rho H = (H rho)^dag
    out += Complex(0, -1) * hrho;
    out += Complex(0, 1) * hrho.adjoint();
    for (size_t k = 0; k < p.c.size(); k++) {
        const auto &c = p.c[k];
        CMatrix anti = c.LdL * rho;
        out -= 0.5 * anti;
        out -= 0.5 * anti.adjoint();
        if (k != skip) {
            CMatrix lr = c.L * rho;
            out.noalias() += CMatrix(c.L * CMatrix(lr.adjoint())).adjoint();
        }
    }
}

void check_top_levels(const ModeRegistry &reg, const CMatrix &m, double threshold) {
    DensityMatrix rho{reg, m};
    double tr = trace(rho);
    for (size_t k = 0; k < reg.num_modes(); k++) {
        double top = fock::number_distribution(rho, reg.mode(k).label).back();
        if (tr > 0 && top / tr > threshold) {
            throw TruncationError(
                "top Fock level of mode '" + reg.mode(k).label + "' reached population " + std::to_string(top / tr));
        }
    }
}

OdeOptions ode_options(const EvolveOptions &o) {
    OdeOptions opt;
    opt.rel_tol = o.rel_tol;
    opt.abs_tol = o.abs_tol;
    opt.max_step = o.max_step;
    return opt;
}

using CMap = Eigen::Map<CMatrix>;
using ConstCMap = Eigen::Map<const CMatrix>;

}  // namespace

void LindbladSpec::validate() const {
    auto n = static_cast<Eigen::Index>(registry.total_dim());
    for (const auto &t : hamiltonian) {
        if (t.op.rows() != n || t.op.cols() != n) {
            throw DimensionMismatch("Hamiltonian term '" + t.label + "' does not match the registry");
        }
        if (!t.coefficient) {
            throw std::invalid_argument("Hamiltonian term '" + t.label + "' lacks a coefficient");
        }
    }
    for (const auto &c : collapse) {
        if (c.op.rows() != n || c.op.cols() != n) {
            throw DimensionMismatch("collapse term '" + c.label + "' does not match the registry");
        }
        if (!(c.rate >= 0)) {
            throw std::invalid_argument("collapse term '" + c.label + "' has a negative rate");
        }
    }
}

CoefficientFn constant(Complex c) {
    return [c](double) { return c; };
}

HamiltonianTerm beam_splitter_term(
    const ModeRegistry &reg, const std::string &optical, const std::string &acoustic, CoefficientFn c) {
    SparseOp op = fock::annihilation(reg, optical) * fock::creation(reg, acoustic);
    return {std::move(c), op, optical + "*" + acoustic + "^dag"};
}

HamiltonianTerm squeezing_term(
    const ModeRegistry &reg, const std::string &optical, const std::string &acoustic, CoefficientFn c) {
    SparseOp op = fock::creation(reg, optical) * fock::creation(reg, acoustic);
    return {std::move(c), op, optical + "^dag*" + acoustic + "^dag"};
}

CollapseTerm damping(const ModeRegistry &reg, const std::string &label, double rate) {
    return {rate, fock::annihilation(reg, label), "loss:" + label};
}

std::vector<CollapseTerm> thermal_damping(const ModeRegistry &reg, const std::string &label, double rate, double n_th) {
    std::vector<CollapseTerm> out;
    out.push_back({rate * (n_th + 1), fock::annihilation(reg, label), "loss:" + label});
    if (n_th > 0) {
        out.push_back({rate * n_th, fock::creation(reg, label), "gain:" + label});
    }
    return out;
}

std::vector<DensityMatrix> evolve(
    const LindbladSpec &spec, const DensityMatrix &rho0, const std::vector<double> &times, const EvolveOptions &options) {
    if (!(rho0.registry == spec.registry)) {
        throw DimensionMismatch("initial state registry differs from the master-equation registry");
    }
    Prepared p = prepare(spec);
    Eigen::Index n = p.n;
    RealVector x0(2 * n * n);
    CMap(reinterpret_cast<Complex *>(x0.data()), n, n) = rho0.matrix;
    CMatrix rho(n, n), drho(n, n);
    OdeRhs rhs = [&](const RealVector &x, RealVector &dx, double t) {
        rho = ConstCMap(reinterpret_cast<const Complex *>(x.data()), n, n);
        liouvillian(p, rho, drho, t, p.c.size());
        CMap(reinterpret_cast<Complex *>(dx.data()), n, n) = drho;
    };
    auto states = integrate_at(rhs, x0, times, ode_options(options));
    std::vector<DensityMatrix> out;
    out.reserve(states.size());
    for (const auto &x : states) {
        CMatrix m = ConstCMap(reinterpret_cast<const Complex *>(x.data()), n, n);
        m = 0.5 * (m + CMatrix(m.adjoint()));
        if (options.check_truncation) {
            check_top_levels(spec.registry, m, options.truncation_threshold);
        }
        out.push_back(DensityMatrix{spec.registry, m});
    }
    return out;
}

std::vector<std::vector<CMatrix>> evolve_counting(
    const LindbladSpec &spec,
    size_t counted_term,
    size_t max_count,
    const DensityMatrix &rho0,
    const std::vector<double> &times,
    const EvolveOptions &options) {
    if (!(rho0.registry == spec.registry)) {
        throw DimensionMismatch("initial state registry differs from the master-equation registry");
    }
    if (counted_term >= spec.collapse.size()) {
        throw std::invalid_argument("counted collapse term index out of range");
    }
    Prepared p = prepare(spec);
    Eigen::Index n = p.n;
    auto blocks = static_cast<Eigen::Index>(max_count + 1);
    Eigen::Index block_size = 2 * n * n;
    RealVector x0 = RealVector::Zero(blocks * block_size);
    CMap(reinterpret_cast<Complex *>(x0.data()), n, n) = rho0.matrix;
    const auto &C = p.c[counted_term];
    CMatrix rho(n, n), drho(n, n), prev_jump(n, n);
    OdeRhs rhs = [&](const RealVector &x, RealVector &dx, double t) {
        prev_jump.setZero();
        for (Eigen::Index k = 0; k < blocks; k++) {
            rho = ConstCMap(reinterpret_cast<const Complex *>(x.data() + k * block_size), n, n);
            liouvillian(p, rho, drho, t, counted_term);
            drho += prev_jump;
            CMatrix lr = C.L * rho;
            CMatrix jump = CMatrix(C.L * CMatrix(lr.adjoint())).adjoint();
            if (k == blocks - 1) {
                drho += jump;
            }
            prev_jump = jump;
            CMap(reinterpret_cast<Complex *>(dx.data() + k * block_size), n, n) = drho;
        }
    };
    auto states = integrate_at(rhs, x0, times, ode_options(options));
    std::vector<std::vector<CMatrix>> out;
    for (const auto &x : states) {
        std::vector<CMatrix> row;
        CMatrix total = CMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < blocks; k++) {
            CMatrix m = ConstCMap(reinterpret_cast<const Complex *>(x.data() + k * block_size), n, n);
            m = 0.5 * (m + CMatrix(m.adjoint()));
            total += m;
            row.push_back(std::move(m));
        }
        if (options.check_truncation) {
            check_top_levels(spec.registry, total, options.truncation_threshold);
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace omcache::lindblad
