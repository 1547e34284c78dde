#include "omcache/dual_rail.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "omcache/errors.h"
#include "omcache/lindblad.h"

namespace omcache {

using namespace fock;

namespace {

void check_inputs(double Gamma, double n_th) {
    if (!(Gamma > 0)) {
        throw std::invalid_argument("Gamma must be positive");
    }
    if (!(n_th >= 0)) {
        throw std::invalid_argument("n_th must be non-negative");
    }
}

int rail_dim(double n_th) {
    return std::max(6, thermal_dim(n_th, 1e-8) + 3);
}

// The two rails evolve under identical independent channels E, so the joint state
// is assembled from E(|0><0|), E(|1><1|) and E(|1><0| + |0><1|) on one mode.
struct RailMoments {
    double p00, p01;  // <0|E(|0><0|)|0>, <1|E(|0><0|)|1>
    double p10, p11;  // <0|E(|1><1|)|0>, <1|E(|1><1|)|1>
    double coherence; // <1|E(|1><0|)|0>
};

class RailEvolution {
   public:
    explicit RailEvolution(double n_th) : reg_({{"b", rail_dim(n_th), ModeKind::acoustic}}) {
        // Explicit steps must stay inside the stability region of the fastest decay, (2 n_th + 1) * dim.
        max_step_ = 2.0 / ((2 * n_th + 1) * reg_.total_dim());
        spec_ = lindblad::LindbladSpec{reg_, {}, lindblad::thermal_damping(reg_, "b", 1.0, n_th)};
        auto d = static_cast<Eigen::Index>(reg_.total_dim());
        start_[0] = DensityMatrix{reg_, CMatrix::Zero(d, d)};
        start_[0].matrix(0, 0) = 1;
        start_[1] = DensityMatrix{reg_, CMatrix::Zero(d, d)};
        start_[1].matrix(1, 1) = 1;
        start_[2] = DensityMatrix{reg_, CMatrix::Zero(d, d)};
        start_[2].matrix(1, 0) = 1;
        start_[2].matrix(0, 1) = 1;
    }

    // Moments at each time (in units of 1/Gamma), evolving from the given starting operators at t0.
    std::vector<RailMoments> run(const std::vector<double> &times) const {
        std::vector<double> grid{0.0};
        grid.insert(grid.end(), times.begin(), times.end());
        lindblad::EvolveOptions opt;
        opt.rel_tol = 1e-9;
        opt.abs_tol = 1e-13;
        opt.max_step = max_step_;
        std::vector<std::vector<DensityMatrix>> runs;
        for (int k = 0; k < 3; k++) {
            opt.check_truncation = k < 2;
            runs.push_back(lindblad::evolve(spec_, start_[k], grid, opt));
        }
        std::vector<RailMoments> out;
        for (size_t i = 1; i < grid.size(); i++) {
            RailMoments m;
            m.p00 = runs[0][i].matrix(0, 0).real();
            m.p01 = runs[0][i].matrix(1, 1).real();
            m.p10 = runs[1][i].matrix(0, 0).real();
            m.p11 = runs[1][i].matrix(1, 1).real();
            m.coherence = runs[2][i].matrix(1, 0).real();
            out.push_back(m);
        }
        return out;
    }

   private:
    ModeRegistry reg_;
    lindblad::LindbladSpec spec_;
    DensityMatrix start_[3];
    double max_step_;
};

double bit_flip(const RailMoments &m) {
    double stay = m.p11 * m.p00;  // |10> remains |10>
    double flip = m.p10 * m.p01;  // |10> becomes |01>
    double dr = stay + flip;
    return dr > 0 ? flip / dr : 0.0;
}

double phase_flip(const RailMoments &m) {
    double diag = 0.5 * (m.p11 * m.p00 + m.p10 * m.p01);
    double off = 0.5 * m.coherence * m.coherence;
    return diag > 0 ? 0.5 * (diag - off) / diag : 0.0;
}

// First time (units of 1/Gamma) at which f crosses the threshold; infinity if never.
double crossing_time(const RailEvolution &rail, const std::function<double(const RailMoments &)> &f) {
    // Scan one decade at a time so the integration never runs far past the crossing.
    double lo = 0, hi = 0;
    for (int decade = -5; decade < 4 && hi == 0; decade++) {
        std::vector<double> grid;
        for (int k = 0; k <= 20; k++) {
            grid.push_back(std::pow(10.0, decade + k / 20.0));
        }
        auto moments = rail.run(grid);
        for (size_t k = 0; k < grid.size(); k++) {
            if (f(moments[k]) >= kFlipThreshold) {
                if (k == 0 && decade == -5) {
                    return grid[0];
                }
                lo = k == 0 ? grid[0] / std::pow(10.0, 0.05) : grid[k - 1];
                hi = grid[k];
                break;
            }
        }
    }
    if (hi == 0) {
        return std::numeric_limits<double>::infinity();
    }
    // Two passes of a fine grid inside the bracket, then linear interpolation.
    for (int pass = 0; pass < 2; pass++) {
        std::vector<double> grid;
        for (int k = 1; k <= 40; k++) {
            grid.push_back(lo + (hi - lo) * k / 40);
        }
        auto moments = rail.run(grid);
        double prev_t = lo;
        for (size_t k = 0; k < grid.size(); k++) {
            if (f(moments[k]) >= kFlipThreshold) {
                lo = prev_t;
                hi = grid[k];
                break;
            }
            prev_t = grid[k];
        }
    }
    auto ends = rail.run({lo, hi});
    double f_lo = f(ends[0]), f_hi = f(ends[1]);
    return f_hi > f_lo ? lo + (hi - lo) * (kFlipThreshold - f_lo) / (f_hi - f_lo) : hi;
}

}  // namespace

double bit_flip_probability(double Gamma, double n_th, double t) {
    check_inputs(Gamma, n_th);
    if (t <= 0 || n_th == 0) {
        return 0.0;
    }
    return bit_flip(RailEvolution(n_th).run({Gamma * t})[0]);
}

double phase_flip_probability(double Gamma, double n_th, double t) {
    check_inputs(Gamma, n_th);
    if (t <= 0) {
        return 0.0;
    }
    return phase_flip(RailEvolution(n_th).run({Gamma * t})[0]);
}

double leak_rate_numeric(double Gamma, double n_th) {
    check_inputs(Gamma, n_th);
    // Two-mode evolution in units of 1/Gamma over a short window.
    ModeRegistry reg({{"r0", 5, ModeKind::acoustic}, {"r1", 5, ModeKind::acoustic}});
    auto c0 = lindblad::thermal_damping(reg, "r0", 1.0, n_th);
    auto c1 = lindblad::thermal_damping(reg, "r1", 1.0, n_th);
    c0.insert(c0.end(), c1.begin(), c1.end());
    lindblad::LindbladSpec spec{reg, {}, c0};
    double t = 1e-3 / (4 * n_th + 1);
    lindblad::EvolveOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-15;
    auto out = lindblad::evolve(spec, to_density(basis_state(reg, {1, 0})), {0.0, t}, opt);
    const auto &m = out[1].matrix;
    double p_dr = m(reg.basis_index({1, 0}), reg.basis_index({1, 0})).real() +
                  m(reg.basis_index({0, 1}), reg.basis_index({0, 1})).real();
    return -std::log(p_dr) / t * Gamma;
}

DualRailRates dual_rail_lifetimes(double Gamma, double n_th) {
    check_inputs(Gamma, n_th);
    DualRailRates r;
    r.loss_rate = (n_th + 1) * Gamma;
    r.gain_rate = n_th * Gamma;
    r.heating_rate = 2 * n_th * Gamma;
    r.tau_leak = 1 / (r.loss_rate + r.gain_rate + r.heating_rate);
    r.tau_leak_numeric = 1 / leak_rate_numeric(Gamma, n_th);
    if (n_th > 0) {
        RailEvolution rail(n_th);
        r.tau_X = crossing_time(rail, bit_flip) / Gamma;
        r.tau_Z = crossing_time(rail, phase_flip) / Gamma;
    }
    r.bias = (std::isinf(r.tau_X) && std::isinf(r.tau_Z)) ? 1.0 : r.tau_X / r.tau_Z;
    return r;
}

}  // namespace omcache
