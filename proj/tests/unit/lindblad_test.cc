#include <gtest/gtest.h>

#include <cmath>

#include "omcache/errors.h"
#include "omcache/lindblad.h"

using namespace omcache;
using namespace omcache::fock;
using namespace omcache::lindblad;

TEST(Evolve, SinglePhotonDecay) {
    ModeRegistry r({{"a", 3}});
    double kappa = 2.0;
    LindbladSpec spec{r, {}, {damping(r, "a", kappa)}};
    std::vector<double> times{0, 0.1, 0.5, 1.0, 2.0};
    auto out = evolve(spec, to_density(basis_state(r, {1})), times);
    for (size_t k = 0; k < times.size(); k++) {
        EXPECT_NEAR(mode_population(out[k], "a"), std::exp(-kappa * times[k]), 1e-6);
    }
}

TEST(Evolve, BeamSplitterConservesExcitations) {
    ModeRegistry r({{"a", 4}, {"b", 4, ModeKind::acoustic}});
    LindbladSpec spec{r, {beam_splitter_term(r, "a", "b", constant(1.3))}, {}};
    std::vector<double> times{0, 0.3, 0.9, 1.7};
    EvolveOptions opt;
    opt.check_truncation = false;
    auto out = evolve(spec, to_density(basis_state(r, {0, 2})), times, opt);
    for (const auto &rho : out) {
        EXPECT_NEAR(mode_population(rho, "a") + mode_population(rho, "b"), 2.0, 1e-8);
        auto d = diagnose(rho);
        EXPECT_NEAR(d.trace, 1.0, 1e-8);
        EXPECT_GT(d.min_eigenvalue, -1e-7);
    }
}

TEST(Evolve, SqueezingConservesDifference) {
    ModeRegistry r({{"a", 8}, {"b", 8, ModeKind::acoustic}});
    LindbladSpec spec{r, {squeezing_term(r, "a", "b", constant(0.2))}, {}};
    auto out = evolve(spec, to_density(vacuum_state(r)), {0, 0.5, 1.0});
    for (const auto &rho : out) {
        EXPECT_NEAR(mode_population(rho, "a") - mode_population(rho, "b"), 0.0, 1e-8);
    }
    // Lossless two-mode squeezing: n = sinh^2(G t).
    EXPECT_NEAR(mode_population(out[2], "b"), std::pow(std::sinh(0.2), 2), 1e-6);
}

TEST(Evolve, ThermalBathRelaxes) {
    ModeRegistry r({{"b", 25, ModeKind::acoustic}});
    LindbladSpec spec{r, {}, thermal_damping(r, "b", 1.0, 0.5)};
    auto out = evolve(spec, to_density(vacuum_state(r)), {0, 1.0, 3.0});
    EXPECT_NEAR(mode_population(out[1], "b"), 0.5 * (1 - std::exp(-1.0)), 1e-6);
    EXPECT_NEAR(mode_population(out[2], "b"), 0.5 * (1 - std::exp(-3.0)), 1e-6);
}

TEST(Evolve, TruncationDetected) {
    ModeRegistry r({{"a", 3}, {"b", 3, ModeKind::acoustic}});
    LindbladSpec spec{r, {squeezing_term(r, "a", "b", constant(1.0))}, {}};
    EXPECT_THROW(evolve(spec, to_density(vacuum_state(r)), {0, 2.0}), TruncationError);
}

TEST(Evolve, NegativeRateRejected) {
    ModeRegistry r({{"a", 3}});
    LindbladSpec spec{r, {}, {damping(r, "a", -1.0)}};
    EXPECT_THROW(evolve(spec, to_density(vacuum_state(r)), {0, 1.0}), std::invalid_argument);
}

TEST(Counting, BlocksSumToFullEvolution) {
    ModeRegistry r({{"a", 5}, {"b", 5, ModeKind::acoustic}});
    LindbladSpec spec{r, {squeezing_term(r, "a", "b", constant(0.3))}, {damping(r, "a", 4.0), damping(r, "a", 1.0)}};
    auto rho0 = to_density(vacuum_state(r));
    std::vector<double> times{0, 2.0};
    EvolveOptions opt;
    opt.check_truncation = false;
    auto full = evolve(spec, rho0, times, opt);
    auto counted = evolve_counting(spec, 0, 3, rho0, times, opt);
    CMatrix sum = CMatrix::Zero(25, 25);
    for (const auto &b : counted[1]) {
        sum += b;
    }
    EXPECT_LT((sum - full[1].matrix).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Counting, SinglePhotonEmission) {
    ModeRegistry r({{"a", 3}});
    LindbladSpec spec{r, {}, {damping(r, "a", 3.0), damping(r, "a", 1.0)}};
    auto counted = evolve_counting(spec, 0, 2, to_density(basis_state(r, {1})), {0, 20.0});
    EXPECT_NEAR(counted[1][1].trace().real(), 0.75, 1e-7);
    EXPECT_NEAR(counted[1][0].trace().real(), 0.25, 1e-7);
    EXPECT_NEAR(counted[1][2].trace().real(), 0.0, 1e-12);
}
