#include <gtest/gtest.h>

#include <cmath>

#include "omcache/errors.h"
#include "omcache/fock.h"

using namespace omcache;
using namespace omcache::fock;

namespace {

ModeRegistry two_optical(int dim = 3) {
    return ModeRegistry({{"a", dim, ModeKind::optical}, {"b", dim, ModeKind::optical}});
}

}  // namespace

TEST(Registry, RejectsDuplicateLabelsAndTinyDims) {
    EXPECT_THROW(ModeRegistry({{"a", 2}, {"a", 3}}), std::invalid_argument);
    EXPECT_THROW(ModeRegistry({{"a", 1}}), std::invalid_argument);
}

TEST(Registry, FirstModeIsMostSignificant) {
    ModeRegistry r({{"x", 2}, {"y", 3}});
    EXPECT_EQ(r.total_dim(), 6u);
    EXPECT_EQ(r.basis_index({1, 2}), 5u);
    EXPECT_EQ(r.digits(4), (std::vector<int>{1, 1}));
}

TEST(Thermal, VacuumAtZeroTemperature) {
    ModeRegistry r({{"b", 4, ModeKind::acoustic}});
    auto rho = make_thermal_state(r, "b", 0.0);
    EXPECT_NEAR(mode_population(rho, "b"), 0.0, 1e-15);
    EXPECT_NEAR(trace(rho), 1.0, 1e-15);
}

TEST(Thermal, MeanPopulationMatches) {
    ModeRegistry big({{"b", 60, ModeKind::acoustic}});
    EXPECT_NEAR(mode_population(make_thermal_state(big, "b", 3.7), "b"), 3.7, 1e-3);
    ModeRegistry small({{"b", 10, ModeKind::acoustic}});
    EXPECT_NEAR(mode_population(make_thermal_state(small, "b", 0.1), "b"), 0.1, 1e-6);
}

TEST(Thermal, TailTooHeavyThrows) {
    ModeRegistry r({{"b", 5, ModeKind::acoustic}});
    EXPECT_THROW(make_thermal_state(r, "b", 3.7), TruncationError);
}

TEST(Kraus, IdentityKeepsState) {
    ModeRegistry r = two_optical();
    auto s = basis_state(r, {1, 2});
    auto [out, p] = apply_kraus(KrausOp{identity_op(r), "id"}, s);
    EXPECT_NEAR(p, 1.0, 1e-15);
    EXPECT_NEAR(fidelity(out, s), 1.0, 1e-15);
    auto rho = to_density(s);
    auto [rout, rp] = apply_kraus(KrausOp{identity_op(r), "id"}, rho);
    EXPECT_NEAR(rp, 1.0, 1e-15);
    EXPECT_NEAR(fidelity(rout, s), 1.0, 1e-15);
}

TEST(Kraus, ZeroBranchIsNull) {
    ModeRegistry r = two_optical();
    auto [out, p] = apply_kraus(KrausOp{annihilation(r, "a"), "a"}, vacuum_state(r));
    EXPECT_EQ(p, 0.0);
    EXPECT_TRUE(out.null);
}

TEST(Kraus, DimensionMismatch) {
    ModeRegistry r = two_optical();
    ModeRegistry other({{"a", 2}});
    EXPECT_THROW(apply_kraus(KrausOp{identity_op(other), "id"}, vacuum_state(r)), DimensionMismatch);
}

TEST(Scatter, IdentityLeavesStateUnchanged) {
    ModeRegistry r = two_optical();
    auto s = basis_state(r, {2, 1});
    auto out = optical_scatter(s, {"a", "b"}, CMatrix::Identity(2, 2));
    EXPECT_NEAR(fidelity(out, s), 1.0, 1e-14);
}

TEST(Scatter, SinglePhotonSplits) {
    ModeRegistry r = two_optical();
    auto out = optical_scatter(basis_state(r, {1, 0}), {"a", "b"}, balanced_splitter());
    double h = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(out.amplitudes[r.basis_index({1, 0})] - Complex(h)), 0, 1e-14);
    EXPECT_NEAR(std::abs(out.amplitudes[r.basis_index({0, 1})] - Complex(h)), 0, 1e-14);
}

TEST(Scatter, HongOuMandel) {
    ModeRegistry r = two_optical();
    auto out = optical_scatter(basis_state(r, {1, 1}), {"a", "b"}, balanced_splitter());
    double h = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(out.amplitudes[r.basis_index({1, 1})]), 0, 1e-14);
    EXPECT_NEAR(std::abs(out.amplitudes[r.basis_index({2, 0})] - Complex(h)), 0, 1e-14);
    EXPECT_NEAR(std::abs(out.amplitudes[r.basis_index({0, 2})] + Complex(h)), 0, 1e-14);
}

TEST(Scatter, PreservesPhotonNumberAndPurity) {
    ModeRegistry r = two_optical(4);
    CMatrix S(2, 2);
    double th = 0.3;
    S << std::cos(th), Complex(0, std::sin(th)), Complex(0, std::sin(th)), std::cos(th);
    auto rho = to_density(basis_state(r, {2, 1}));
    auto out = optical_scatter(rho, {"a", "b"}, S);
    EXPECT_NEAR(mode_population(out, "a") + mode_population(out, "b"), 3.0, 1e-12);
    EXPECT_NEAR((out.matrix * out.matrix).trace().real(), 1.0, 1e-12);
}

TEST(Scatter, ErrorsOnNonUnitaryAndAcoustic) {
    ModeRegistry r = two_optical();
    CMatrix S = CMatrix::Identity(2, 2) * 1.1;
    EXPECT_THROW(optical_scatter(vacuum_state(r), {"a", "b"}, S), NonUnitary);
    ModeRegistry m({{"a", 3}, {"b", 3, ModeKind::acoustic}});
    EXPECT_THROW(optical_scatter(vacuum_state(m), {"a", "b"}, balanced_splitter()), DimensionMismatch);
}

TEST(Scatter, OverflowThrows) {
    ModeRegistry r = two_optical(2);
    EXPECT_THROW(optical_scatter(basis_state(r, {1, 1}), {"a", "b"}, balanced_splitter()), TruncationError);
}

TEST(Detect, VacuumNoDark) {
    ModeRegistry r = two_optical();
    auto out = detect_photon_number(vacuum_state(r), {"a", "b"}, HeraldModel::ideal());
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].clicks, (std::vector<int>{0, 0}));
    EXPECT_NEAR(out[0].probability, 1.0, 1e-15);
}

TEST(Detect, SinglePhotonThinning) {
    ModeRegistry r({{"a", 3}});
    auto out = detect_photon_number(basis_state(r, {1}), {"a"}, HeraldModel::from_eta(0.9));
    ASSERT_EQ(out.size(), 2u);
    for (const auto &o : out) {
        EXPECT_NEAR(o.probability, o.clicks[0] == 1 ? 0.9 : 0.1, 1e-14);
    }
}

TEST(Detect, DarkCountProbability) {
    ModeRegistry r = two_optical();
    auto out = detect_photon_number(vacuum_state(r), {"a", "b"}, HeraldModel::from_eta(1.0, 4e-7));
    double p_a = 0, total = 0;
    for (const auto &o : out) {
        total += o.probability;
        if (o.clicks[0] == 1) {
            p_a += o.probability;
        }
    }
    EXPECT_NEAR(p_a, 4e-7, 1e-20);
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Detect, ConditionalStateOfUndetectedMode) {
    // |1,0> + |0,1> on (a, c): a click on a leaves c in vacuum.
    ModeRegistry r({{"a", 2}, {"c", 2, ModeKind::acoustic}});
    PureState s{r, CVector::Zero(4)};
    s.amplitudes[r.basis_index({1, 0})] = 1 / std::sqrt(2.0);
    s.amplitudes[r.basis_index({0, 1})] = 1 / std::sqrt(2.0);
    auto out = detect_photon_number(s, {"a"}, HeraldModel::from_eta(0.5));
    double total = 0;
    for (const auto &o : out) {
        total += o.probability;
        if (o.clicks[0] == 1) {
            EXPECT_NEAR(o.probability, 0.25, 1e-14);
            EXPECT_NEAR(mode_population(o.state, "c"), 0.0, 1e-14);
        } else {
            EXPECT_NEAR(o.probability, 0.75, 1e-14);
            EXPECT_NEAR(mode_population(o.state, "c"), 2.0 / 3.0, 1e-14);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Detect, ManyDetectorsFallBackToSampling) {
    std::vector<Mode> modes;
    std::vector<std::string> labels;
    for (int i = 0; i < 9; i++) {
        modes.push_back({"d" + std::to_string(i), 2});
        labels.push_back(modes.back().label);
    }
    ModeRegistry r(modes);
    std::vector<int> occ(9, 0);
    occ[0] = 1;
    auto a = detect_photon_number(to_density(basis_state(r, occ)), labels, HeraldModel::from_eta(0.5), 7, 20000);
    auto b = detect_photon_number(to_density(basis_state(r, occ)), labels, HeraldModel::from_eta(0.5), 7, 20000);
    ASSERT_EQ(a.size(), b.size());
    double total = 0;
    for (size_t i = 0; i < a.size(); i++) {
        EXPECT_EQ(a[i].probability, b[i].probability);
        total += a[i].probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PartialTrace, KeepsMarginal) {
    ModeRegistry r({{"a", 2}, {"b", 3}});
    PureState s{r, CVector::Zero(6)};
    s.amplitudes[r.basis_index({1, 0})] = std::sqrt(0.3);
    s.amplitudes[r.basis_index({0, 2})] = std::sqrt(0.7);
    auto red = partial_trace(to_density(s), {"b"});
    EXPECT_EQ(red.registry.total_dim(), 3u);
    EXPECT_NEAR(red.matrix(0, 0).real(), 0.3, 1e-15);
    EXPECT_NEAR(red.matrix(2, 2).real(), 0.7, 1e-15);
    EXPECT_NEAR(std::abs(red.matrix(0, 2)), 0.0, 1e-15);
}

TEST(Diagnostics, ValidState) {
    ModeRegistry r({{"b", 20, ModeKind::acoustic}});
    auto d = diagnose(make_thermal_state(r, "b", 0.5));
    EXPECT_LT(d.hermiticity_error, 1e-12);
    EXPECT_NEAR(d.trace, 1.0, 1e-12);
    EXPECT_GT(d.min_eigenvalue, -1e-12);
}

TEST(Json, FlattenedPairs) {
    ModeRegistry r({{"a", 2}});
    auto j = to_json(to_density(basis_state(r, {1})));
    EXPECT_EQ(j["modes"][0]["label"], "a");
    EXPECT_EQ(j["matrix"].size(), 4u);
    EXPECT_EQ(j["matrix"][3][0], 1.0);
}
