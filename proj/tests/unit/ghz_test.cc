#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omcache/errors.h"
#include "omcache/ghz.h"
#include "omcache/herald.h"

using namespace omcache;
using namespace omcache::ghz;

TEST(Network, SizeLimitsAndLabels) {
    EXPECT_THROW(Network(1), std::invalid_argument);
    EXPECT_THROW(Network(13), ComplexityLimit);
    Network net(3);
    EXPECT_EQ(net.modes(), 6);
    EXPECT_EQ(net.labels()[Network::index(1, 0)], "[2,0]");
}

TEST(Network, ScatteringMatrixIsOrthogonal) {
    for (int n : {2, 3, 4}) {
        Network net(n);
        const auto &S = net.S();
        EXPECT_LT((S * S.transpose() - Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm(), 1e-12);
    }
    Network two(2);
    EXPECT_NEAR(two.S()(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(two.S()(0, 1), -0.5, 1e-15);
}

TEST(Network, DetectorPairsWrapAround) {
    Network net(3);
    auto pair = net.detector_pair(2);
    EXPECT_EQ(pair[0], Network::index(2, 1));
    EXPECT_EQ(pair[1], Network::index(0, 0));
    EXPECT_EQ(net.sign_of_detector(Network::index(2, 1)), 1);
    EXPECT_EQ(net.sign_of_detector(Network::index(0, 0)), -1);
}

TEST(Classify, CompleteRecordNeedsOneClickPerPair) {
    Network net(2);
    // Pair 0 holds detectors [1,1] and [2,0]; pair 1 holds [2,1] and [1,0].
    auto r = classify(net, {0, 1, 0, 1});
    EXPECT_EQ(r.cls, RecordClass::complete);
    EXPECT_EQ(r.detections, 2);
    EXPECT_STREQ(to_string(r.cls), "complete");
    EXPECT_EQ(classify(net, {0, 1, 0, 0}).cls, RecordClass::partial);
    EXPECT_EQ(classify(net, {0, 1, 1, 0}).cls, RecordClass::wrong_basis);
    EXPECT_EQ(classify(net, {1, 1, 1, 1}).cls, RecordClass::failed);
}

TEST(SingleShot, IdealBellHerald) {
    Network net(2);
    auto r = single_shot(net, 0.5, HeraldModel::ideal());
    EXPECT_NEAR(r.p_complete, 0.125, 1e-12);
    EXPECT_NEAR(r.p_wrong_basis, 0.0625, 1e-12);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
    double total = 0;
    for (const auto &o : r.outcomes) {
        total += o.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SingleShot, AgreesWithOpticalModelAndFormula) {
    auto h = HeraldModel::from_eta(0.999 * 0.98, 4.4e-7);
    Network net(2);
    for (double p : {0.2, 0.6}) {
        auto eng = single_shot(net, p, h);
        auto opt = single_shot_optical(2, p, h);
        auto f = ghz_herald(2, p, h);
        EXPECT_NEAR(eng.p_complete, opt.p_complete, 1e-9);
        EXPECT_NEAR(eng.fidelity, opt.fidelity, 1e-7);
        EXPECT_NEAR(f.fidelity, opt.fidelity, 1e-6);
        EXPECT_NEAR(f.probability, opt.p_complete, 1e-6);
    }
}

TEST(SingleShot, SamplingIsSeededAndUnbiased) {
    auto h = HeraldModel::from_eta(0.95, 1e-6);
    auto r = single_shot(Network(2), 0.5, h);
    auto a = sample_single_shot(r, 100000, 3);
    auto b = sample_single_shot(r, 100000, 3);
    EXPECT_EQ(a.heralds, b.heralds);
    EXPECT_NEAR(a.herald_probability, r.p_complete, 4 * std::sqrt(r.p_complete / 100000));
    EXPECT_NEAR(a.fidelity, r.fidelity, 4 * a.fidelity_se + 1e-12);
}

TEST(SingleShot, CsvHasHeaderAndOneRowPerOutcome) {
    auto r = single_shot(Network(2), 0.5, HeraldModel::ideal());
    std::ostringstream os;
    write_outcomes_csv(os, r);
    std::string s = os.str();
    EXPECT_EQ(static_cast<size_t>(std::count(s.begin(), s.end(), '\n')), r.outcomes.size() + 1);
}

TEST(Kraus, CompleteDetectionProjectsOntoGhz) {
    Network net(2);
    auto psi = all_ones(net);
    auto out = fock::apply_kraus(ghz_kraus(net, {1, 1}, 0.5), psi);
    EXPECT_GT(out.probability, 0);
    double F = std::max(fock::fidelity(out.state, ghz_target(net, 1)), fock::fidelity(out.state, ghz_target(net, -1)));
    EXPECT_NEAR(F, 1.0, 1e-12);
}

TEST(Bleed, StepConservesProbability) {
    Network net(2);
    BleedState s{fock::to_density(all_ones(net)), classify(net, {0, 0, 0, 0}), 0};
    auto branches = bleed_step(net, s, 0.4, HeraldModel::from_eta(0.9, 1e-6));
    double total = 0;
    for (const auto &b : branches) {
        total += b.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Bleed, OptimizedTwoIterationSuccess) {
    auto opt = optimize_bleed(2, 2, HeraldModel::ideal());
    EXPECT_NEAR(opt.result.success, 0.1832, 5e-4);
    EXPECT_NEAR(opt.schedule.at(0, 0), 0.3728, 2e-3);
    EXPECT_NEAR(opt.schedule.at(1, 0), 0.5, 2e-3);
    EXPECT_NEAR(opt.schedule.at(1, 1), 1.0 / 3, 2e-3);
}

TEST(Bleed, PathwaysAtFiniteEfficiency) {
    auto opt = optimize_bleed(2, 2, HeraldModel::ideal());
    auto r = bleed_success_probability(2, opt.schedule, HeraldModel::from_eta(0.999 * 0.98, 4e-7));
    ASSERT_EQ(r.pathways.size(), 3u);
    EXPECT_NEAR(r.pathways[0].fidelity, 0.976, 2e-3);
    EXPECT_NEAR(r.pathways[1].fidelity, 0.944, 2e-3);
    EXPECT_NEAR(r.pathways[2].fidelity, 0.914, 2e-3);
    EXPECT_NEAR(r.fidelity, 0.959, 2e-3);
    for (const auto &pw : r.pathways) {
        EXPECT_NEAR(pw.fidelity, pw.fidelity_formula, 1e-6);
    }
}

TEST(Asymptotic, MatchesFitAndBeatsSingleShot) {
    for (int n = 2; n <= 5; n++) {
        auto a = asymptotic_success(n);
        EXPECT_NEAR(a.success / a.fit, 1.0, 0.05) << n;
        EXPECT_GT(a.success, 0.5 / std::pow(4.0, n - 1));
    }
    EXPECT_NEAR(asymptotic_success(2).success, 1.0 / 3, 1e-9);
}

TEST(Asymptotic, ExactLimitKeepsBackAction) {
    EXPECT_NEAR(asymptotic_success(2, AsymptoticMethod::exact_limit).success, 1.0 / 3, 1e-6);
    EXPECT_LT(asymptotic_success(3, AsymptoticMethod::exact_limit).success, asymptotic_success(3).success);
    EXPECT_THROW(asymptotic_success(6, AsymptoticMethod::exact_limit), ComplexityLimit);
}

TEST(Rounds, SingleShotAtCertainHeralding) {
    auto r = single_shot_rounds(2, 1.0);
    EXPECT_NEAR(r.expected_rounds, 15.0, 1e-6);
}

TEST(Rounds, BleedingNeedsFewerRounds) {
    for (double p : {0.01, 1.0}) {
        auto a = optimize_rounds(2, p);
        auto s = single_shot_rounds(2, p);
        EXPECT_LT(a.expected_rounds, s.expected_rounds) << p;
    }
}

TEST(Rounds, RejectsBadProbabilities) {
    EXPECT_THROW(expected_rounds(2, {1.5}, 0.5), std::invalid_argument);
    EXPECT_THROW(expected_rounds(2, {}, 0.5), std::invalid_argument);
}
