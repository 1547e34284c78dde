#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "omcache/experiments.h"

using namespace omcache::experiments;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    fs::path p = fs::path(testing::TempDir()) / ("omcache_cli_" + name);
    fs::remove_all(p);
    return p;
}

int run_quiet(RunRequest req, std::string *err_text = nullptr) {
    std::ostringstream out, err;
    int rc = run(req, out, err);
    if (err_text) {
        *err_text = err.str();
    }
    return rc;
}

}  // namespace

TEST(Registry, ListsAllExperiments) {
    std::vector<std::string> expected{"cool",     "herald-tradeoff", "retrieval", "schedule",   "total-fidelity", "min-g0",
                                      "lifetimes", "bell",           "bleed",     "asymptotic", "rounds-to-ghz"};
    ASSERT_GE(registry().size(), expected.size());
    for (const auto &name : expected) {
        EXPECT_NE(find(name), nullptr) << name;
    }
}

TEST(Registry, SuggestsClosestName) {
    EXPECT_EQ(suggest("herald-tradof"), "herald-tradeoff");
    EXPECT_EQ(suggest("minG0"), "min-g0");
}

TEST(Cells, FormatSpecialValues) {
    EXPECT_EQ(cell(0.5), "0.5");
    EXPECT_EQ(cell(1.0 / 0.0), "inf");
    EXPECT_EQ(cell(7), "7");
}

TEST(Run, UnknownExperimentIsValidationError) {
    std::string err;
    RunRequest req;
    req.experiment = "herald-tradof";
    req.out_dir = scratch("unknown").string();
    EXPECT_EQ(run_quiet(req, &err), kValidation);
    EXPECT_NE(err.find("herald-tradeoff"), std::string::npos);
}

TEST(Run, BadOverrideIsValidationError) {
    RunRequest req;
    req.experiment = "lifetimes";
    req.out_dir = scratch("badset").string();
    req.overrides = {"herald.nonsense=3"};
    EXPECT_EQ(run_quiet(req), kValidation);
    req.overrides = {};
    req.preset = "no-such-preset";
    EXPECT_EQ(run_quiet(req), kValidation);
}

TEST(Run, HeraldTradeoffColumnsAndMeta) {
    auto dir = scratch("herald");
    RunRequest req;
    req.experiment = "herald-tradeoff";
    req.out_dir = dir.string();
    ASSERT_EQ(run_quiet(req), kOk);
    std::string csv = slurp(dir / "herald-tradeoff.csv");
    std::string header = csv.substr(0, csv.find('\n'));
    for (const char *col : {"eta_d", "p1", "p_h_sp", "F_exact", "F_simplified"}) {
        EXPECT_NE(header.find(col), std::string::npos) << col;
    }
    auto meta = nlohmann::json::parse(slurp(dir / "herald-tradeoff.meta.json"));
    EXPECT_EQ(meta["experiment"], "herald-tradeoff");
    EXPECT_EQ(meta["preset"], "target");
    EXPECT_EQ(meta["seed"], 1);
    EXPECT_TRUE(meta.contains("version"));
    EXPECT_TRUE(meta.contains("wall_time_s"));
    EXPECT_TRUE(meta["parameters"].contains("system"));
    size_t ncols = std::count(header.begin(), header.end(), ',') + 1;
    EXPECT_EQ(meta["columns"].size(), ncols);
    for (const auto &c : meta["columns"]) {
        EXPECT_FALSE(c["unit"].get<std::string>().empty());
        EXPECT_FALSE(c["description"].get<std::string>().empty());
    }
}

TEST(Run, TotalFidelityAtColdBath) {
    auto dir = scratch("tf");
    RunRequest req;
    req.experiment = "total-fidelity";
    req.out_dir = dir.string();
    req.bath_temperature = 0.04;
    ASSERT_EQ(run_quiet(req), kOk);
    auto meta = nlohmann::json::parse(slurp(dir / "total-fidelity.meta.json"));
    EXPECT_GE(meta["summary"]["max_F_tot"].get<double>(), 0.99);
    EXPECT_NEAR(meta["parameters"]["system"]["bath_temperature_k"].get<double>(), 0.04, 1e-15);
}

TEST(Run, FlagsBecomeOverrides) {
    auto dir = scratch("flags");
    RunRequest req;
    req.experiment = "lifetimes";
    req.out_dir = dir.string();
    req.eta_d = 0.5;
    req.N = 3;
    ASSERT_EQ(run_quiet(req), kOk);
    auto meta = nlohmann::json::parse(slurp(dir / "lifetimes.meta.json"));
    EXPECT_EQ(meta["parameters"]["herald"]["eta_d"], 0.5);
    EXPECT_EQ(meta["parameters"]["schedule"]["N"], 3);
}

TEST(Run, SameSeedGivesIdenticalCsv) {
    for (const char *name : {"schedule", "bell"}) {
        RunRequest req;
        req.experiment = name;
        req.seed = 11;
        req.out_dir = scratch(std::string(name) + "_a").string();
        ASSERT_EQ(run_quiet(req), kOk);
        std::string a = slurp(fs::path(req.out_dir) / (std::string(name) + ".csv"));
        req.out_dir = scratch(std::string(name) + "_b").string();
        ASSERT_EQ(run_quiet(req), kOk);
        EXPECT_EQ(a, slurp(fs::path(req.out_dir) / (std::string(name) + ".csv"))) << name;
    }
}

#ifdef OMCACHE_CLI_PATH
TEST(Binary, ExitCodes) {
    std::string exe = OMCACHE_CLI_PATH;
    auto dir = scratch("bin").string();
    auto status = [](const std::string &cmd) { return WEXITSTATUS(std::system((cmd + " >/dev/null 2>&1").c_str())); };
    EXPECT_EQ(status(exe + " list"), 0);
    EXPECT_EQ(status(exe + " run nonsense --out " + dir), 2);
    EXPECT_EQ(status(exe + " run lifetimes --set bogus --out " + dir), 2);
    EXPECT_EQ(status(exe + " run lifetimes --out " + dir), 0);
    EXPECT_TRUE(fs::exists(fs::path(dir) / "lifetimes.csv"));
    // A near-unity target cannot be reached for any coupling in the bracket.
    EXPECT_EQ(status(exe + " run min-g0 --eta-d 0.5 --n-th 1 --N 1000 --out " + dir), 3);
}
#endif
