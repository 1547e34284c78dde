#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "omcache/config.h"
#include "omcache/constants.h"
#include "omcache/errors.h"

using namespace omcache;

TEST(Presets, BothBundledPresetsLoad) {
    EXPECT_EQ(preset_names(), (std::vector<std::string>{"target", "near-term"}));
    auto t = load_preset("target");
    EXPECT_NEAR(rad_to_hz(t.system.kappa()), 1e9, 1);
    EXPECT_NEAR(rad_to_hz(t.system.kappa_ex), 1e9 - 1e6, 1);
    EXPECT_NEAR(rad_to_hz(t.system.g0), 100e3, 1e-6);
    EXPECT_NEAR(t.system.n_th, thermal_occupation(t.system.Omega, 2.0), 1e-12);
    EXPECT_EQ(t.schedule.N, 100);
    EXPECT_DOUBLE_EQ(t.schedule.residual, 0.06);
    auto n = load_preset("near-term");
    EXPECT_NEAR(rad_to_hz(n.system.kappa()), 50e6, 1e-3);
    EXPECT_DOUBLE_EQ(n.schedule.eta_re, 0.97);
}

TEST(Presets, ExtractionEfficiencyFollowsCoupling) {
    auto t = load_preset("target");
    EXPECT_NEAR(t.herald.eta_ex, (1e9 - 1e6) / 1e9, 1e-12);
    EXPECT_NEAR(t.herald.p_d(), 100 * 4e-9, 1e-18);
}

TEST(Presets, UnknownNameThrows) {
    EXPECT_THROW(load_preset("nonexistent"), ConfigError);
}

TEST(Drives, LookupByName) {
    auto t = load_preset("target");
    EXPECT_DOUBLE_EQ(t.drive("cool").power, 1e-3);
    EXPECT_EQ(t.drive("squeeze").role, CarrierRole::blue);
    EXPECT_THROW(t.drive("missing"), ConfigError);
}

TEST(Overrides, ChangeResolvedValues) {
    auto c = load_preset("target");
    apply_override(c, "herald.eta_d=0.5");
    EXPECT_DOUBLE_EQ(c.herald.eta_d, 0.5);
    apply_override(c, "schedule.N=7");
    EXPECT_EQ(c.schedule.N, 7);
    apply_override(c, "system.n_th=0.001");
    EXPECT_DOUBLE_EQ(c.system.n_th, 0.001);
}

TEST(Overrides, TemperatureReplacesOccupation) {
    auto c = load_preset("target");
    apply_override(c, "system.n_th=0.5");
    set_bath_temperature(c, 0.04);
    EXPECT_NEAR(c.system.n_th, thermal_occupation(c.system.Omega, 0.04), 1e-15);
    EXPECT_DOUBLE_EQ(c.bath_temperature, 0.04);
}

TEST(Overrides, RejectUnknownOrMalformed) {
    auto c = load_preset("target");
    EXPECT_THROW(apply_override(c, "herald.nonsense=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "nosection=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "herald.eta_d"), ConfigError);
    EXPECT_THROW(apply_override(c, "herald.eta_d=abc"), ConfigError);
    EXPECT_THROW(apply_override(c, "herald.eta_d=1.5"), ConfigError);
    EXPECT_THROW(apply_override(c, "schedule.N=0"), ConfigError);
    // A failed override leaves the config untouched.
    EXPECT_DOUBLE_EQ(c.herald.eta_d, 0.98);
}

TEST(Parse, MinimalCustomFile) {
    std::string ini = std::string(preset_text("target"));
    auto c = parse_config(ini, "copy");
    EXPECT_EQ(c.name, "copy");
    EXPECT_DOUBLE_EQ(c.system.kappa(), load_preset("target").system.kappa());
}

TEST(Parse, LoadsFromPath) {
    std::string path = testing::TempDir() + "omcache_cfg.ini";
    {
        std::ofstream f(path);
        f << preset_text("near-term");
    }
    auto c = load_preset(path);
    EXPECT_NEAR(rad_to_hz(c.system.kappa()), 50e6, 1e-3);
    std::remove(path.c_str());
    EXPECT_THROW(load_config_file(path), ConfigError);
}

TEST(Parse, RejectsUnknownSectionAndPhysicsViolations) {
    EXPECT_THROW(parse_config("[bogus]\nx = 1\n"), ConfigError);
    std::string ini = std::string(preset_text("target"));
    auto pos = ini.find("Omega_over_2pi_hz = 10e9");
    ASSERT_NE(pos, std::string::npos);
    ini.replace(pos, 24, "Omega_over_2pi_hz = 1e6");
    EXPECT_THROW(parse_config(ini), ConfigError);
}

TEST(Json, ContainsResolvedParameters) {
    auto j = to_json(load_preset("target"));
    EXPECT_EQ(j["name"], "target");
    EXPECT_NEAR(j["system"]["kappa_over_2pi_hz"].get<double>(), 1e9, 1);
    EXPECT_EQ(j["drives"]["cool"]["shape"], "tanh");
    EXPECT_EQ(j["schedule"]["N"], 100);
    EXPECT_TRUE(j["schedule"].contains("residual_population"));
}
