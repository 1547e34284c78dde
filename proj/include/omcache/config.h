#ifndef OMCACHE_CONFIG_H
#define OMCACHE_CONFIG_H

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "omcache/herald_model.h"
#include "omcache/om_dynamics.h"

namespace omcache {

struct ScheduleDefaults {
    int N = 100;
    double T_h = 10e-9;     // s
    double F_init = 0.999;
    double eta_re = 0.998;
    double residual = 0.06;  // phonons left after an unheralded squeeze
};

/// Fully resolved parameter set.
struct Config {
    std::string name;
    SystemParams system;
    double bath_temperature = 0;  // K; 0 when n_th was given directly
    std::map<std::string, DrivePulse> drives;
    HeraldModel herald;
    ScheduleDefaults schedule;
    /// Source entries keyed "section.key"; overrides edit these and re-resolve.
    std::map<std::string, std::string> entries;

    const DrivePulse &drive(const std::string &name) const;
    /// Herald model whose extraction efficiency follows the optical coupling.
    HeraldModel herald_model() const;
};

/// Bundled preset INI text, or nullptr for an unknown name.
const char *preset_text(std::string_view name);
std::vector<std::string> preset_names();

/// Parses INI text. Frequencies are given as /2pi values in Hz. Throws ConfigError.
Config parse_config(const std::string &ini_text, const std::string &name = "custom");
Config load_config_file(const std::string &path);
/// Bundled preset by name, or an INI file path. Throws ConfigError.
Config load_preset(const std::string &name_or_path);

/// Applies "section.key=value" (section names may contain dots). Throws ConfigError on unknown keys.
void apply_override(Config &config, const std::string &assignment);
/// Sets the bath temperature and the derived thermal occupation.
void set_bath_temperature(Config &config, double T_b);

nlohmann::json to_json(const Config &config);

}  // namespace omcache

#endif
