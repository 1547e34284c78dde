#include "omcache/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "omcache/constants.h"
#include "omcache/errors.h"

namespace omcache {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kSystemKeys = {
    "omega0_over_2pi_hz", "Omega_over_2pi_hz", "kappa_int_over_2pi_hz", "kappa_over_2pi_hz",
    "kappa_ex_over_2pi_hz", "Gamma_over_2pi_hz", "g0_over_2pi_hz", "gh_over_2pi_hz",
    "bath_temperature_k", "n_th"};
const std::set<std::string> kDriveKeys = {"power_w", "duration_s", "shape", "role", "ramp_fraction"};
const std::set<std::string> kHeraldKeys = {"eta_d", "eta_ex", "dark_rate_cps", "window_s"};
const std::set<std::string> kScheduleKeys = {"N", "T_h_s", "F_init", "eta_re", "residual_population"};

const std::set<std::string> *keys_for(const std::string &section) {
    if (section == "system") {
        return &kSystemKeys;
    }
    if (section.rfind("drives.", 0) == 0 && section.size() > 7) {
        return &kDriveKeys;
    }
    if (section == "herald") {
        return &kHeraldKeys;
    }
    if (section == "schedule") {
        return &kScheduleKeys;
    }
    return nullptr;
}

void check_key(const std::string &section, const std::string &key) {
    const auto *keys = keys_for(section);
    if (!keys) {
        throw ConfigError("unknown config section [" + section + "]");
    }
    if (!keys->count(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }
}

double number(const std::map<std::string, std::string> &e, const std::string &key) {
    auto it = e.find(key);
    if (it == e.end()) {
        throw ConfigError("missing required key '" + key + "'");
    }
    try {
        size_t used = 0;
        double v = std::stod(it->second, &used);
        if (it->second.find_first_not_of(" \t", used) != std::string::npos) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError("key '" + key + "' is not a number: '" + it->second + "'");
    }
}

double number_or(const std::map<std::string, std::string> &e, const std::string &key, double fallback) {
    return e.count(key) ? number(e, key) : fallback;
}

std::string text_or(const std::map<std::string, std::string> &e, const std::string &key, const std::string &fallback) {
    auto it = e.find(key);
    return it == e.end() ? fallback : it->second;
}

void resolve(Config &c) {
    const auto &e = c.entries;
    SystemParams &s = c.system;
    s.omega0 = hz_to_rad(number(e, "system.omega0_over_2pi_hz"));
    s.Omega = hz_to_rad(number(e, "system.Omega_over_2pi_hz"));
    s.kappa_int = hz_to_rad(number(e, "system.kappa_int_over_2pi_hz"));
    if (e.count("system.kappa_ex_over_2pi_hz")) {
        s.kappa_ex = hz_to_rad(number(e, "system.kappa_ex_over_2pi_hz"));
    } else {
        s.kappa_ex = hz_to_rad(number(e, "system.kappa_over_2pi_hz")) - s.kappa_int;
    }
    s.Gamma = hz_to_rad(number(e, "system.Gamma_over_2pi_hz"));
    s.g0 = hz_to_rad(number(e, "system.g0_over_2pi_hz"));
    s.gh = hz_to_rad(number_or(e, "system.gh_over_2pi_hz", rad_to_hz(s.g0)));
    if (e.count("system.n_th")) {
        s.n_th = number(e, "system.n_th");
        c.bath_temperature = 0;
    } else {
        c.bath_temperature = number(e, "system.bath_temperature_k");
        s.n_th = thermal_occupation(s.Omega, c.bath_temperature);
    }
    try {
        s.validate();
    } catch (const std::invalid_argument &err) {
        throw ConfigError(std::string("[system]: ") + err.what());
    }

    c.drives.clear();
    std::set<std::string> drive_names;
    for (const auto &[k, v] : e) {
        if (k.rfind("drives.", 0) == 0) {
            drive_names.insert(k.substr(7, k.rfind('.') - 7));
        }
    }
    for (const auto &name : drive_names) {
        std::string pre = "drives." + name + ".";
        DrivePulse d;
        d.power = number(e, pre + "power_w");
        d.duration = number(e, pre + "duration_s");
        std::string shape = text_or(e, pre + "shape", "tanh");
        if (shape == "tanh") {
            d.shape = PulseShape::tanh;
        } else if (shape == "constant") {
            d.shape = PulseShape::constant;
        } else {
            throw ConfigError("drive '" + name + "': shape must be tanh or constant");
        }
        std::string role = text_or(e, pre + "role", "red");
        if (role == "red") {
            d.role = CarrierRole::red;
        } else if (role == "blue") {
            d.role = CarrierRole::blue;
        } else {
            throw ConfigError("drive '" + name + "': role must be red or blue");
        }
        d.ramp_fraction = number_or(e, pre + "ramp_fraction", 0.05);
        try {
            d.validate();
        } catch (const std::invalid_argument &err) {
            throw ConfigError("drive '" + name + "': " + err.what());
        }
        c.drives[name] = d;
    }

    c.herald.eta_d = number_or(e, "herald.eta_d", 1.0);
    c.herald.eta_ex = number_or(e, "herald.eta_ex", s.eta_ex());
    c.herald.dark_rate = number_or(e, "herald.dark_rate_cps", 0.0);
    c.herald.window = number_or(e, "herald.window_s", 0.0);
    try {
        c.herald.validate();
    } catch (const std::invalid_argument &err) {
        throw ConfigError(std::string("[herald]: ") + err.what());
    }

    double N = number_or(e, "schedule.N", 100);
    if (!(N >= 1) || N != std::floor(N)) {
        throw ConfigError("[schedule]: N must be a positive integer");
    }
    c.schedule.N = static_cast<int>(N);
    c.schedule.T_h = number_or(e, "schedule.T_h_s", 10e-9);
    c.schedule.F_init = number_or(e, "schedule.F_init", 1.0);
    c.schedule.eta_re = number_or(e, "schedule.eta_re", 1.0);
    c.schedule.residual = number_or(e, "schedule.residual_population", 0.0);
    if (!(c.schedule.T_h > 0) || !(c.schedule.F_init >= 0 && c.schedule.F_init <= 1) ||
        !(c.schedule.eta_re >= 0 && c.schedule.eta_re <= 1) || !(c.schedule.residual >= 0)) {
        throw ConfigError("[schedule]: T_h must be positive, F_init and eta_re in [0, 1]");
    }
}

}  // namespace

const DrivePulse &Config::drive(const std::string &drive_name) const {
    auto it = drives.find(drive_name);
    if (it == drives.end()) {
        throw ConfigError("config has no drive '" + drive_name + "'");
    }
    return it->second;
}

HeraldModel Config::herald_model() const {
    return herald;
}

std::vector<std::string> preset_names() {
    return {"target", "near-term"};
}

Config parse_config(const std::string &ini_text, const std::string &name) {
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &err) {
        throw ConfigError(std::string("malformed config: ") + err.what());
    }
    Config c;
    c.name = name;
    for (const auto &[section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("key '" + section + "' appears outside any section");
        }
        for (const auto &[key, value] : body) {
            check_key(section, key);
            c.entries[section + "." + key] = value.data();
        }
    }
    resolve(c);
    return c;
}

Config load_config_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

Config load_preset(const std::string &name_or_path) {
    if (const char *text = preset_text(name_or_path)) {
        return parse_config(text, name_or_path);
    }
    std::ifstream probe(name_or_path);
    if (!probe) {
        throw ConfigError("unknown preset '" + name_or_path + "' (bundled: target, near-term)");
    }
    return load_config_file(name_or_path);
}

void apply_override(Config &config, const std::string &assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must have the form section.key=value: '" + assignment + "'");
    }
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    auto dot = path.rfind('.');
    if (dot == std::string::npos) {
        throw ConfigError("override key must name a section: '" + path + "'");
    }
    std::string section = path.substr(0, dot);
    std::string key = path.substr(dot + 1);
    check_key(section, key);
    Config updated = config;
    updated.entries[path] = value;
    // A direct thermal occupation and a bath temperature are alternatives.
    if (path == "system.n_th") {
        updated.entries.erase("system.bath_temperature_k");
    } else if (path == "system.bath_temperature_k") {
        updated.entries.erase("system.n_th");
    } else if (path == "system.kappa_ex_over_2pi_hz") {
        updated.entries.erase("system.kappa_over_2pi_hz");
    } else if (path == "system.kappa_over_2pi_hz") {
        updated.entries.erase("system.kappa_ex_over_2pi_hz");
    }
    resolve(updated);
    config = std::move(updated);
}

void set_bath_temperature(Config &config, double T_b) {
    std::ostringstream v;
    v.precision(17);
    v << T_b;
    apply_override(config, "system.bath_temperature_k=" + v.str());
}

nlohmann::json to_json(const Config &c) {
    nlohmann::json j;
    j["name"] = c.name;
    const auto &s = c.system;
    j["system"] = {
        {"omega0_over_2pi_hz", rad_to_hz(s.omega0)},
        {"Omega_over_2pi_hz", rad_to_hz(s.Omega)},
        {"kappa_int_over_2pi_hz", rad_to_hz(s.kappa_int)},
        {"kappa_ex_over_2pi_hz", rad_to_hz(s.kappa_ex)},
        {"kappa_over_2pi_hz", rad_to_hz(s.kappa())},
        {"Gamma_over_2pi_hz", rad_to_hz(s.Gamma)},
        {"g0_over_2pi_hz", rad_to_hz(s.g0)},
        {"gh_over_2pi_hz", rad_to_hz(s.gh)},
        {"bath_temperature_k", c.bath_temperature},
        {"n_th", s.n_th},
    };
    for (const auto &[name, d] : c.drives) {
        j["drives"][name] = {
            {"power_w", d.power},
            {"duration_s", d.duration},
            {"shape", d.shape == PulseShape::tanh ? "tanh" : "constant"},
            {"role", d.role == CarrierRole::red ? "red" : "blue"},
            {"ramp_fraction", d.ramp_fraction},
        };
    }
    j["herald"] = {
        {"eta_d", c.herald.eta_d},
        {"eta_ex", c.herald.eta_ex},
        {"dark_rate_cps", c.herald.dark_rate},
        {"window_s", c.herald.window},
        {"eta", c.herald.eta()},
        {"p_d", c.herald.p_d()},
    };
    j["schedule"] = {
        {"N", c.schedule.N},
        {"T_h_s", c.schedule.T_h},
        {"F_init", c.schedule.F_init},
        {"eta_re", c.schedule.eta_re},
        {"residual_population", c.schedule.residual},
    };
    return j;
}

}  // namespace omcache
