// Command-line front end: `omcache list` and `omcache run <experiment>`.
#include <iostream>

#include "CLI11.hpp"
#include "omcache/config.h"
#include "omcache/experiments.h"

namespace ex = omcache::experiments;

int main(int argc, char **argv) {
    CLI::App app{"Optomechanical single-photon cache models"};
    app.set_version_flag("--version", std::string(ex::version()));
    app.require_subcommand(1);

    auto *list = app.add_subcommand("list", "List the experiments and presets");

    ex::RunRequest req;
    double Tb = 0, eta_d = 0, n_th = 0;
    int N = 0;
    auto *run = app.add_subcommand("run", "Run one experiment and write <out>/<experiment>.csv and .meta.json");
    run->add_option("experiment", req.experiment, "Experiment name (see `omcache list`)")->required();
    run->add_option("--preset", req.preset, "Preset name or path to an ini file")->capture_default_str();
    run->add_option("--out", req.out_dir, "Output directory")->capture_default_str();
    run->add_option("--seed", req.seed, "Seed for sampled columns")->capture_default_str();
    run->add_option("--set", req.overrides, "Override a parameter, section.key=value (repeatable)");
    auto *o_tb = run->add_option("--Tb", Tb, "Bath temperature in K");
    auto *o_eta = run->add_option("--eta-d", eta_d, "Detector efficiency");
    auto *o_nth = run->add_option("--n-th", n_th, "Thermal phonon occupation");
    auto *o_n = run->add_option("--N", N, "Number of parallel sources");
    o_tb->excludes(o_nth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : ex::kValidation;
    }

    if (*list) {
        for (const auto &e : ex::registry()) {
            std::cout << e.name << "\t" << e.description << "\n";
        }
        std::cout << "\npresets:";
        for (const auto &p : omcache::preset_names()) {
            std::cout << " " << p;
        }
        std::cout << "\n";
        return 0;
    }
    if (*o_tb) req.bath_temperature = Tb;
    if (*o_eta) req.eta_d = eta_d;
    if (*o_nth) req.n_th = n_th;
    if (*o_n) req.N = N;
    return ex::run(req, std::cout, std::cerr);
}
