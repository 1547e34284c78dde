#ifndef OMCACHE_EXPERIMENTS_H
#define OMCACHE_EXPERIMENTS_H

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "omcache/config.h"

namespace omcache::experiments {

struct Column {
    std::string name;  // unit suffix in the name, e.g. duration_ns
    std::string unit;
    std::string description;
};

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    void write_csv(std::ostream &os) const;
};

/// Fixed-precision text for CSV cells.
std::string cell(double v);
std::string cell(long v);
std::string cell(int v);

struct RunContext {
    Config config;
    std::string preset;
    std::vector<std::string> overrides;
    uint64_t seed = 1;
    std::optional<double> bath_temperature;  // set by --Tb
};

struct Result {
    Table table;
    nlohmann::json summary = nlohmann::json::object();
};

struct Experiment {
    std::string name;
    std::string description;
    std::function<Result(const RunContext &)> run;
};

const std::vector<Experiment> &registry();
const Experiment *find(const std::string &name);
/// Closest registered name by edit distance.
std::string suggest(const std::string &name);

enum ExitCode { kOk = 0, kValidation = 2, kInfeasible = 3 };

struct RunRequest {
    std::string experiment;
    std::string preset = "target";
    std::string out_dir = ".";
    uint64_t seed = 1;
    std::vector<std::string> overrides;
    std::optional<double> bath_temperature;
    std::optional<double> eta_d;
    std::optional<double> n_th;
    std::optional<int> N;
};

/// Resolves the configuration, runs the experiment and writes
/// <out>/<experiment>.csv and <out>/<experiment>.meta.json. Diagnostics go to `err`.
int run(const RunRequest &request, std::ostream &out, std::ostream &err);

const char *version();

}  // namespace omcache::experiments

#endif
