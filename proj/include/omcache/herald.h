#ifndef OMCACHE_HERALD_H
#define OMCACHE_HERALD_H

#include <vector>

#include "omcache/herald_model.h"

namespace omcache {

struct HeraldResult {
    double probability = 0;
    double fidelity = 1;             // exact Bayes form
    double fidelity_simplified = 1;  // 1 - 2 p1 (1-eta) - p_d/(p1 eta)
    bool dark_count_dominated = false;
    bool multipair_dominated = false;
};

/// Mean pair number on the n_bar < 1 branch of p1 = n_bar/(1+n_bar)^2. Throws InvalidP1.
double n_bar_from_p1(double p1);

/// eta p1 + 2 eta (1-eta) p1^2 / p0 + p_d p0. Throws InvalidP1.
double sp_herald_probability(double p1, const HeraldModel &h);
HeraldResult sp_herald_fidelity(double p1, const HeraldModel &h);
/// Residual phonon population (1-F)/2 left after a failed herald.
double no_herald_residual(double F_hsp);

struct GhzHeraldResult {
    double probability = 0;
    double fidelity = 1;
    bool dark_count_regime = false;  // n p_d >= eta p_re / 10
};

/// Herald probability and fidelity of an n-qubit GHZ state for retrieval probability p_re.
GhzHeraldResult ghz_herald(int n, double p_re, const HeraldModel &h);
double ghz_herald_probability(int n, double p_re, const HeraldModel &h);
double ghz_herald_fidelity(int n, double p_re, const HeraldModel &h);

/// 1 - prod(1 - p_k).
double effective_retrieval(const std::vector<double> &p_list);
/// Dark-count probability of a detection window stretched over K iterations.
double effective_dark_probability(double p_d, int iterations);

}  // namespace omcache

#endif
