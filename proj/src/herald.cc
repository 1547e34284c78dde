#include "omcache/herald.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "omcache/errors.h"

namespace omcache {

void HeraldModel::validate() const {
    if (!(eta_d >= 0 && eta_d <= 1 && eta_ex >= 0 && eta_ex <= 1)) {
        throw std::invalid_argument("efficiencies must lie in [0, 1]");
    }
    if (!(dark_rate >= 0 && window >= 0)) {
        throw std::invalid_argument("dark rate and window must be non-negative");
    }
    if (!(p_d() < 1e-2)) {
        throw std::invalid_argument("dark-count probability per window must be below 1e-2");
    }
}

double n_bar_from_p1(double p1) {
    if (!(p1 >= 0 && p1 <= 0.25)) {
        throw InvalidP1("p1 = " + std::to_string(p1) + " lies outside [0, 0.25]");
    }
    // Smaller root of p1 n^2 + (2 p1 - 1) n + p1 = 0, in cancellation-free form.
    double disc = std::sqrt(std::max(0.0, 1 - 4 * p1));
    return 2 * p1 / ((1 - 2 * p1) + disc);
}

double sp_herald_probability(double p1, const HeraldModel &h) {
    double n = n_bar_from_p1(p1);
    double p0 = 1 / (1 + n);
    double eta = h.eta();
    return eta * p1 + 2 * eta * (1 - eta) * p1 * p1 / p0 + h.p_d() * p0;
}

HeraldResult sp_herald_fidelity(double p1, const HeraldModel &h) {
    HeraldResult r;
    double eta = h.eta();
    double p_d = h.p_d();
    r.probability = sp_herald_probability(p1, h);
    r.fidelity = r.probability > 0 ? eta * p1 / r.probability : 0.0;
    double multipair = 2 * p1 * (1 - eta);
    double dark = (p1 * eta > 0) ? p_d / (p1 * eta) : (p_d > 0 ? INFINITY : 0.0);
    r.fidelity_simplified = 1 - multipair - dark;
    r.dark_count_dominated = dark > multipair;
    r.multipair_dominated = multipair > dark;
    return r;
}

double no_herald_residual(double F_hsp) {
    if (!(F_hsp >= 0 && F_hsp <= 1)) {
        throw std::invalid_argument("fidelity must lie in [0, 1]");
    }
    return (1 - F_hsp) / 2;
}

GhzHeraldResult ghz_herald(int n, double p_re, const HeraldModel &h) {
    if (n < 2) {
        throw std::invalid_argument("GHZ heralding needs n >= 2");
    }
    if (!(p_re >= 0 && p_re <= 1)) {
        throw std::invalid_argument("retrieval probability must lie in [0, 1]");
    }
    double eta = h.eta();
    double p_d = h.p_d();
    double q = eta * p_re;
    double nn = double(n) * n;
    GhzHeraldResult r;
    // 2 q^n (1-q)^n (1 + n^2 p_d (1-q)/q), expanded so that q = 0 is regular.
    r.probability = 2 * std::pow(q, n) * std::pow(1 - q, n) + 2 * nn * p_d * std::pow(q, n - 1) * std::pow(1 - q, n + 1);
    double loss_ratio = (1 - q) > 0 ? (1 - p_re) / (1 - q) : 1.0;
    double signal = q + nn * p_d * (1 - q);
    double dark_factor = signal > 0 ? q / signal : 1.0;
    r.fidelity = std::pow(loss_ratio, n) * dark_factor;
    r.dark_count_regime = n * p_d >= q / 10;
    return r;
}

double ghz_herald_probability(int n, double p_re, const HeraldModel &h) {
    return ghz_herald(n, p_re, h).probability;
}

double ghz_herald_fidelity(int n, double p_re, const HeraldModel &h) {
    return ghz_herald(n, p_re, h).fidelity;
}

double effective_retrieval(const std::vector<double> &p_list) {
    double miss = 1;
    for (double p : p_list) {
        if (!(p >= 0 && p <= 1)) {
            throw std::invalid_argument("retrieval probabilities must lie in [0, 1]");
        }
        miss *= 1 - p;
    }
    return 1 - miss;
}

double effective_dark_probability(double p_d, int iterations) {
    return -std::expm1(iterations * std::log1p(-p_d));
}

}  // namespace omcache
