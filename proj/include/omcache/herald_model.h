#ifndef OMCACHE_HERALD_MODEL_H
#define OMCACHE_HERALD_MODEL_H

namespace omcache {

/// Detection chain: extraction efficiency, detector efficiency and dark counts.
struct HeraldModel {
    double eta_d = 1.0;
    double eta_ex = 1.0;
    double dark_rate = 0.0;  // counts / s
    double window = 0.0;     // s

    double eta() const {
        return eta_ex * eta_d;
    }
    double p_d() const {
        return dark_rate * window;
    }
    /// Throws std::invalid_argument when efficiencies leave [0,1] or p_d >= 1e-2.
    void validate() const;

    static HeraldModel ideal() {
        return {};
    }
    /// Model with a given total efficiency and per-window dark-count probability.
    static HeraldModel from_eta(double eta, double p_d = 0.0) {
        return HeraldModel{eta, 1.0, p_d, 1.0};
    }
};

}  // namespace omcache

#endif
