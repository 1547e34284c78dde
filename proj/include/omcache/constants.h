#ifndef OMCACHE_CONSTANTS_H
#define OMCACHE_CONSTANTS_H

#include <numbers>

namespace omcache {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Converts an ordinary frequency (Hz, i.e. a "/2pi" value) to rad/s.
constexpr double hz_to_rad(double hz) {
    return kTwoPi * hz;
}

constexpr double rad_to_hz(double rad) {
    return rad / kTwoPi;
}

}  // namespace omcache

#endif
