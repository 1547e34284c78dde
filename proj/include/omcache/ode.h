#ifndef OMCACHE_ODE_H
#define OMCACHE_ODE_H

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace omcache {

using RealVector = Eigen::VectorXd;
using OdeRhs = std::function<void(const RealVector &x, RealVector &dxdt, double t)>;

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0;  // 0 picks a step from the output spacing
    double max_step = 0;      // 0 means unbounded
    size_t max_steps = 20'000'000;
};

/// Adaptive Dormand-Prince integration with dense output at the requested times.
/// times[0] is the initial time; the result holds one state per entry of times.
/// Throws IntegratorStall when the step controller cannot make progress.
std::vector<RealVector> integrate_at(
    const OdeRhs &rhs, RealVector x0, const std::vector<double> &times, const OdeOptions &options = {});

}  // namespace omcache

#endif
