#include "omcache/ode.h"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>
#include <algorithm>
#include <cmath>

#include "omcache/errors.h"

namespace omcache {

namespace odeint = boost::numeric::odeint;

std::vector<RealVector> integrate_at(
    const OdeRhs &rhs, RealVector x0, const std::vector<double> &times, const OdeOptions &options) {
    std::vector<RealVector> out;
    if (times.empty()) {
        return out;
    }
    for (size_t k = 1; k < times.size(); k++) {
        if (!(times[k] > times[k - 1])) {
            throw std::invalid_argument("integrate_at: times must be strictly increasing");
        }
    }
    out.reserve(times.size());
    if (times.size() == 1) {
        out.push_back(x0);
        return out;
    }

    using Stepper = odeint::runge_kutta_dopri5<RealVector, double, RealVector, double, odeint::vector_space_algebra>;
    double max_dt = options.max_step > 0 ? options.max_step : 0.0;
    auto dense = odeint::make_dense_output(options.abs_tol, options.rel_tol, max_dt, Stepper());
    double span = times.back() - times.front();
    double dt0 = options.initial_step > 0 ? options.initial_step : span * 1e-6;
    if (max_dt > 0) {
        dt0 = std::min(dt0, max_dt);
    }

    auto system = [&](const RealVector &x, RealVector &dxdt, double t) {
        dxdt.resize(x.size());
        rhs(x, dxdt, t);
    };
    auto observer = [&](const RealVector &x, double) {
        for (Eigen::Index i = 0; i < x.size(); i++) {
            if (!std::isfinite(x[i])) {
                throw IntegratorStall("integrator produced a non-finite state");
            }
        }
        out.push_back(x);
    };
    try {
        odeint::integrate_times(
            dense, system, x0, times.begin(), times.end(), dt0, observer,
            odeint::max_step_checker(options.max_steps));
    } catch (const odeint::step_adjustment_error &e) {
        throw IntegratorStall(std::string("step size underflow: ") + e.what());
    } catch (const odeint::no_progress_error &e) {
        throw IntegratorStall(std::string("no progress: ") + e.what());
    }
    if (out.size() != times.size()) {
        throw IntegratorStall("integrator stopped before the final output time");
    }
    return out;
}

}  // namespace omcache
