#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "spinprop/common.hpp"

namespace spinprop {

/// Adaptive Dormand-Prince 5(4) for complex state vectors.
///
/// The right-hand side may throw (chart singularity, divergence guard); the
/// stepper rethrows after tagging the failing time.  Fixed-step mode reuses
/// the same tableau with the controller disabled.
class Rk54 {
public:
    using Rhs = std::function<void(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt)>;
    using Observer = std::function<void(double t, const Eigen::VectorXcd& y)>;

    struct Options {
        double rtol = 1e-10;
        double atol = 1e-12;
        double h_init = 0.0;     // 0: choose from the first derivative
        double h_min = 1e-14;    // relative to the interval length
        int max_steps = 2000000;
        int fixed_steps = 0;     // > 0: fixed-step mode with this many steps
    };

    /// Integrates y from t0 to t1 in place.  Calls `obs` at every accepted
    /// step (including the endpoints) when provided.
    static void integrate(const Rhs& rhs, Eigen::VectorXcd& y, double t0, double t1,
                          const Options& opt, const Observer& obs = nullptr);
};

}  // namespace spinprop
