#include "spinprop/ode.hpp"

#include <cmath>

namespace spinprop {

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

void Rk54::integrate(const Rhs& rhs, Eigen::VectorXcd& y, double t0, double t1,
                     const Options& opt, const Observer& obs) {
    const double span = t1 - t0;
    if (span == 0.0) {
        if (obs) obs(t0, y);
        return;
    }
    if (span < 0.0) throw std::invalid_argument("Rk54: backward integration not supported");

    const Eigen::Index dim = y.size();
    Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    Eigen::VectorXcd ytmp(dim), ynew(dim), yerr(dim);

    double t = t0;
    rhs(t, y, k1);
    if (obs) obs(t, y);

    const bool fixed = opt.fixed_steps > 0;
    double h = fixed ? span / opt.fixed_steps
                     : (opt.h_init > 0.0 ? opt.h_init
                                         : std::min(span, 0.01 * span / (1.0 + k1.norm())));

    for (int step = 0; step < opt.max_steps; ++step) {
        if (t >= t1) return;
        if (!fixed && t + h > t1) h = t1 - t;
        if (fixed) h = std::min(span / opt.fixed_steps, t1 - t);

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);

        if (fixed) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (obs) obs(t, y);
            continue;
        }

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e = std::abs(yerr[i]) / sc;
            err = std::max(err, e);
        }

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            if (obs) obs(t, y);
        }
        double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < opt.h_min * std::abs(span))
            throw solver_error("Rk54: step size underflow at t = " + std::to_string(t), err);
    }
    throw solver_error("Rk54: maximum number of steps exceeded");
}

}  // namespace spinprop
