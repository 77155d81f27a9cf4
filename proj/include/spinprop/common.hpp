#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace spinprop {

using cplx = std::complex<double>;

inline constexpr cplx iu{0.0, 1.0};

/// Spin size stored as the integer 2j so that half-integers are exact.
struct SpinSize {
    int twoj = 1;

    SpinSize() = default;
    explicit SpinSize(int two_j) : twoj(two_j) {
        if (twoj < 1) throw std::invalid_argument("SpinSize: 2j must be a positive integer");
    }
    static SpinSize from_j(double j_value) {
        double t = 2.0 * j_value;
        int r = static_cast<int>(t + 0.5);
        if (r < 1 || std::abs(t - r) > 1e-12)
            throw std::invalid_argument("SpinSize: j must be a positive half-integer");
        return SpinSize(r);
    }
    double j() const { return 0.5 * twoj; }
    int dim() const { return twoj + 1; }
};

/// Raised when an evaluation hits the stereographic chart singularity 1 + U V = 0.
class chart_singularity_error : public std::runtime_error {
public:
    chart_singularity_error(cplx U, cplx V)
        : std::runtime_error("chart singularity 1 + U*V = 0 at U=(" + std::to_string(U.real()) +
                             "," + std::to_string(U.imag()) + ") V=(" + std::to_string(V.real()) +
                             "," + std::to_string(V.imag()) + ")"),
          U_(U), V_(V) {}
    cplx U() const { return U_; }
    cplx V() const { return V_; }

private:
    cplx U_, V_;
};

/// Raised by iterative solvers (shooting, ODE stepping) on failure.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what, double residual = -1.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Raised when a coherent-state expansion leaves too much mass above the truncation.
class truncation_error : public std::runtime_error {
public:
    truncation_error(double tail, int n_max_needed)
        : std::runtime_error("truncation tail mass " + std::to_string(tail) +
                             " above threshold; n_max of about " +
                             std::to_string(n_max_needed) + " required"),
          tail_(tail), n_max_needed_(n_max_needed) {}
    double tail() const { return tail_; }
    int n_max_needed() const { return n_max_needed_; }

private:
    double tail_;
    int n_max_needed_;
};

double log_factorial(int n);
double log_binomial(int n, int k);
/// binomial(n, k) as a double; exact for small n, log-space above n = 20
double binomial(int n, int k);

}  // namespace spinprop
