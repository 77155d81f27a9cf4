#pragma once

#include <array>
#include <functional>

#include "spinprop/shooting.hpp"
#include "spinprop/states.hpp"

namespace spinprop {

/// Truncated Fock ⊗ spin space used for exact propagation.
struct HilbertConfig {
    int n_max = 40;
    SpinSize size;
    double hbar = 1.0;
    double tail_threshold = 1e-12;
};

enum class ExactMethod { automatic, matrix_exponential, state_evolution };

/// K_exact = <z'',s''| exp(-i H T / hbar) |z',s'>, with z'' and s'' recovered
/// by conjugating the stored z''*, s''*.  Throws truncation_error when the
/// coherent tails exceed the configured threshold.
cplx exact_propagator(const OperatorSpec& spec, const HilbertConfig& cfg, const BoundaryData& bd,
                      ExactMethod method = ExactMethod::automatic, double ode_rtol = 1e-12);

/// Time-dependent complex field C(t) driving a spin-1/2.
using SpinHalfField = std::function<std::array<cplx, 3>(double)>;

/// W(t) solving dW/dt = -(i/2) sigma . C(t) W,  W(0) = 1, in the (up, down) basis.
struct SpinHalfEvolution {
    std::vector<double> t;
    std::vector<Eigen::Matrix2cd> W;
    const Eigen::Matrix2cd& final() const { return W.back(); }
};

SpinHalfEvolution evolve_spin_half(const SpinHalfField& field, double T, double rtol = 1e-10,
                                   double atol = 1e-12);

/// Exact spin-1/2 propagator in the external field, assembled from W(T).
cplx spin_half_exact(const SpinHalfField& field, cplx sp, cplx spp_conj, double T,
                     double rtol = 1e-10);
cplx spin_half_from_W(const Eigen::Matrix2cd& WT, cplx sp, cplx spp_conj);

}  // namespace spinprop
