#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spinprop/dynamics.hpp"

namespace spinprop {

/// Endpoint labels of one propagator evaluation.  zpp_conj and spp_conj are
/// the conjugated final labels, stored as independent inputs.
struct BoundaryData {
    cplx zp;        // z'
    cplx sp;        // s'
    cplx zpp_conj;  // z''*
    cplx spp_conj;  // s''*
    SpinSize size;
    double hbar = 1.0;
    double T = 0.0;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 30;
    int max_halvings = 10;
    double jacobian_det_min = 1e-12;
    IntegrateOptions ode;
};

struct TrajectorySolution {
    BoundaryData bd;
    cplx v0, V0;       // solved initial values; u(0) = z', U(0) = s' exactly
    Trajectory traj;
    double residual = 0.0;
    int iterations = 0;
    int branch = 0;
    bool branch_jump = false;
};

/// Newton shooting on (v(0), V(0)) for the mixed boundary-value problem.
/// Default guess when none is supplied: v0 = conj(z'), V0 = conj(s').
TrajectorySolution solve(const SymbolFunction& sym, const BoundaryData& bd,
                         std::optional<std::pair<cplx, cplx>> guess = std::nullopt,
                         const SolveOptions& opt = {});

/// One problem of a continuation path.
struct ContinuationPoint {
    SymbolFunction sym;
    BoundaryData bd;
};

struct ContinuationOptions {
    SolveOptions solve;
    double jump_threshold = 10.0;  // relative to the local parameter step scale
};

/// Sequential warm-started solves along a parametrized family.  Branch jumps
/// are flagged when consecutive initial values move much more than the local
/// step scale suggests.
std::vector<TrajectorySolution> continuation(const std::vector<ContinuationPoint>& path,
                                             const ContinuationOptions& opt = {});

}  // namespace spinprop
