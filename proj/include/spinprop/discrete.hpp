#pragma once

#include "spinprop/shooting.hpp"

namespace spinprop {

/// Time-sliced trajectory, node k at t_k = k T / N, k = 0..N.
struct DiscretePath {
    std::vector<cplx> u, U, v, V;
    double eps = 0.0;  // slice width T / N

    int steps() const { return static_cast<int>(u.size()) - 1; }
};

/// Samples a solved trajectory on the uniform N-slice grid.
DiscretePath sample_path(const Trajectory& traj, int N);

/// Residuals of the time-sliced stationarity equations at the interior nodes
/// m = 1..N-1 (the leading, spin-size-proportional part; the subleading
/// measure contribution is outside the stationary-phase order kept here).
struct StationarityResidual {
    double max_norm = 0.0;
    std::vector<double> node;  // per interior node, infinity norm over the four equations
};
StationarityResidual discrete_stationarity_residual(const SymbolFunction& sym,
                                                    const DiscretePath& path);
StationarityResidual discrete_stationarity_residual(const SymbolFunction& sym,
                                                    const TrajectorySolution& sol, int N);

/// Dense fluctuation matrix of the sliced path integral, block order
/// (u, U~, v, V~) per interior node, dimension 4(N-1); intended for small N
/// cross-checks.  With scaled = false the raw spin displacements are used
/// instead of the b^m-rescaled ones.
Eigen::MatrixXcd fluctuation_matrix_dense(const SymbolFunction& sym, const DiscretePath& path,
                                          bool scaled = true);

/// log det of the block-tridiagonal fluctuation matrix via sequential 4x4
/// Schur complements; usable up to N of a few thousand.
cplx fluctuation_log_det(const SymbolFunction& sym, const DiscretePath& path);

inline cplx fluctuation_det(const SymbolFunction& sym, const DiscretePath& path) {
    return std::exp(fluctuation_log_det(sym, path));
}

/// Discrete determinant at slice count N against both continuum evaluations.
struct DeterminantComparison {
    cplx det_discrete{};
    cplx delta_closed{};
    cplx delta_ode{};
    double rel_dev = 0.0;  // |det_discrete - delta_closed| / |delta_closed|
};
DeterminantComparison determinant_compare(const SymbolFunction& sym,
                                          const TrajectorySolution& sol, int N);

}  // namespace spinprop
