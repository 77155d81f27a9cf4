#include "spinprop/discrete.hpp"

#include <cmath>

namespace spinprop {

DiscretePath sample_path(const Trajectory& traj, int N) {
    if (N < 2) throw std::invalid_argument("sample_path: need at least two slices");
    DiscretePath p;
    const double T = traj.duration();
    p.eps = T / N;
    p.u.resize(N + 1);
    p.U.resize(N + 1);
    p.v.resize(N + 1);
    p.V.resize(N + 1);
    for (int k = 0; k <= N; ++k) {
        PhasePoint pt = traj.at(k * p.eps);
        p.u[k] = pt.u;
        p.U[k] = pt.U;
        p.v[k] = pt.v;
        p.V[k] = pt.V;
    }
    return p;
}

namespace {

// symbol data at the mixed point of slice k: (u^k, U^k, v^{k+1}, V^{k+1})
SymbolValue midpoint_symbol(const SymbolFunction& sym, const DiscretePath& p, int k) {
    return sym.eval(p.u[k], p.U[k], p.v[k + 1], p.V[k + 1]);
}

}  // namespace

StationarityResidual discrete_stationarity_residual(const SymbolFunction& sym,
                                                    const DiscretePath& p) {
    const int N = p.steps();
    const double hbar = sym.hbar();
    const double j = sym.size().j();
    const cplx pref = iu * p.eps / hbar;
    StationarityResidual out;
    out.node.resize(N - 1);
    SymbolValue fwd = midpoint_symbol(sym, p, 0);
    for (int m = 1; m < N; ++m) {
        SymbolValue bwd = fwd;  // slice m-1
        fwd = midpoint_symbol(sym, p, m);
        cplx r1 = pref * fwd.grad[0] - (p.v[m + 1] - p.v[m]);
        cplx r2 = pref * bwd.grad[2] - (p.u[m - 1] - p.u[m]);
        cplx r3 = 0.5 * pref * fwd.grad[1] -
                  j * (p.V[m + 1] / (1.0 + p.V[m + 1] * p.U[m]) -
                       p.V[m] / (1.0 + p.V[m] * p.U[m]));
        cplx r4 = 0.5 * pref * bwd.grad[3] +
                  j * (p.U[m] / (1.0 + p.V[m] * p.U[m]) -
                       p.U[m - 1] / (1.0 + p.V[m] * p.U[m - 1]));
        double n = std::max(std::max(std::abs(r1), std::abs(r2)),
                            std::max(std::abs(r3), std::abs(r4)));
        out.node[m - 1] = n;
        out.max_norm = std::max(out.max_norm, n);
    }
    return out;
}

namespace {

struct Blocks {
    std::vector<Eigen::Matrix4cd> diag;   // m = 1..N-1
    std::vector<Eigen::Matrix4cd> upper;  // m -> m+1, m = 1..N-2
};

Blocks build_blocks(const SymbolFunction& sym, const DiscretePath& p, bool scaled = true) {
    const int N = p.steps();
    if (N < 2) throw std::invalid_argument("fluctuation matrix: need at least two slices");
    const double twoj = static_cast<double>(sym.size().twoj);
    const cplx pref = iu * p.eps / sym.hbar();
    const double sq = std::sqrt(twoj);

    // b^m = 1/sqrt(B^m) with B^m = 2j/(1+V^m U^m)^2; with scaled = false the
    // rescaling is dropped and the diagonal unit entries revert to bare B^m.
    auto b_node = [&](int m) { return scaled ? (1.0 + p.V[m] * p.U[m]) / sq : cplx(1.0); };
    auto B_node = [&](int m) {
        cplx w = 1.0 + p.V[m] * p.U[m];
        return scaled ? cplx(1.0) : twoj / (w * w);
    };

    std::vector<Eigen::Matrix4cd> h(N);  // scaled Hessian at the mixed point of each slice
    for (int k = 0; k < N; ++k) h[k] = pref * midpoint_symbol(sym, p, k).hess;

    Blocks bl;
    bl.diag.resize(N - 1);
    bl.upper.resize(N - 2 > 0 ? N - 2 : 0);
    for (int m = 1; m < N; ++m) {
        const cplx bm = b_node(m);
        const cplx wm = 1.0 + p.V[m] * p.U[m];
        const cplx wf = 1.0 + p.V[m + 1] * p.U[m];      // forward mixed weight of slice m
        const cplx wb = 1.0 + p.V[m] * p.U[m - 1];      // backward mixed weight of slice m-1
        Eigen::Matrix4cd D = Eigen::Matrix4cd::Zero();
        D(0, 0) = h[m](0, 0);
        D(0, 1) = D(1, 0) = bm * h[m](0, 1);
        D(0, 2) = D(2, 0) = 1.0;
        // the second difference of the log measure contributes the O(eps)
        // spin-spin diagonal terms; they integrate to the connection part of
        // the second-variation matrix and are required for convergence
        D(1, 1) = bm * bm *
                  (h[m](1, 1) + twoj * (p.V[m + 1] * p.V[m + 1] / (wf * wf) -
                                        p.V[m] * p.V[m] / (wm * wm)));
        D(1, 3) = D(3, 1) = B_node(m);  // b^2 B = 1 in the scaled variables
        D(2, 2) = h[m - 1](2, 2);
        D(2, 3) = D(3, 2) = bm * h[m - 1](2, 3);
        D(3, 3) = bm * bm *
                  (h[m - 1](3, 3) + twoj * (p.U[m - 1] * p.U[m - 1] / (wb * wb) -
                                            p.U[m] * p.U[m] / (wm * wm)));
        bl.diag[m - 1] = D;
        if (m < N - 1) {
            const cplx bm1 = b_node(m + 1);
            const cplx wfm = 1.0 + p.V[m + 1] * p.U[m];
            const cplx Bmix = twoj / (wfm * wfm);
            Eigen::Matrix4cd C = Eigen::Matrix4cd::Zero();
            C(0, 2) = h[m](0, 2) - 1.0;
            C(0, 3) = bm1 * h[m](0, 3);
            C(1, 2) = bm * h[m](1, 2);
            C(1, 3) = bm * bm1 * (h[m](1, 3) - Bmix);
            bl.upper[m - 1] = C;
        }
    }
    return bl;
}

}  // namespace

StationarityResidual discrete_stationarity_residual(const SymbolFunction& sym,
                                                    const TrajectorySolution& sol, int N) {
    return discrete_stationarity_residual(sym, sample_path(sol.traj, N));
}

Eigen::MatrixXcd fluctuation_matrix_dense(const SymbolFunction& sym, const DiscretePath& p,
                                          bool scaled) {
    Blocks bl = build_blocks(sym, p, scaled);
    const int nb = static_cast<int>(bl.diag.size());
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(4 * nb, 4 * nb);
    for (int m = 0; m < nb; ++m) {
        M.block<4, 4>(4 * m, 4 * m) = bl.diag[m];
        if (m + 1 < nb) {
            M.block<4, 4>(4 * m, 4 * (m + 1)) = bl.upper[m];
            M.block<4, 4>(4 * (m + 1), 4 * m) = bl.upper[m].transpose();
        }
    }
    return M;
}

cplx fluctuation_log_det(const SymbolFunction& sym, const DiscretePath& p) {
    Blocks bl = build_blocks(sym, p);
    const int nb = static_cast<int>(bl.diag.size());
    cplx logdet = 0.0;
    Eigen::Matrix4cd S = bl.diag[0];
    for (int m = 0;; ++m) {
        Eigen::PartialPivLU<Eigen::Matrix4cd> lu(S);
        cplx d = lu.determinant();
        if (d == cplx(0.0))
            throw solver_error("fluctuation_log_det: singular pivot block at index " +
                               std::to_string(m));
        logdet += std::log(d);
        if (m + 1 >= nb) break;
        S = bl.diag[m + 1] - bl.upper[m].transpose() * lu.solve(bl.upper[m]);
    }
    return logdet;
}

DeterminantComparison determinant_compare(const SymbolFunction& sym,
                                          const TrajectorySolution& sol, int N) {
    DiscretePath path = sample_path(sol.traj, N);
    DeterminantComparison cmp;
    cmp.det_discrete = fluctuation_det(sym, path);
    DeterminantResult dr = determinant_flow(sym, sol.traj);
    cmp.delta_closed = dr.delta_closed;
    cmp.delta_ode = dr.delta_ode;
    cmp.rel_dev = std::abs(cmp.det_discrete - cmp.delta_closed) / std::abs(cmp.delta_closed);
    return cmp;
}

}  // namespace spinprop
