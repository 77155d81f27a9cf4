#include "spinprop/shooting.hpp"

#include <cmath>

namespace spinprop {

namespace {

struct Residual {
    Trajectory traj;
    cplx rv, rV;
    double norm_inf;
};

Residual evaluate(const SymbolFunction& sym, const BoundaryData& bd, cplx v0, cplx V0,
                  const IntegrateOptions& ode) {
    Residual r;
    r.traj = integrate(sym, PhasePoint{bd.zp, bd.sp, v0, V0}, bd.T, ode);
    r.rv = r.traj.back().v - bd.zpp_conj;
    r.rV = r.traj.back().V - bd.spp_conj;
    r.norm_inf = std::max(std::abs(r.rv), std::abs(r.rV));
    return r;
}

// Sensitivity of final (v, V) to initial (v, V) with (du, dU)(0) = 0,
// converting between xi-scaled and raw spin displacements at both endpoints.
Eigen::Matrix2cd shooting_jacobian(const Trajectory& traj, int twoj) {
    const double sq = std::sqrt(static_cast<double>(twoj));
    const cplx d0 = (1.0 + traj.front().U * traj.front().V) / sq;
    const cplx dT = (1.0 + traj.back().U * traj.back().V) / sq;
    Eigen::Matrix2cd Mbb = traj.tangent.block<2, 2>(2, 2);
    Eigen::Matrix2cd J;
    J(0, 0) = Mbb(0, 0);
    J(0, 1) = Mbb(0, 1) / d0;
    J(1, 0) = dT * Mbb(1, 0);
    J(1, 1) = dT * Mbb(1, 1) / d0;
    return J;
}

}  // namespace

TrajectorySolution solve(const SymbolFunction& sym, const BoundaryData& bd,
                         std::optional<std::pair<cplx, cplx>> guess, const SolveOptions& opt) {
    TrajectorySolution sol;
    sol.bd = bd;
    if (bd.T < 0.0) throw std::invalid_argument("solve: T must be >= 0");

    if (bd.T == 0.0) {
        sol.v0 = bd.zpp_conj;
        sol.V0 = bd.spp_conj;
        sol.traj = integrate(sym, PhasePoint{bd.zp, bd.sp, sol.v0, sol.V0}, 0.0, opt.ode);
        sol.residual = 0.0;
        sol.iterations = 0;
        return sol;
    }

    cplx v0 = guess ? guess->first : std::conj(bd.zp);
    cplx V0 = guess ? guess->second : std::conj(bd.sp);

    Residual cur = evaluate(sym, bd, v0, V0, opt.ode);
    int iter = 0;
    while (cur.norm_inf > opt.tol) {
        if (iter >= opt.max_iter)
            throw solver_error("solve: max_iter exceeded, last residual " +
                                   std::to_string(cur.norm_inf),
                               cur.norm_inf);
        Eigen::Matrix2cd J = shooting_jacobian(cur.traj, bd.size.twoj);
        cplx detJ = J.determinant();
        if (std::abs(detJ) < opt.jacobian_det_min)
            throw solver_error(
                "solve: singular shooting Jacobian (|det| = " + std::to_string(std::abs(detJ)) +
                    "), trajectory near a phase-space caustic",
                cur.norm_inf);
        Eigen::Vector2cd rhs(cur.rv, cur.rV);
        Eigen::Vector2cd step = J.partialPivLu().solve(rhs);

        // backtracking line search, halving on divergence or non-decrease
        double lambda = 1.0;
        bool accepted = false;
        for (int halve = 0; halve <= opt.max_halvings; ++halve) {
            cplx v_try = v0 - lambda * step[0];
            cplx V_try = V0 - lambda * step[1];
            try {
                Residual next = evaluate(sym, bd, v_try, V_try, opt.ode);
                if (next.norm_inf < cur.norm_inf) {
                    v0 = v_try;
                    V0 = V_try;
                    cur = std::move(next);
                    accepted = true;
                    break;
                }
            } catch (const solver_error&) {
                // trial step blew up; damp and retry
            } catch (const chart_singularity_error&) {
            }
            lambda *= 0.5;
        }
        ++iter;
        if (!accepted)
            throw solver_error("solve: line search stalled, residual " +
                                   std::to_string(cur.norm_inf),
                               cur.norm_inf);
    }

    sol.v0 = v0;
    sol.V0 = V0;
    sol.traj = std::move(cur.traj);
    sol.residual = cur.norm_inf;
    sol.iterations = iter;
    return sol;
}

std::vector<TrajectorySolution> continuation(const std::vector<ContinuationPoint>& path,
                                             const ContinuationOptions& opt) {
    std::vector<TrajectorySolution> out;
    out.reserve(path.size());
    int branch = 0;
    double prev_step_scale = 0.0;
    for (size_t k = 0; k < path.size(); ++k) {
        std::optional<std::pair<cplx, cplx>> guess;
        if (!out.empty()) guess = std::make_pair(out.back().v0, out.back().V0);
        TrajectorySolution sol;
        try {
            sol = solve(path[k].sym, path[k].bd, guess, opt.solve);
        } catch (const solver_error& e) {
            throw solver_error("continuation: solve failed at path index " + std::to_string(k) +
                                   ": " + e.what(),
                               e.residual());
        }
        if (!out.empty()) {
            double move = std::abs(sol.v0 - out.back().v0) + std::abs(sol.V0 - out.back().V0);
            double scale = std::max(prev_step_scale, 1e-6);
            if (k >= 2 && move > opt.jump_threshold * scale) {
                sol.branch_jump = true;
                ++branch;
            }
            prev_step_scale = move;
        }
        sol.branch = branch;
        out.push_back(std::move(sol));
    }
    return out;
}

}  // namespace spinprop
