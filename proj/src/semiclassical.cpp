#include "spinprop/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "spinprop/states.hpp"

namespace spinprop {

cplx action(const TrajectorySolution& sol) {
    const double hbar = sol.bd.hbar;
    const double j = sol.bd.size.j();
    const PhasePoint& a = sol.traj.front();
    const PhasePoint& b = sol.traj.back();
    cplx wp = 1.0 + a.U * a.V;
    cplx wpp = 1.0 + b.U * b.V;
    return sol.traj.acc_kinetic - sol.traj.acc_H -
           (iu * hbar / 2.0) * (a.u * a.v + b.u * b.v) - iu * hbar * j * std::log(wp * wpp);
}

cplx sk_phase(const TrajectorySolution& sol) {
    cplx g_plus = 0.5 * sol.traj.acc_Hplus;
    cplx g_expl = 0.5 * sol.traj.acc_Gexpl;
    double mismatch = std::abs(g_plus - g_expl);
    if (mismatch > 1e-6 * (1.0 + std::abs(g_plus)))
        throw solver_error("sk_phase: the two phase-correction accumulators disagree by " +
                               std::to_string(mismatch),
                           mismatch);
    return g_plus;
}

namespace {

// 1 / det Mbb in the scaled displacement frame, the quantity whose
// branch-tracked square root is the prefactor.  The boundary-weight ratio of
// the raw-coordinate form is absorbed by the frame scaling; this choice is
// exact on group-element generators and covariant under time reversal.
cplx prefactor_square(const TrajectorySolution& sol) {
    Eigen::Matrix2cd Mbb = sol.traj.tangent.block<2, 2>(2, 2);
    return 1.0 / Mbb.determinant();
}

}  // namespace

Assembler::Assembler(SymbolFunction sym, AssembleOptions opt)
    : sym_(std::move(sym)), opt_(opt) {}

TrajectorySolution Assembler::advance(LadderState& st, const BoundaryData& target) {
    if (target.T < st.T)
        throw std::invalid_argument("Assembler: times must be non-decreasing within a scan");

    auto solve_at = [&](double T) {
        BoundaryData bd = target;
        bd.T = T;
        std::optional<std::pair<cplx, cplx>> guess;
        if (st.have_prev) guess = std::make_pair(st.v0, st.V0);
        return solve(sym_, bd, guess, opt_.solve);
    };

    if (target.T == st.T && st.have_prev) return solve_at(st.T);
    if (target.T == 0.0) {
        TrajectorySolution sol = solve_at(0.0);
        st.v0 = sol.v0;
        st.V0 = sol.V0;
        st.have_prev = true;
        return sol;
    }

    TrajectorySolution sol;
    double h = target.T - st.T;
    bool done = false;
    while (!done) {
        double T_next = std::min(st.T + h, target.T);
        bool ok = false;
        double dphi = 0.0;
        try {
            sol = solve_at(T_next);
            Eigen::Matrix2cd Mbb = sol.traj.tangent.block<2, 2>(2, 2);
            if (std::abs(Mbb.determinant()) < opt_.caustic_threshold)
                throw solver_error("Assembler: |det Mbb| = " +
                                       std::to_string(std::abs(Mbb.determinant())) +
                                       " below the caustic threshold at T = " +
                                       std::to_string(T_next),
                                   std::abs(Mbb.determinant()));
            cplx root = std::sqrt(prefactor_square(sol));
            if (std::abs(-root - st.root) < std::abs(root - st.root)) root = -root;
            dphi = std::abs(std::arg(root / st.root));
            if (dphi <= opt_.max_arg_step) {
                // rung accepted; update the branch state
                if (st.have_prev) {
                    double move = std::abs(sol.v0 - st.v0) + std::abs(sol.V0 - st.V0);
                    double scale = std::max(st.prev_move, 1e-6);
                    if (st.prev_move > 0.0 && move > opt_.jump_threshold * scale) {
                        st.jumped = true;
                        ++st.branch;
                    }
                    st.prev_move = move;
                }
                st.T = T_next;
                st.v0 = sol.v0;
                st.V0 = sol.V0;
                st.root = root;
                st.have_prev = true;
                ok = true;
            }
        } catch (const solver_error&) {
            if (h <= opt_.min_time_step) throw;
        }
        if (ok) {
            done = st.T >= target.T;
            if (dphi < 0.25 * opt_.max_arg_step) h *= 2.0;
        } else {
            if (h <= opt_.min_time_step)
                throw solver_error("Assembler: branch continuation stalled near T = " +
                                   std::to_string(st.T));
            h *= 0.5;
        }
    }
    return sol;
}

PropagatorResult Assembler::finish(const TrajectorySolution& sol, const LadderState& st) const {
    PropagatorResult r;
    const BoundaryData& bd = sol.bd;
    r.S = action(sol);
    r.G = sk_phase(sol);
    r.lambda = normalization_lambda(bd.zp, std::conj(bd.zpp_conj), bd.sp, std::conj(bd.spp_conj),
                                    bd.size);
    r.prefactor = st.root;
    r.K = r.prefactor * std::exp((iu / bd.hbar) * (r.S + r.G) - r.lambda);
    r.diag.residual = sol.residual;
    r.diag.energy_drift = sol.traj.energy_drift();
    r.diag.iterations = sol.iterations;
    r.diag.branch = st.branch;
    r.diag.branch_jump = st.jumped;
    r.diag.abs_det_mbb = std::abs(sol.traj.tangent.block<2, 2>(2, 2).determinant());
    r.diag.magnitude_flag = std::abs(r.K) > 1.0 + opt_.magnitude_tol;
    return r;
}

PropagatorResult Assembler::assemble(const BoundaryData& bd) {
    return assemble_with_solution(bd).first;
}

std::pair<PropagatorResult, TrajectorySolution> Assembler::assemble_with_solution(
    const BoundaryData& bd) {
    LadderState st;
    st.v0 = bd.zpp_conj;
    st.V0 = bd.spp_conj;
    TrajectorySolution sol = advance(st, bd);
    return {finish(sol, st), std::move(sol)};
}

std::vector<PropagatorResult> Assembler::scan(const BoundaryData& bd,
                                              const std::vector<double>& times) {
    LadderState st;
    st.v0 = bd.zpp_conj;
    st.V0 = bd.spp_conj;
    std::vector<PropagatorResult> out;
    out.reserve(times.size());
    for (double T : times) {
        BoundaryData target = bd;
        target.T = T;
        TrajectorySolution sol = advance(st, target);
        out.push_back(finish(sol, st));
    }
    return out;
}

Eigen::Matrix2cd action_second_derivatives(const SymbolFunction& sym,
                                           const TrajectorySolution& sol,
                                           const AssembleOptions& opt, double fd_step) {
    const BoundaryData& bd = sol.bd;
    const double hbar = bd.hbar;
    const double j = bd.size.j();
    const cplx Vpp = bd.spp_conj;

    // endpoint identities: dS/dv'' = -ih u'',  dS/dV'' = -2ihj U''/(1+V''U'')
    auto endpoint = [&](const BoundaryData& pbd) {
        TrajectorySolution psol = solve(sym, pbd, std::make_pair(sol.v0, sol.V0), opt.solve);
        const PhasePoint& b = psol.traj.back();
        return std::make_pair(-iu * hbar * b.u, -2.0 * iu * hbar * j * b.U / (1.0 + Vpp * b.U));
    };

    double dz = fd_step * (1.0 + std::abs(bd.zp));
    double ds = fd_step * (1.0 + std::abs(bd.sp));
    BoundaryData zp_p = bd, zp_m = bd, sp_p = bd, sp_m = bd;
    zp_p.zp += dz;
    zp_m.zp -= dz;
    sp_p.sp += ds;
    sp_m.sp -= ds;
    auto [fzp, gzp] = endpoint(zp_p);
    auto [fzm, gzm] = endpoint(zp_m);
    auto [fsp, gsp] = endpoint(sp_p);
    auto [fsm, gsm] = endpoint(sp_m);

    Eigen::Matrix2cd S2;
    S2(0, 0) = (fzp - fzm) / (2.0 * dz);  // S_{u'v''}
    S2(0, 1) = (gzp - gzm) / (2.0 * dz);  // S_{u'V''}
    S2(1, 0) = (fsp - fsm) / (2.0 * ds);  // S_{U'v''}
    S2(1, 1) = (gsp - gsm) / (2.0 * ds);  // S_{U'V''}
    return S2;
}

cplx prefactor(const SymbolFunction& sym, const TrajectorySolution& sol, PrefactorMethod method,
               const AssembleOptions& opt, double fd_step) {
    Assembler as(sym, opt);
    cplx tangent_value = as.assemble(sol.bd).prefactor;
    if (method == PrefactorMethod::tangent) return tangent_value;

    const BoundaryData& bd = sol.bd;
    const double twoj = static_cast<double>(bd.size.twoj);
    const PhasePoint& a = sol.traj.front();
    const PhasePoint& b = sol.traj.back();
    // det Sigma = 1/(d' d'' det Mbb) with d = (1+UV)/sqrt(2j); multiplying by
    // d' d'' recovers 1/det Mbb
    Eigen::Matrix2cd Sigma = (iu / bd.hbar) * action_second_derivatives(sym, sol, opt, fd_step);
    cplx sq = (1.0 + a.U * a.V) * (1.0 + b.U * b.V) / twoj * Sigma.determinant();
    cplx root = std::sqrt(sq);
    if (std::abs(-root - tangent_value) < std::abs(root - tangent_value)) root = -root;
    return root;
}

namespace {

void require_sector(const OperatorSpec& spec, bool orbital_only) {
    for (const auto& t : spec) {
        bool spinless = (t.p == 0 && t.q == 0 && t.r == 0);
        bool bosonless = (t.m == 0 && t.n == 0);
        if (orbital_only && !spinless)
            throw std::invalid_argument("separable_assemble: orbital spec has spin operators");
        if (!orbital_only && !bosonless)
            throw std::invalid_argument("separable_assemble: spin spec has boson operators");
    }
}

}  // namespace

PropagatorResult separable_assemble(const SymbolFunction& sym_z, const SymbolFunction& sym_s,
                                    const BoundaryData& bd, const AssembleOptions& opt) {
    require_sector(sym_z.spec(), true);
    require_sector(sym_s.spec(), false);
    Assembler az(sym_z, opt), as(sym_s, opt);
    PropagatorResult rz = az.assemble(bd);
    PropagatorResult rs = as.assemble(bd);

    cplx O_z = overlap_canonical(std::conj(bd.zpp_conj), bd.zp);
    cplx O_s = overlap_spin(std::conj(bd.spp_conj), bd.sp, bd.size);
    // static exponent whose normalized exponential is the spectator product
    cplx S0 = -iu * bd.hbar * bd.zp * bd.zpp_conj -
              2.0 * iu * bd.hbar * bd.size.j() * std::log(1.0 + bd.sp * bd.spp_conj);

    PropagatorResult r;
    r.S = rz.S + rs.S - S0;
    r.G = rz.G + rs.G;
    r.lambda = rz.lambda;
    r.prefactor = rz.prefactor * rs.prefactor;
    r.K = rz.K * rs.K / (O_z * O_s);
    r.diag.residual = std::max(rz.diag.residual, rs.diag.residual);
    r.diag.energy_drift = std::max(rz.diag.energy_drift, rs.diag.energy_drift);
    r.diag.iterations = std::max(rz.diag.iterations, rs.diag.iterations);
    r.diag.branch = rz.diag.branch + rs.diag.branch;
    r.diag.branch_jump = rz.diag.branch_jump || rs.diag.branch_jump;
    r.diag.abs_det_mbb = std::min(rz.diag.abs_det_mbb, rs.diag.abs_det_mbb);
    r.diag.magnitude_flag = std::abs(r.K) > 1.0 + opt.magnitude_tol;
    return r;
}

SpinHalfField spin_half_field(const OperatorSpec& spec, const Trajectory& orbital, double T) {
    struct Mono {
        cplx c;
        int m, n;
    };
    auto plus = std::make_shared<std::vector<Mono>>();
    auto minus = std::make_shared<std::vector<Mono>>();
    auto zed = std::make_shared<std::vector<Mono>>();
    for (const auto& t : spec) {
        if (t.p + t.q + t.r == 0) continue;
        if (t.p + t.q + t.r > 1)
            throw std::invalid_argument("spin_half_field: spec is not linear in the spin operators");
        Mono mo{t.coeff, t.m, t.n};
        if (t.p == 1)
            plus->push_back(mo);
        else if (t.r == 1)
            minus->push_back(mo);
        else
            zed->push_back(mo);
    }
    Trajectory traj = orbital;
    return [plus, minus, zed, traj, T](double t) {
        PhasePoint pt = traj.at(std::clamp(t, 0.0, T));
        auto sum = [&](const std::vector<Mono>& ms) {
            cplx acc = 0.0;
            for (const auto& mo : ms)
                acc += mo.c * std::pow(pt.v, mo.m) * std::pow(pt.u, mo.n);
            return acc;
        };
        cplx sp = sum(*plus), sm = sum(*minus), sz = sum(*zed);
        return std::array<cplx, 3>{sp + sm, iu * (sp - sm), sz};
    };
}

PropagatorResult spin_half_factorized(const SymbolFunction& sym, const BoundaryData& bd,
                                      const AssembleOptions& opt) {
    if (bd.size.twoj != 1)
        throw std::invalid_argument("spin_half_factorized: requires j = 1/2");
    OperatorSpec orbital_terms;
    for (const auto& t : sym.spec()) {
        if (t.p + t.q + t.r > 1)
            throw std::invalid_argument(
                "spin_half_factorized: spec is not linear in the spin operators");
        if (t.p + t.q + t.r == 0) orbital_terms.push_back(t);
    }

    SymbolFunction sym0 = q_symbol(orbital_terms, bd.size, bd.hbar);
    Assembler a0(sym0, opt);
    auto [r0, sol0] = a0.assemble_with_solution(bd);

    cplx O_s = overlap_spin(std::conj(bd.spp_conj), bd.sp, bd.size);
    cplx K_z = r0.K / O_s;
    cplx K_s = spin_half_exact(spin_half_field(sym.spec(), sol0.traj, bd.T), bd.sp, bd.spp_conj,
                               bd.T, opt.solve.ode.rtol);

    PropagatorResult r = r0;
    r.K = K_z * K_s;  // factorized value; S, G, prefactor describe the orbital run
    r.diag.magnitude_flag = std::abs(r.K) > 1.0 + opt.magnitude_tol;
    return r;
}

std::vector<LargeSpinRow> large_spin_compare(
    const std::function<OperatorSpec(SpinSize)>& spin_family, const OperatorSpec& canonical_spec,
    const std::vector<int>& twoj_list, cplx wp, cplx wpp, double T, double hbar,
    const AssembleOptions& opt) {
    require_sector(canonical_spec, true);

    BoundaryData bd_c;
    bd_c.zp = wp;
    bd_c.zpp_conj = std::conj(wpp);
    bd_c.sp = 0.0;
    bd_c.spp_conj = 0.0;
    bd_c.size = SpinSize{1};  // inert spectator spin
    bd_c.hbar = hbar;
    bd_c.T = T;
    Assembler ac(q_symbol(canonical_spec, bd_c.size, hbar), opt);
    cplx K_can = ac.assemble(bd_c).K;

    std::vector<LargeSpinRow> rows;
    rows.reserve(twoj_list.size());
    for (int twoj : twoj_list) {
        SpinSize size{twoj};
        double sq = std::sqrt(static_cast<double>(twoj));
        BoundaryData bd;
        bd.zp = 0.0;
        bd.zpp_conj = 0.0;
        bd.sp = wp / sq;
        bd.spp_conj = std::conj(wpp) / sq;
        bd.size = size;
        bd.hbar = hbar;
        bd.T = T;
        Assembler as(q_symbol(spin_family(size), size, hbar), opt);
        LargeSpinRow row;
        row.twoj = twoj;
        row.K_spin = as.assemble(bd).K;
        row.K_canonical = K_can;
        row.rel_dev = std::abs(row.K_spin - K_can) / std::abs(K_can);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace spinprop
