#pragma once

#include "spinprop/reference.hpp"
#include "spinprop/shooting.hpp"

namespace spinprop {

/// Per-evaluation health indicators reported next to the propagator value.
struct Diagnostics {
    double residual = 0.0;       // final boundary mismatch of the shooting solve
    double energy_drift = 0.0;   // max |H~(t) - H~(0)| along the trajectory
    int iterations = 0;          // Newton iterations of the final solve
    int branch = 0;              // branch counter accumulated along the continuation
    bool branch_jump = false;    // a warm start moved far outside the local step scale
    double abs_det_mbb = 0.0;    // caustic proximity indicator
    bool magnitude_flag = false; // |K| exceeds 1 + magnitude_tol (non-contributing saddle)
};

struct PropagatorResult {
    cplx S{};          // complex action of the solved trajectory
    cplx G{};          // second-order phase correction
    double lambda = 0; // normalization exponent of the endpoint labels
    cplx prefactor{};  // branch-tracked square root
    cplx K{};          // prefactor * exp((i/hbar)(S + G) - lambda)
    Diagnostics diag;
};

/// S = ∫[kinetic - H~]dt - (ih/2)(u'v' + u''v'') - ihj ln[(1+U'V')(1+U''V'')]
cplx action(const TrajectorySolution& sol);

/// G = (1/2)∫ H_+ dt.  Also evaluated through the explicitly assembled
/// integrand; the two accumulators must agree to 1e-6 or this throws.
cplx sk_phase(const TrajectorySolution& sol);

struct AssembleOptions {
    SolveOptions solve;
    double max_arg_step = 0.785398163397448;  // pi/4, per continuation rung
    double min_time_step = 1e-6;              // refinement floor of the time ladder
    double caustic_threshold = 1e-10;         // |det Mbb| below this is an error
    double magnitude_tol = 1e-6;              // |K| > 1 + tol sets the magnitude flag
    double jump_threshold = 10.0;
};

/// Assembles semiclassical propagators with the prefactor branch continued in
/// time from the exact T = 0 value.  Reusable across calls; scan() walks an
/// increasing time grid with warm starts and a shared branch state.
class Assembler {
public:
    explicit Assembler(SymbolFunction sym, AssembleOptions opt = {});

    PropagatorResult assemble(const BoundaryData& bd);
    std::pair<PropagatorResult, TrajectorySolution> assemble_with_solution(const BoundaryData& bd);

    /// times must be non-decreasing; bd.T is ignored.
    std::vector<PropagatorResult> scan(const BoundaryData& bd, const std::vector<double>& times);

    const SymbolFunction& symbol() const { return sym_; }

private:
    struct LadderState {
        double T = 0.0;
        cplx v0, V0;
        cplx root{1.0, 0.0};  // branch-continued prefactor at T
        int branch = 0;
        bool jumped = false;
        double prev_move = 0.0;
        bool have_prev = false;
    };

    TrajectorySolution advance(LadderState& st, const BoundaryData& target);
    PropagatorResult finish(const TrajectorySolution& sol, const LadderState& st) const;

    SymbolFunction sym_;
    AssembleOptions opt_;
};

enum class PrefactorMethod { tangent, action_derivatives };

/// Prefactor of a solved trajectory.  `tangent` re-runs the branch-tracked
/// time ladder; `action_derivatives` rebuilds it from mixed second derivatives
/// of the action via four auxiliary boundary-value solves, with the square
/// root sign matched to the tangent method.
cplx prefactor(const SymbolFunction& sym, const TrajectorySolution& sol, PrefactorMethod method,
               const AssembleOptions& opt = {}, double fd_step = 1e-5);

/// Mixed second derivatives of the action with respect to the boundary
/// labels, estimated by central differences of the endpoint identities.
Eigen::Matrix2cd action_second_derivatives(const SymbolFunction& sym,
                                           const TrajectorySolution& sol,
                                           const AssembleOptions& opt = {}, double fd_step = 1e-5);

/// H = H_z + H_s with no mixed terms: the propagator factorizes into the two
/// sector propagators.  Each factor is produced by the full machinery with
/// the other sector frozen, then the spectator overlap is divided out.
PropagatorResult separable_assemble(const SymbolFunction& sym_z, const SymbolFunction& sym_s,
                                    const BoundaryData& bd, const AssembleOptions& opt = {});

/// Spin-1/2 factorized evaluation for H = H0(a†,a) + sum of terms linear in
/// the spin operators: the orbital part runs through the full machinery and
/// the spin factor is the exact two-level evolution in the orbital field.
PropagatorResult spin_half_factorized(const SymbolFunction& sym, const BoundaryData& bd,
                                      const AssembleOptions& opt = {});

/// Componentwise field (C1, C2, C3) with sigma.C/2 = the spin-linear part of
/// the symbol evaluated on the orbital trajectory (spin-1/2 case).
SpinHalfField spin_half_field(const OperatorSpec& spec, const Trajectory& orbital, double T);

struct LargeSpinRow {
    int twoj = 0;
    cplx K_spin{};
    cplx K_canonical{};
    double rel_dev = 0.0;
};

/// Contraction check: a spin family evaluated at s = w/sqrt(2j) against a
/// fixed canonical propagator at label w, for increasing j.  wp and wpp are
/// the physical initial and final canonical labels.
std::vector<LargeSpinRow> large_spin_compare(
    const std::function<OperatorSpec(SpinSize)>& spin_family, const OperatorSpec& canonical_spec,
    const std::vector<int>& twoj_list, cplx wp, cplx wpp, double T, double hbar,
    const AssembleOptions& opt = {});

}  // namespace spinprop
