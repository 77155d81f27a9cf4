#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spinprop/ode.hpp"
#include "spinprop/symbols.hpp"

namespace spinprop {

/// Point of the complexified flow.  u,v and U,V are independent complex
/// variables; no conjugacy is assumed between them.
struct PhasePoint {
    cplx u, U, v, V;
};

using Vector6cd = Eigen::Matrix<cplx, 6, 1>;
using Matrix6cd = Eigen::Matrix<cplx, 6, 6>;

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    int fixed_steps = 0;        // > 0 selects fixed-step mode (discrete-oracle comparisons)
    double divergence_bound = 1e6;
};

/// A solved complex trajectory with its accumulated integrands, tangent
/// matrix and determinant-flow vector, all advanced by the same RK pass.
struct Trajectory {
    std::vector<double> t;
    std::vector<PhasePoint> x;
    std::vector<PhasePoint> xdot;   // flow derivatives at the samples (dense output)
    std::vector<cplx> energy;       // H~ along the trajectory

    cplx acc_kinetic{};   // ∫ (ih/2)(u' v - v' u) - ih j (U V' - V U')/(1+UV) dt
    cplx acc_H{};         // ∫ H~ dt
    cplx acc_Hplus{};     // ∫ H_+ dt
    cplx acc_Gexpl{};     // ∫ of the explicitly assembled phase-correction integrand

    Eigen::Matrix4cd tangent = Eigen::Matrix4cd::Identity();  // M(T)
    Vector6cd detvec = Vector6cd::Zero();                     // determinant flow at T

    double duration() const { return t.empty() ? 0.0 : t.back(); }
    const PhasePoint& front() const { return x.front(); }
    const PhasePoint& back() const { return x.back(); }
    double energy_drift() const;

    /// Cubic Hermite interpolation between stored samples.
    PhasePoint at(double time) const;
};

/// Right-hand side of the complexified equations of motion.
PhasePoint eom(const SymbolFunction& sym, const PhasePoint& pt);

/// The 4x4 second-variation matrix (bold H) in the scaled coordinates,
/// evaluated at one phase point.
Eigen::Matrix4cd linearization(const SymbolFunction& sym, const PhasePoint& pt);
Eigen::Matrix4cd linearization(const SymbolValue& s, const PhasePoint& pt, int twoj);

/// Generator L of the linearized flow: xi' = (i/hbar) L xi.
Eigen::Matrix4cd xi_generator(const Eigen::Matrix4cd& boldH);

/// Generator of the six-component determinant flow.
Matrix6cd determinant_generator(const Eigen::Matrix4cd& boldH);

/// Initial condition of the determinant flow, matching Delta(0) = det Mbb = 1
/// with all pairwise components zero.
Vector6cd determinant_flow_start();

Trajectory integrate(const SymbolFunction& sym, const PhasePoint& p0, double T,
                     const IntegrateOptions& opt = {});

/// M(T) of a finished trajectory and its 2x2 blocks.
struct TangentBlocks {
    Eigen::Matrix4cd M;
    Eigen::Matrix2cd Maa, Mab, Mba, Mbb;
};
TangentBlocks tangent(const Trajectory& traj);

/// Both determinant evaluations: the flow value Delta from the ODE and the
/// closed form from the Mbb block.
struct DeterminantResult {
    Vector6cd flow;      // (Delta, Delta11, Delta22, Delta12, Delta21, Delta0) at T
    cplx delta_ode;      // flow[0]
    cplx delta_closed;   // det(Mbb) exp(-(i/h)∫H+ dt)
};
DeterminantResult determinant_flow(const SymbolFunction& sym, const Trajectory& traj);

}  // namespace spinprop
