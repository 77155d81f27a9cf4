#include "spinprop/dynamics.hpp"

#include <cmath>

namespace spinprop {

namespace {

PhasePoint eom_from_value(const SymbolValue& s, const PhasePoint& pt, int twoj, double hbar) {
    const cplx w = 1.0 + pt.U * pt.V;
    PhasePoint d;
    d.u = -(iu / hbar) * s.grad[2];
    d.v = (iu / hbar) * s.grad[0];
    d.U = -(iu / (twoj * hbar)) * w * w * s.grad[3];
    d.V = (iu / (twoj * hbar)) * w * w * s.grad[1];
    return d;
}

}  // namespace

PhasePoint eom(const SymbolFunction& sym, const PhasePoint& pt) {
    SymbolValue s = sym.eval(pt.u, pt.U, pt.v, pt.V);
    return eom_from_value(s, pt, sym.size().twoj, sym.hbar());
}

Eigen::Matrix4cd linearization(const SymbolValue& s, const PhasePoint& pt, int twoj) {
    const cplx w = 1.0 + pt.U * pt.V;
    const cplx d = w / std::sqrt(static_cast<double>(twoj));
    const cplx d2 = d * d;
    const cplx gU = s.grad[1], gV = s.grad[3];
    Eigen::Matrix4cd H;
    H(0, 0) = s.hess(0, 0);
    H(0, 1) = d * s.hess(0, 1);
    H(0, 2) = s.hess(0, 2);
    H(0, 3) = d * s.hess(0, 3);
    H(1, 1) = d2 * (s.hess(1, 1) + 2.0 * pt.V * gU / w);
    H(1, 2) = d * s.hess(1, 2);
    H(1, 3) = d2 * (s.hess(1, 3) + (pt.V * gV + pt.U * gU) / w);
    H(2, 2) = s.hess(2, 2);
    H(2, 3) = d * s.hess(2, 3);
    H(3, 3) = d2 * (s.hess(3, 3) + 2.0 * pt.U * gV / w);
    H(1, 0) = H(0, 1);
    H(2, 0) = H(0, 2);
    H(2, 1) = H(1, 2);
    H(3, 0) = H(0, 3);
    H(3, 1) = H(1, 3);
    H(3, 2) = H(2, 3);
    return H;
}

Eigen::Matrix4cd linearization(const SymbolFunction& sym, const PhasePoint& pt) {
    return linearization(sym.eval(pt.u, pt.U, pt.v, pt.V), pt, sym.size().twoj);
}

Eigen::Matrix4cd xi_generator(const Eigen::Matrix4cd& H) {
    Eigen::Matrix4cd L;
    L.row(0) = -H.row(2);
    L.row(1) = -H.row(3);
    L.row(2) = H.row(0);
    L.row(3) = H.row(1);
    return L;
}

Matrix6cd determinant_generator(const Eigen::Matrix4cd& H) {
    const cplx h11 = H(0, 0), h21 = H(1, 0), h22 = H(1, 1), h13 = H(0, 2), h23 = H(1, 2),
               h24 = H(1, 3), h33 = H(2, 2), h41 = H(3, 0), h43 = H(3, 2), h44 = H(3, 3);
    const cplx hp = h13 + h24;
    Matrix6cd A;
    A << 0, -h22, -h11, -h21, -h21, 0,
        h44, -2.0 * h24, 0, -h41, -h41, -h11,
        h33, 0, -2.0 * h13, -h23, -h23, -h22,
        h43, -h23, -h41, -hp, 0, h21,
        h43, -h23, -h41, 0, -hp, h21,
        0, h33, h44, -h43, -h43, -2.0 * hp;
    return A;
}

Vector6cd determinant_flow_start() {
    Vector6cd d0;
    d0 << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    return d0;
}

namespace {

// state layout: [u,U,v,V | M (16, column major) | D (6) | kin, H, Hplus, Gexpl]
constexpr int kDim = 4 + 16 + 6 + 4;

PhasePoint unpack_point(const Eigen::VectorXcd& y) {
    return PhasePoint{y[0], y[1], y[2], y[3]};
}

}  // namespace

Trajectory integrate(const SymbolFunction& sym, const PhasePoint& p0, double T,
                     const IntegrateOptions& opt) {
    if (T < 0.0) throw std::invalid_argument("integrate: T must be >= 0");
    const int twoj = sym.size().twoj;
    const double hbar = sym.hbar();
    const double j = sym.size().j();

    Trajectory traj;
    if (T == 0.0) {
        traj.t = {0.0};
        traj.x = {p0};
        traj.xdot = {eom(sym, p0)};
        traj.energy = {sym.value(p0.u, p0.U, p0.v, p0.V)};
        traj.detvec = determinant_flow_start();
        return traj;
    }

    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(kDim);
    y[0] = p0.u;
    y[1] = p0.U;
    y[2] = p0.v;
    y[3] = p0.V;
    Eigen::Map<Eigen::Matrix4cd>(y.data() + 4) = Eigen::Matrix4cd::Identity();
    Eigen::Map<Vector6cd>(y.data() + 20) = determinant_flow_start();

    auto rhs = [&](double /*t*/, const Eigen::VectorXcd& yy, Eigen::VectorXcd& dy) {
        PhasePoint pt = unpack_point(yy);
        const double b = opt.divergence_bound;
        if (std::abs(pt.u) > b || std::abs(pt.v) > b || std::abs(pt.U) > b || std::abs(pt.V) > b)
            throw solver_error("integrate: trajectory divergence (label above bound)");
        SymbolValue s = sym.eval(pt.u, pt.U, pt.v, pt.V);
        PhasePoint d = eom_from_value(s, pt, twoj, hbar);
        dy[0] = d.u;
        dy[1] = d.U;
        dy[2] = d.v;
        dy[3] = d.V;

        Eigen::Matrix4cd H = linearization(s, pt, twoj);
        Eigen::Matrix4cd L = xi_generator(H);
        Eigen::Map<const Eigen::Matrix4cd> M(yy.data() + 4);
        Eigen::Map<Eigen::Matrix4cd>(dy.data() + 4) = (iu / hbar) * L * M;

        Eigen::Map<const Vector6cd> D(yy.data() + 20);
        Eigen::Map<Vector6cd>(dy.data() + 20) = (iu / hbar) * determinant_generator(H) * D;

        const cplx w = 1.0 + pt.U * pt.V;
        dy[26] = (iu * hbar / 2.0) * (d.u * pt.v - d.v * pt.u) -
                 iu * hbar * j * (pt.U * d.V - pt.V * d.U) / w;
        dy[27] = s.value;
        dy[28] = H(0, 2) + H(1, 3);  // H_+
        // the explicitly assembled form of the same integrand
        const double dj = static_cast<double>(twoj);
        dy[29] = s.hess(2, 0) +
                 0.5 * ((2.0 * pt.U * w / dj) * s.grad[1] + (w * w / dj) * s.hess(1, 3) +
                        (2.0 * pt.V * w / dj) * s.grad[3] + (w * w / dj) * s.hess(1, 3));
    };

    auto observer = [&](double t, const Eigen::VectorXcd& yy) {
        PhasePoint pt = unpack_point(yy);
        SymbolValue s = sym.eval(pt.u, pt.U, pt.v, pt.V);
        traj.t.push_back(t);
        traj.x.push_back(pt);
        traj.xdot.push_back(eom_from_value(s, pt, twoj, hbar));
        traj.energy.push_back(s.value);
    };

    Rk54::Options ode_opt;
    ode_opt.rtol = opt.rtol;
    ode_opt.atol = opt.atol;
    ode_opt.fixed_steps = opt.fixed_steps;
    Rk54::integrate(rhs, y, 0.0, T, ode_opt, observer);

    traj.tangent = Eigen::Map<Eigen::Matrix4cd>(y.data() + 4);
    traj.detvec = Eigen::Map<Vector6cd>(y.data() + 20);
    traj.acc_kinetic = y[26];
    traj.acc_H = y[27];
    traj.acc_Hplus = y[28];
    traj.acc_Gexpl = y[29];
    return traj;
}

double Trajectory::energy_drift() const {
    double drift = 0.0;
    for (const auto& e : energy) drift = std::max(drift, std::abs(e - energy.front()));
    return drift;
}

PhasePoint Trajectory::at(double time) const {
    if (t.size() == 1) return x.front();
    if (time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    size_t k = static_cast<size_t>(it - t.begin()) - 1;
    double h = t[k + 1] - t[k];
    double s = (time - t[k]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
           h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    auto hermite = [&](cplx y0, cplx d0, cplx y1, cplx d1) {
        return h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;
    };
    PhasePoint out;
    out.u = hermite(x[k].u, xdot[k].u, x[k + 1].u, xdot[k + 1].u);
    out.U = hermite(x[k].U, xdot[k].U, x[k + 1].U, xdot[k + 1].U);
    out.v = hermite(x[k].v, xdot[k].v, x[k + 1].v, xdot[k + 1].v);
    out.V = hermite(x[k].V, xdot[k].V, x[k + 1].V, xdot[k + 1].V);
    return out;
}

TangentBlocks tangent(const Trajectory& traj) {
    TangentBlocks b;
    b.M = traj.tangent;
    b.Maa = b.M.block<2, 2>(0, 0);
    b.Mab = b.M.block<2, 2>(0, 2);
    b.Mba = b.M.block<2, 2>(2, 0);
    b.Mbb = b.M.block<2, 2>(2, 2);
    return b;
}

DeterminantResult determinant_flow(const SymbolFunction& sym, const Trajectory& traj) {
    DeterminantResult r;
    r.flow = traj.detvec;
    r.delta_ode = traj.detvec[0];
    Eigen::Matrix2cd Mbb = traj.tangent.block<2, 2>(2, 2);
    r.delta_closed = Mbb.determinant() * std::exp(-(iu / sym.hbar()) * traj.acc_Hplus);
    return r;
}

}  // namespace spinprop
