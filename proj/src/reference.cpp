#include "spinprop/reference.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "spinprop/ode.hpp"
#include "spinprop/symbols.hpp"

namespace spinprop {

namespace {

Eigen::VectorXcd product_state(cplx z, cplx s, const HilbertConfig& cfg) {
    FockExpansion fock = fock_vector(z, cfg.n_max, cfg.tail_threshold);
    Eigen::VectorXcd spin = spin_vector(s, cfg.size);
    const int ds = cfg.size.dim();
    Eigen::VectorXcd out(fock.coeffs.size() * ds);
    for (int n = 0; n < fock.coeffs.size(); ++n)
        out.segment(n * ds, ds) = fock.coeffs[n] * spin;
    return out;
}

}  // namespace

cplx exact_propagator(const OperatorSpec& spec, const HilbertConfig& cfg, const BoundaryData& bd,
                      ExactMethod method, double ode_rtol) {
    if (cfg.n_max < 0) throw std::invalid_argument("exact_propagator: n_max must be >= 0");
    const cplx zpp = std::conj(bd.zpp_conj);
    const cplx spp = std::conj(bd.spp_conj);
    Eigen::VectorXcd ket = product_state(bd.zp, bd.sp, cfg);
    Eigen::VectorXcd bra = product_state(zpp, spp, cfg);
    Eigen::MatrixXcd H = matrix_rep(spec, cfg.size, cfg.n_max, cfg.hbar);

    if (method == ExactMethod::automatic)
        method = H.rows() <= 4000 ? ExactMethod::matrix_exponential : ExactMethod::state_evolution;

    if (method == ExactMethod::matrix_exponential) {
        if (is_hermitian_spec(spec)) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
            Eigen::VectorXcd phases =
                (-iu * bd.T / cfg.hbar * es.eigenvalues().array()).exp().matrix();
            Eigen::VectorXcd ket_e = es.eigenvectors().adjoint() * ket;
            Eigen::VectorXcd bra_e = es.eigenvectors().adjoint() * bra;
            return bra_e.dot(phases.asDiagonal() * ket_e);
        }
        Eigen::MatrixXcd Ut = ((-iu * bd.T / cfg.hbar) * H).exp();
        return bra.dot(Ut * ket);
    }

    Eigen::VectorXcd psi = ket;
    if (bd.T > 0.0) {
        auto rhs = [&](double /*t*/, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
            dy = (-iu / cfg.hbar) * (H * y);
        };
        Rk54::Options opt;
        opt.rtol = ode_rtol;
        opt.atol = ode_rtol * 1e-2;
        Rk54::integrate(rhs, psi, 0.0, bd.T, opt);
    }
    return bra.dot(psi);
}

SpinHalfEvolution evolve_spin_half(const SpinHalfField& field, double T, double rtol, double atol) {
    if (T < 0.0) throw std::invalid_argument("evolve_spin_half: T must be >= 0");
    SpinHalfEvolution ev;
    Eigen::VectorXcd y(4);
    Eigen::Map<Eigen::Matrix2cd>(y.data()) = Eigen::Matrix2cd::Identity();
    if (T == 0.0) {
        ev.t = {0.0};
        ev.W = {Eigen::Matrix2cd::Identity()};
        return ev;
    }
    auto rhs = [&](double t, const Eigen::VectorXcd& yy, Eigen::VectorXcd& dy) {
        std::array<cplx, 3> C = field(t);
        Eigen::Matrix2cd G;  // sigma . C in the (up, down) basis
        G << C[2], C[0] - iu * C[1], C[0] + iu * C[1], -C[2];
        Eigen::Map<const Eigen::Matrix2cd> W(yy.data());
        Eigen::Map<Eigen::Matrix2cd>(dy.data()) = (-iu / 2.0) * G * W;
    };
    auto observer = [&](double t, const Eigen::VectorXcd& yy) {
        ev.t.push_back(t);
        ev.W.push_back(Eigen::Map<const Eigen::Matrix2cd>(yy.data()));
    };
    Rk54::Options opt;
    opt.rtol = rtol;
    opt.atol = atol;
    Rk54::integrate(rhs, y, 0.0, T, opt, observer);
    return ev;
}

cplx spin_half_from_W(const Eigen::Matrix2cd& WT, cplx sp, cplx spp_conj) {
    // |s> = (s, 1)/sqrt(1+|s|^2) in the (up, down) basis
    cplx num = spp_conj * sp * WT(0, 0) + spp_conj * WT(0, 1) + sp * WT(1, 0) + WT(1, 1);
    double n2p = 1.0 + std::norm(sp);
    double n2pp = 1.0 + std::norm(spp_conj);
    return num / std::sqrt(n2p * n2pp);
}

cplx spin_half_exact(const SpinHalfField& field, cplx sp, cplx spp_conj, double T, double rtol) {
    return spin_half_from_W(evolve_spin_half(field, T, rtol).final(), sp, spp_conj);
}

}  // namespace spinprop
