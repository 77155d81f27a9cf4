#include <doctest.h>

#include "helpers.hpp"
#include "spinprop/reference.hpp"
#include "spinprop/states.hpp"

using namespace spinprop;

namespace {

BoundaryData sample_bd(SpinSize size, double T) {
    BoundaryData bd;
    bd.zp = {0.6, 0.3};
    bd.sp = {0.4, -0.2};
    bd.zpp_conj = {0.2, -0.5};
    bd.spp_conj = {-0.3, 0.2};
    bd.size = size;
    bd.T = T;
    return bd;
}

}  // namespace

TEST_CASE("doubling the truncation leaves the exact propagator unchanged") {
    HilbertConfig cfg;
    cfg.size = SpinSize{2};
    cfg.n_max = 30;
    BoundaryData bd = sample_bd(cfg.size, 1.0);
    cplx a = exact_propagator(testutil::jc_spec(), cfg, bd);
    cfg.n_max = 60;
    cplx b = exact_propagator(testutil::jc_spec(), cfg, bd);
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("matrix exponential and state evolution agree") {
    HilbertConfig cfg;
    cfg.size = SpinSize{2};
    BoundaryData bd = sample_bd(cfg.size, 1.3);
    cplx a = exact_propagator(testutil::jc_spec(), cfg, bd, ExactMethod::matrix_exponential);
    cplx b = exact_propagator(testutil::jc_spec(), cfg, bd, ExactMethod::state_evolution);
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("harmonic generator has the closed-form propagator") {
    // <z''| exp(-i w T a†a) |z'> = exp(-|z'|^2/2 - |z''|^2/2 + conj(z'') z' e^{-i w T})
    double omega = 1.2, T = 0.9;
    HilbertConfig cfg;
    cfg.size = SpinSize{1};
    BoundaryData bd = sample_bd(cfg.size, T);
    bd.sp = bd.spp_conj = 0.0;  // freeze the spectator spin at the chart origin
    cplx K = exact_propagator(testutil::ho_spec(omega), cfg, bd);
    cplx zp = bd.zp, zpp = std::conj(bd.zpp_conj);
    cplx expect = std::exp(-0.5 * std::norm(zp) - 0.5 * std::norm(zpp) +
                           std::conj(zpp) * zp * std::exp(-iu * omega * T));
    CHECK(std::abs(K - expect) < 1e-12);
}

TEST_CASE("truncation guard raises for labels too large for the basis") {
    HilbertConfig cfg;
    cfg.size = SpinSize{1};
    cfg.n_max = 8;
    BoundaryData bd = sample_bd(cfg.size, 0.5);
    bd.zp = {4.0, 0.0};
    CHECK_THROWS_AS(exact_propagator(testutil::jc_spec(), cfg, bd), truncation_error);
}

TEST_CASE("constant-field two-level evolution matches the axis-angle form") {
    std::array<cplx, 3> C = {cplx(0.6, 0.0), cplx(-0.3, 0.0), cplx(0.8, 0.0)};
    SpinHalfField field = [&](double) { return C; };
    double T = 1.4;
    SpinHalfEvolution ev = evolve_spin_half(field, T);
    double n = std::sqrt(0.6 * 0.6 + 0.3 * 0.3 + 0.8 * 0.8);
    double a = 0.5 * n * T;
    Eigen::Matrix2cd sigma_n;
    sigma_n << C[2] / n, (C[0] - iu * C[1]) / n, (C[0] + iu * C[1]) / n, -C[2] / n;
    Eigen::Matrix2cd expect =
        std::cos(a) * Eigen::Matrix2cd::Identity() - iu * std::sin(a) * sigma_n;
    CHECK((ev.final() - expect).norm() < 1e-9);
}

TEST_CASE("two-level coherent matrix element from W") {
    // W = identity: the matrix element is the overlap <s''|s'> at j = 1/2
    cplx sp{0.4, -0.1}, spp_conj{0.3, 0.2};
    cplx val = spin_half_from_W(Eigen::Matrix2cd::Identity(), sp, spp_conj);
    CHECK(std::abs(val - overlap_spin(std::conj(spp_conj), sp, SpinSize{1})) < 1e-12);
}

TEST_CASE("exact spin-half propagator against the matrix reference") {
    // H = c1 Jx + c3 Jz at j = 1/2, constant in time
    double c1 = 0.7, c3 = -0.4, T = 1.1;
    OperatorSpec spec = {{0.5 * c1, 0, 0, 1, 0, 0}, {0.5 * c1, 0, 0, 0, 0, 1},
                         {c3, 0, 0, 0, 1, 0}};
    HilbertConfig cfg;
    cfg.size = SpinSize{1};
    cfg.n_max = 4;
    BoundaryData bd = sample_bd(cfg.size, T);
    bd.zp = 0.0;
    bd.zpp_conj = 0.0;
    cplx exact = exact_propagator(spec, cfg, bd);
    SpinHalfField field = [&](double) {
        return std::array<cplx, 3>{cplx(c1, 0.0), cplx(0.0, 0.0), cplx(c3, 0.0)};
    };
    cplx two_level = spin_half_exact(field, bd.sp, bd.spp_conj, T);
    CHECK(std::abs(exact - two_level) < 1e-9);
}

TEST_CASE("coarse group property over a label grid") {
    // sector-wise smoke check of the composition law on polar quadrature
    // grids; the slow tail convergence of the label integrals caps this at a
    // 10% qualitative tolerance
    SpinSize size{1};

    // spin sector: closure of the overlap kernel under the SU(2) measure
    cplx sp{0.4, -0.2}, spp_conj{-0.3, 0.2};
    cplx spin_acc = 0.0;
    const int sr = 60, sa = 32;
    const double smax = 20.0;
    for (int ir = 0; ir < sr; ++ir) {
        double r = (ir + 0.5) * smax / sr;
        for (int ia = 0; ia < sa; ++ia) {
            double phi = 2.0 * M_PI * ia / sa;
            cplx s = r * std::exp(iu * phi);
            double w = 1.0 + r * r;
            double mu = (size.twoj + 1) / M_PI / (w * w) * r * (smax / sr) * (2.0 * M_PI / sa);
            spin_acc += mu * overlap_spin(std::conj(spp_conj), s, size) * overlap_spin(s, sp, size);
        }
    }
    cplx spin_direct = overlap_spin(std::conj(spp_conj), sp, size);
    CHECK(std::abs(spin_acc - spin_direct) < 0.1 * std::abs(spin_direct));

    // boson sector: K(T1+T2) against the quadrature composition of two exact
    // slices, with the spin frozen at the chart origin so its factor is 1
    double omega = 1.0, T1 = 0.4, T2 = 0.7;
    HilbertConfig cfg;
    cfg.size = size;
    cfg.n_max = 55;
    BoundaryData bd = sample_bd(size, T1 + T2);
    bd.sp = bd.spp_conj = 0.0;
    cplx K_direct = exact_propagator(testutil::ho_spec(omega), cfg, bd);
    auto Kz = [&](cplx zp, cplx zpp_conj, double T) {
        BoundaryData b = bd;
        b.zp = zp;
        b.zpp_conj = zpp_conj;
        b.T = T;
        return exact_propagator(testutil::ho_spec(omega), cfg, b);
    };
    cplx acc = 0.0;
    const int nr = 16, na = 24;
    const double rmax = 3.2;
    for (int ir = 0; ir < nr; ++ir) {
        double r = (ir + 0.5) * rmax / nr;
        for (int ia = 0; ia < na; ++ia) {
            double phi = 2.0 * M_PI * ia / na;
            cplx z = r * std::exp(iu * phi);
            double mu = r * (rmax / nr) * (2.0 * M_PI / na) / M_PI;
            acc += mu * Kz(z, bd.zpp_conj, T2) * Kz(bd.zp, std::conj(z), T1);
        }
    }
    CHECK(std::abs(acc - K_direct) < 0.1 * std::abs(K_direct));
}
