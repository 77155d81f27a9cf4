// Acceptance gate: one line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cstdio>
#include <vector>

#include "helpers.hpp"
#include "spinprop/discrete.hpp"
#include "spinprop/semiclassical.hpp"
#include "spinprop/states.hpp"

using namespace spinprop;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BoundaryData make_bd(cplx zp, cplx sp, cplx zpp, cplx spp, SpinSize size, double T,
                     double hbar = 1.0) {
    BoundaryData bd;
    bd.zp = zp;
    bd.sp = sp;
    bd.zpp_conj = std::conj(zpp);
    bd.spp_conj = std::conj(spp);
    bd.size = size;
    bd.hbar = hbar;
    bd.T = T;
    return bd;
}

BoundaryData random_bd(testutil::Rng& rng, SpinSize size, double T) {
    return make_bd(rng.disk(0.8), rng.disk(0.6), rng.disk(0.8), rng.disk(0.6), size, T);
}

double rel_err(cplx approx, cplx exact) { return std::abs(approx - exact) / std::abs(exact); }

// 1. quadratic canonical generator is semiclassically exact
void criterion1() {
    SymbolFunction sym = q_symbol(testutil::ho_spec(1.0), SpinSize{2}, 1.0);
    HilbertConfig hc;
    hc.size = SpinSize{2};
    double worst = 0.0, slowest = 0.0;
    for (double T : {0.5, 1.0, 2.0}) {
        auto t0 = std::chrono::steady_clock::now();
        BoundaryData bd = make_bd({1.0, 0.5}, {0.2, 0.0}, {0.3, -0.2}, {0.2, 0.0}, SpinSize{2}, T);
        cplx K = Assembler(sym).assemble(bd).K;
        cplx Ke = exact_propagator(sym.spec(), hc, bd);
        worst = std::max(worst, rel_err(K, Ke));
        slowest = std::max(slowest, seconds_since(t0));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "quadratic canonical generator exact: max rel err %.2e (<= 1e-7), max %.2fs/point",
                  worst, slowest);
    report(1, worst <= 1e-7 && slowest < 1.0, buf);
}

// 2. linear spin generator is semiclassically exact
void criterion2() {
    testutil::Rng rng(102);
    double worst = 0.0;
    for (int twoj : {1, 2, 10}) {
        SymbolFunction sym = q_symbol(testutil::jz_spec(1.0), SpinSize{twoj}, 1.0);
        HilbertConfig hc;
        hc.size = SpinSize{twoj};
        for (double T : {0.5, 2.0}) {
            BoundaryData bd = make_bd(rng.disk(1.0), rng.disk(2.0), rng.disk(1.0), rng.disk(2.0),
                                      SpinSize{twoj}, T);
            cplx K = Assembler(sym).assemble(bd).K;
            cplx Ke = exact_propagator(sym.spec(), hc, bd);
            worst = std::max(worst, rel_err(K, Ke));
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "linear spin generator exact: max rel err %.2e (<= 1e-7)",
                  worst);
    report(2, worst <= 1e-7, buf);
}

// 3. separable generators factorize
void criterion3() {
    OperatorSpec full = testutil::ho_spec(1.0);
    OperatorSpec jz = testutil::jz_spec(0.9);
    full.insert(full.end(), jz.begin(), jz.end());
    SymbolFunction sym = q_symbol(full, SpinSize{2}, 1.0);
    SymbolFunction sym_z = q_symbol(testutil::ho_spec(1.0), SpinSize{2}, 1.0);
    SymbolFunction sym_s = q_symbol(testutil::jz_spec(0.9), SpinSize{2}, 1.0);
    testutil::Rng rng(103);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        BoundaryData bd = random_bd(rng, SpinSize{2}, 1.0);
        cplx K_full = Assembler(sym).assemble(bd).K;
        cplx K_fact = separable_assemble(sym_z, sym_s, bd).K;
        worst = std::max(worst, rel_err(K_fact, K_full));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "separable factorization: max rel dev %.2e (<= 1e-8)", worst);
    report(3, worst <= 1e-8, buf);
}

// 4. boundary derivatives of the action
void criterion4() {
    SymbolFunction sym = q_symbol(testutil::jc_spec(1.0, 0.9, 0.2), SpinSize{2}, 1.0);
    const double hbar = 1.0, j = 1.0, h = 1e-6;
    testutil::Rng rng(104);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        BoundaryData bd = random_bd(rng, SpinSize{2}, 0.8);
        TrajectorySolution sol = solve(sym, bd);
        std::pair<cplx, cplx> warm{sol.v0, sol.V0};
        auto S_of = [&](const BoundaryData& b) { return action(solve(sym, b, warm)); };
        auto fd = [&](cplx BoundaryData::* field) {
            BoundaryData bp = bd, bm = bd;
            bp.*field += h;
            bm.*field -= h;
            return (S_of(bp) - S_of(bm)) / (2.0 * h);
        };
        const PhasePoint& x0 = sol.traj.front();
        const PhasePoint& xT = sol.traj.back();
        BoundaryData bp = bd, bm = bd;
        bp.T += h;
        bm.T -= h;
        cplx targets[5] = {-iu * hbar * x0.v, -iu * hbar * xT.u,
                           -2.0 * iu * hbar * j * x0.V / (1.0 + x0.U * x0.V),
                           -2.0 * iu * hbar * j * xT.U / (1.0 + xT.U * xT.V),
                           -sol.traj.energy.front()};
        cplx values[5] = {fd(&BoundaryData::zp), fd(&BoundaryData::zpp_conj),
                          fd(&BoundaryData::sp), fd(&BoundaryData::spp_conj),
                          (S_of(bp) - S_of(bm)) / (2.0 * h)};
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::abs(values[i] - targets[i]) /
                                        std::max(1.0, std::abs(targets[i])));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "action boundary derivatives: max rel dev %.2e (<= 1e-5)",
                  worst);
    report(4, worst <= 1e-5, buf);
}

// 5. tangent-matrix and action-derivative prefactors agree
void criterion5() {
    SymbolFunction sym = q_symbol(testutil::jc_spec(1.0, 0.9, 0.2), SpinSize{2}, 1.0);
    testutil::Rng rng(105);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        BoundaryData bd = random_bd(rng, SpinSize{2}, 0.8);
        TrajectorySolution sol = solve(sym, bd);
        cplx a = prefactor(sym, sol, PrefactorMethod::tangent);
        cplx b = prefactor(sym, sol, PrefactorMethod::action_derivatives);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "prefactor construction agreement: max rel dev %.2e (<= 1e-4)",
                  worst);
    report(5, worst <= 1e-4, buf);
}

// 6. time-sliced determinant oracle converges to the continuum value
void criterion6() {
    struct Case {
        const char* name;
        OperatorSpec spec;
    };
    std::vector<Case> cases = {{"harmonic", testutil::ho_spec(1.0)},
                               {"coupled", testutil::jc_spec(1.0, 0.9, 0.3)}};
    bool pass = true;
    double final_dev = 0.0, runtime = 0.0;
    for (const auto& c : cases) {
        SymbolFunction sym = q_symbol(c.spec, SpinSize{2}, 1.0);
        BoundaryData bd =
            make_bd({0.2, 0.1}, {0.3, -0.1}, {0.3, 0.0}, {0.2, 0.25}, SpinSize{2}, 1.0);
        TrajectorySolution sol = solve(sym, bd);
        double prev = 1e300;
        for (int N : {250, 500, 1000, 2000}) {
            auto t0 = std::chrono::steady_clock::now();
            DeterminantComparison cmp = determinant_compare(sym, sol, N);
            double dt = seconds_since(t0);
            // non-increasing, with slack for the machine-precision floor
            if (cmp.rel_dev > prev * (1.0 + 1e-6) + 1e-12) pass = false;
            prev = cmp.rel_dev;
            if (N == 2000) {
                if (cmp.rel_dev > 0.05 || dt > 30.0) pass = false;
                final_dev = std::max(final_dev, cmp.rel_dev);
                runtime = std::max(runtime, dt);
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "determinant oracle: monotone, N=2000 rel dev %.2e (<= 5e-2), %.2fs", final_dev,
                  runtime);
    report(6, pass, buf);
}

// 7. factorized spin-1/2 error decreases with hbar at fixed classical data
void criterion7() {
    bool pass = true;
    std::vector<double> errs;
    for (double hbar : {1.0, 0.5, 0.25}) {
        double scale = 1.0 / std::sqrt(hbar);
        SymbolFunction sym = q_symbol(testutil::jc_spec(1.0, 0.9, 0.3), SpinSize{1}, hbar);
        BoundaryData bd = make_bd(scale * cplx(0.4, 0.2), {0.3, -0.1}, scale * cplx(0.3, -0.1),
                                  {0.2, -0.25}, SpinSize{1}, 2.0, hbar);
        PropagatorResult fact = spin_half_factorized(sym, bd);
        HilbertConfig hc;
        hc.size = SpinSize{1};
        hc.n_max = 80;
        hc.hbar = hbar;
        cplx Ke = exact_propagator(sym.spec(), hc, bd);
        errs.push_back(rel_err(fact.K, Ke));
    }
    for (size_t k = 1; k < errs.size(); ++k)
        if (errs[k] >= errs[k - 1]) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "spin-1/2 factorization: rel err %.2e -> %.2e -> %.2e decreasing over hbar "
                  "{1, 1/2, 1/4}",
                  errs[0], errs[1], errs[2]);
    report(7, pass, buf);
}

// 8. spin propagator contracts onto the canonical one as j grows
void criterion8() {
    auto t0 = std::chrono::steady_clock::now();
    double omega0 = 1.0, g = 0.4;
    auto family = [&](SpinSize sz) {
        double c = g / std::sqrt(static_cast<double>(sz.twoj));
        return OperatorSpec{{omega0, 0, 0, 0, 1, 0},
                            {omega0 * sz.j(), 0, 0, 0, 0, 0},
                            {c, 0, 0, 1, 0, 0},
                            {c, 0, 0, 0, 0, 1}};
    };
    OperatorSpec canonical = {{omega0, 1, 1, 0, 0, 0}, {g, 1, 0, 0, 0, 0}, {g, 0, 1, 0, 0, 0}};
    std::vector<LargeSpinRow> rows = large_spin_compare(family, canonical, {20, 40, 80},
                                                        {0.6, 0.2}, {0.3, -0.4}, 1.0, 1.0);
    bool pass = rows.size() == 3;
    double slope = 0.0;
    if (pass) {
        for (size_t k = 1; k < rows.size(); ++k) {
            double ratio = rows[k].rel_dev / rows[k - 1].rel_dev;
            if (ratio < 0.35 || ratio > 0.65) pass = false;
        }
        slope = std::log2(rows[2].rel_dev / rows[0].rel_dev) / 2.0;
        if (slope < -1.3 || slope > -0.7) pass = false;
        if (seconds_since(t0) > 60.0) pass = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "large-spin contraction: dev %.2e -> %.2e -> %.2e, slope %.2f (in -1 +- 0.3)",
                  rows[0].rel_dev, rows[1].rel_dev, rows[2].rel_dev, slope);
    report(8, pass, buf);
}

// 9. conservation and conjugacy invariants of the flow
void criterion9() {
    SymbolFunction sym = q_symbol(testutil::jc_spec(), SpinSize{2}, 1.0);
    IntegrateOptions opt;  // rtol 1e-10
    testutil::Rng rng(109);
    double worst_drift = 0.0, worst_conj = 0.0;
    for (int k = 0; k < 100; ++k) {
        cplx u0 = rng.disk(0.8), U0 = rng.disk(0.6);
        // conjugate initial data keeps the trajectory on the real slice of
        // the complexified flow for a hermitian generator
        PhasePoint p0{u0, U0, std::conj(u0), std::conj(U0)};
        Trajectory traj = integrate(sym, p0, 1.0, opt);
        worst_drift = std::max(worst_drift, traj.energy_drift());
        const PhasePoint& pT = traj.back();
        worst_conj = std::max({worst_conj, std::abs(pT.v - std::conj(pT.u)),
                               std::abs(pT.V - std::conj(pT.U))});
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "flow invariants: drift %.2e (<= 1e-8), conjugacy %.2e (<= 1e-9)", worst_drift,
                  worst_conj);
    report(9, worst_drift <= 100.0 * opt.rtol && worst_conj <= 10.0 * opt.rtol, buf);
}

// 10. T = 0 reproduces the overlap product
void criterion10() {
    SymbolFunction sym = q_symbol(testutil::jc_spec(), SpinSize{2}, 1.0);
    Assembler as(sym);
    testutil::Rng rng(110);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        BoundaryData bd = random_bd(rng, SpinSize{2}, 0.0);
        cplx K = as.assemble(bd).K;
        cplx expect = overlap_canonical(std::conj(bd.zpp_conj), bd.zp) *
                      overlap_spin(std::conj(bd.spp_conj), bd.sp, bd.size);
        worst = std::max(worst, std::abs(K - expect));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "T = 0 overlap identity: max abs dev %.2e (<= 1e-12)", worst);
    report(10, worst <= 1e-12, buf);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
