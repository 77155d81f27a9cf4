#include "spinprop/symbols.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "spinprop/states.hpp"

namespace spinprop {

void validate_spec(const OperatorSpec& spec) {
    for (const auto& t : spec) {
        if (t.m < 0 || t.n < 0 || t.p < 0 || t.q < 0 || t.r < 0)
            throw std::invalid_argument("OperatorTerm: negative power");
        if (t.m > kMaxBosonPower || t.n > kMaxBosonPower)
            throw std::invalid_argument("OperatorTerm: boson power above limit " +
                                        std::to_string(kMaxBosonPower));
        if (t.p > kMaxSpinPower || t.q > kMaxSpinPower || t.r > kMaxSpinPower)
            throw std::invalid_argument("OperatorTerm: spin power above limit " +
                                        std::to_string(kMaxSpinPower));
    }
}

OperatorSpec adjoint_spec(const OperatorSpec& spec) {
    OperatorSpec out;
    out.reserve(spec.size());
    for (const auto& t : spec)
        out.push_back({std::conj(t.coeff), t.n, t.m, t.r, t.q, t.p});
    return out;
}

namespace {

OperatorSpec merged(const OperatorSpec& spec) {
    OperatorSpec out;
    for (const auto& t : spec) {
        auto it = std::find_if(out.begin(), out.end(), [&](const OperatorTerm& o) {
            return o.m == t.m && o.n == t.n && o.p == t.p && o.q == t.q && o.r == t.r;
        });
        if (it == out.end())
            out.push_back(t);
        else
            it->coeff += t.coeff;
    }
    return out;
}

}  // namespace

bool is_hermitian_spec(const OperatorSpec& spec) {
    OperatorSpec a = merged(spec), b = merged(adjoint_spec(spec));
    for (const auto& t : a) {
        auto it = std::find_if(b.begin(), b.end(), [&](const OperatorTerm& o) {
            return o.m == t.m && o.n == t.n && o.p == t.p && o.q == t.q && o.r == t.r;
        });
        cplx other = (it == b.end()) ? cplx(0.0) : it->coeff;
        if (std::abs(t.coeff - other) > 1e-14 * (1.0 + std::abs(t.coeff))) return false;
    }
    return true;
}

Eigen::MatrixXcd boson_annihilator(int n_max) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXcd spin_plus(SpinSize size, double hbar) {
    const int d = size.dim();
    const double j = size.j();
    Eigen::MatrixXcd Jp = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) {
        double m = -j + k;
        Jp(k + 1, k) = hbar * std::sqrt(j * (j + 1) - m * (m + 1));
    }
    return Jp;
}

Eigen::MatrixXcd spin_minus(SpinSize size, double hbar) {
    return spin_plus(size, hbar).adjoint();
}

Eigen::MatrixXcd spin_z(SpinSize size, double hbar) {
    const int d = size.dim();
    Eigen::MatrixXcd Jz = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) Jz(k, k) = hbar * (-size.j() + k);
    return Jz;
}

Eigen::MatrixXcd matrix_rep(const OperatorSpec& spec, SpinSize size, int n_max, double hbar) {
    validate_spec(spec);
    for (const auto& t : spec)
        if (n_max < std::max(t.m, t.n))
            throw std::invalid_argument("matrix_rep: n_max below maximal boson power");
    const int db = n_max + 1, ds = size.dim();
    Eigen::MatrixXcd a = boson_annihilator(n_max);
    Eigen::MatrixXcd ad = a.adjoint();
    Eigen::MatrixXcd Jp = spin_plus(size, hbar), Jm = spin_minus(size, hbar),
                     Jz = spin_z(size, hbar);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(db * ds, db * ds);
    for (const auto& t : spec) {
        Eigen::MatrixXcd bos = Eigen::MatrixXcd::Identity(db, db);
        for (int i = 0; i < t.m; ++i) bos = ad * bos;
        for (int i = 0; i < t.n; ++i) bos = bos * a;
        Eigen::MatrixXcd spn = Eigen::MatrixXcd::Identity(ds, ds);
        for (int i = 0; i < t.p; ++i) spn = Jp * spn;
        for (int i = 0; i < t.q; ++i) spn = spn * Jz;
        for (int i = 0; i < t.r; ++i) spn = spn * Jm;
        // kron(boson, spin), boson index major
        for (int ib = 0; ib < db; ++ib)
            for (int jb = 0; jb < db; ++jb) {
                if (bos(ib, jb) == cplx(0.0)) continue;
                H.block(ib * ds, jb * ds, ds, ds) += t.coeff * bos(ib, jb) * spn;
            }
    }
    return H;
}

SymbolFunction::SymbolFunction(const OperatorSpec& spec, SpinSize size, double hbar)
    : spec_(spec), size_(size), hbar_(hbar) {
    validate_spec(spec_);
    if (hbar_ <= 0.0) throw std::invalid_argument("SymbolFunction: hbar must be positive");
    const int twoj = size_.twoj;
    Eigen::MatrixXcd Jp = spin_plus(size_, hbar_), Jm = spin_minus(size_, hbar_),
                     Jz = spin_z(size_, hbar_);
    terms_.reserve(spec_.size());
    for (const auto& t : spec_) {
        Term term;
        term.coeff = t.coeff;
        term.m = t.m;
        term.n = t.n;
        term.trivial_spin = (t.p == 0 && t.q == 0 && t.r == 0);
        if (!term.trivial_spin) {
            Eigen::MatrixXcd word = Eigen::MatrixXcd::Identity(twoj + 1, twoj + 1);
            for (int i = 0; i < t.p; ++i) word = Jp * word;
            for (int i = 0; i < t.q; ++i) word = word * Jz;
            for (int i = 0; i < t.r; ++i) word = word * Jm;
            // N(V,U): coefficient of V^a U^b is sqrt(C(2j,a) C(2j,b)) <a|word|b>
            term.spin_poly.resize(twoj + 1, twoj + 1);
            for (int a = 0; a <= twoj; ++a)
                for (int b = 0; b <= twoj; ++b)
                    term.spin_poly(a, b) =
                        std::exp(0.5 * (log_binomial(twoj, a) + log_binomial(twoj, b))) *
                        word(a, b);
        }
        terms_.push_back(std::move(term));
    }
}

namespace {

// power table x^0..x^deg
void fill_powers(cplx x, int deg, std::vector<cplx>& pw) {
    pw.resize(deg + 1);
    pw[0] = 1.0;
    for (int k = 1; k <= deg; ++k) pw[k] = pw[k - 1] * x;
}

}  // namespace

SymbolValue SymbolFunction::eval(cplx u, cplx U, cplx v, cplx V) const {
    const int twoj = size_.twoj;
    const cplx w = 1.0 + U * V;
    if (std::abs(w) < 1e-12 * (1.0 + std::abs(U) * std::abs(V)))
        throw chart_singularity_error(U, V);

    SymbolValue out{};
    out.value = 0.0;

    thread_local std::vector<cplx> pu, pv, pU, pV;
    int max_b = 0;
    bool any_spin = false;
    for (const auto& t : terms_) {
        max_b = std::max({max_b, t.m, t.n});
        any_spin = any_spin || !t.trivial_spin;
    }
    fill_powers(u, max_b, pu);
    fill_powers(v, max_b, pv);
    if (any_spin) {
        fill_powers(U, twoj, pU);
        fill_powers(V, twoj, pV);
    }
    const double q2j = static_cast<double>(twoj);
    const cplx wq = any_spin ? std::pow(w, -q2j) : cplx(1.0);
    const cplx wq1 = wq / w, wq2 = wq1 / w;

    for (const auto& t : terms_) {
        // boson factor f = v^m u^n and partials
        const int m = t.m, n = t.n;
        cplx f = pv[m] * pu[n];
        cplx fu = (n > 0) ? static_cast<double>(n) * pv[m] * pu[n - 1] : cplx(0.0);
        cplx fv = (m > 0) ? static_cast<double>(m) * pv[m - 1] * pu[n] : cplx(0.0);
        cplx fuu = (n > 1) ? static_cast<double>(n * (n - 1)) * pv[m] * pu[n - 2] : cplx(0.0);
        cplx fvv = (m > 1) ? static_cast<double>(m * (m - 1)) * pv[m - 2] * pu[n] : cplx(0.0);
        cplx fuv = (m > 0 && n > 0) ? static_cast<double>(m * n) * pv[m - 1] * pu[n - 1]
                                    : cplx(0.0);

        cplx g = 1.0, gU = 0.0, gV = 0.0, gUU = 0.0, gVV = 0.0, gUV = 0.0;
        if (!t.trivial_spin) {
            // polynomial N(V,U) and partials, coefficients at (a = V power, b = U power)
            cplx P = 0.0, PU = 0.0, PV = 0.0, PUU = 0.0, PVV = 0.0, PUV = 0.0;
            for (int a = 0; a <= twoj; ++a)
                for (int b = 0; b <= twoj; ++b) {
                    const cplx c = t.spin_poly(a, b);
                    if (c == cplx(0.0)) continue;
                    P += c * pV[a] * pU[b];
                    if (b > 0) PU += c * static_cast<double>(b) * pV[a] * pU[b - 1];
                    if (a > 0) PV += c * static_cast<double>(a) * pV[a - 1] * pU[b];
                    if (b > 1) PUU += c * static_cast<double>(b * (b - 1)) * pV[a] * pU[b - 2];
                    if (a > 1) PVV += c * static_cast<double>(a * (a - 1)) * pV[a - 2] * pU[b];
                    if (a > 0 && b > 0)
                        PUV += c * static_cast<double>(a * b) * pV[a - 1] * pU[b - 1];
                }
            g = P * wq;
            gU = PU * wq - q2j * V * P * wq1;
            gV = PV * wq - q2j * U * P * wq1;
            gUU = PUU * wq - 2.0 * q2j * V * PU * wq1 + q2j * (q2j + 1.0) * V * V * P * wq2;
            gVV = PVV * wq - 2.0 * q2j * U * PV * wq1 + q2j * (q2j + 1.0) * U * U * P * wq2;
            gUV = PUV * wq - q2j * (U * PU + V * PV + P) * wq1 +
                  q2j * (q2j + 1.0) * U * V * P * wq2;
        }

        const cplx c = t.coeff;
        out.value += c * f * g;
        out.grad[0] += c * fu * g;
        out.grad[1] += c * f * gU;
        out.grad[2] += c * fv * g;
        out.grad[3] += c * f * gV;
        out.hess(0, 0) += c * fuu * g;
        out.hess(2, 2) += c * fvv * g;
        out.hess(1, 1) += c * f * gUU;
        out.hess(3, 3) += c * f * gVV;
        const cplx huv = c * fuv * g;
        out.hess(0, 2) += huv;
        out.hess(2, 0) += huv;
        const cplx hUV = c * f * gUV;
        out.hess(1, 3) += hUV;
        out.hess(3, 1) += hUV;
        const cplx huU = c * fu * gU;
        out.hess(0, 1) += huU;
        out.hess(1, 0) += huU;
        const cplx huV = c * fu * gV;
        out.hess(0, 3) += huV;
        out.hess(3, 0) += huV;
        const cplx hvU = c * fv * gU;
        out.hess(2, 1) += hvU;
        out.hess(1, 2) += hvU;
        const cplx hvV = c * fv * gV;
        out.hess(2, 3) += hvV;
        out.hess(3, 2) += hvV;
    }
    return out;
}

SymbolFunction q_symbol(const OperatorSpec& spec, SpinSize size, double hbar) {
    return SymbolFunction(spec, size, hbar);
}

OperatorSpec operator_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("operator spec: expected a JSON array");
    OperatorSpec spec;
    for (const auto& rec : j) {
        if (!rec.is_object()) throw std::invalid_argument("operator spec: expected term objects");
        static const std::vector<std::string> keys = {"coeff_re", "coeff_im", "m",
                                                      "n",        "p",        "q", "r"};
        for (auto it = rec.begin(); it != rec.end(); ++it)
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
                throw std::invalid_argument("operator spec: unknown key '" + it.key() + "'");
        OperatorTerm t;
        t.coeff = cplx(rec.value("coeff_re", 0.0), rec.value("coeff_im", 0.0));
        t.m = rec.value("m", 0);
        t.n = rec.value("n", 0);
        t.p = rec.value("p", 0);
        t.q = rec.value("q", 0);
        t.r = rec.value("r", 0);
        spec.push_back(t);
    }
    validate_spec(spec);
    return spec;
}

std::string operator_spec_to_json(const OperatorSpec& spec) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : spec)
        j.push_back({{"coeff_re", t.coeff.real()},
                     {"coeff_im", t.coeff.imag()},
                     {"m", t.m},
                     {"n", t.n},
                     {"p", t.p},
                     {"q", t.q},
                     {"r", t.r}});
    return j.dump();
}

}  // namespace spinprop
