#pragma once

#include <Eigen/Dense>

#include "spinprop/common.hpp"

namespace spinprop {

/// Label of a canonical (Weyl) coherent state.
struct CanonicalLabel {
    cplx z;

    CanonicalLabel() = default;
    explicit CanonicalLabel(cplx label) : z(label) {}
    /// Build from phase-space data; requires b*c = hbar.
    static CanonicalLabel from_phase_space(double q, double p, double b, double c, double hbar);
};

/// Stereographic label of an SU(2) coherent state of size j.
struct SpinLabel {
    cplx s;
    SpinSize size;

    SpinLabel() = default;
    SpinLabel(cplx label, SpinSize sz) : s(label), size(sz) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("SpinLabel: s must be finite (chart excludes the north pole)");
    }
};

/// <z1|z2> = exp(-|z1|^2/2 + conj(z1) z2 - |z2|^2/2)
cplx overlap_canonical(cplx z1, cplx z2);

/// <s1|s2> = (1 + conj(s1) s2)^(2j) / [(1+|s1|^2)^j (1+|s2|^2)^j]
cplx overlap_spin(cplx s1, cplx s2, SpinSize size);

/// Lambda = (|z'|^2 + |z''|^2)/2 + j ln[(1+|s'|^2)(1+|s''|^2)]
double normalization_lambda(cplx zp, cplx zpp, cplx sp, cplx spp, SpinSize size);

struct FockExpansion {
    Eigen::VectorXcd coeffs;  // component n = exp(-|z|^2/2) z^n / sqrt(n!)
    double tail_mass;         // 1 - sum |c_n|^2
};

/// Number-basis expansion of |z> truncated at n_max.  Throws truncation_error
/// when the discarded tail exceeds `tail_threshold` (pass <0 to skip the check).
FockExpansion fock_vector(cplx z, int n_max, double tail_threshold = 1e-12);

/// Jz-basis expansion of |s>, component k carrying weight m = -j + k.  Unit norm.
Eigen::VectorXcd spin_vector(cplx s, SpinSize size);

/// z = (q/b + i p/c)/sqrt(2); requires b, c > 0 and b*c = hbar.
cplx qp_to_label(double q, double p, double b, double c, double hbar);

}  // namespace spinprop
