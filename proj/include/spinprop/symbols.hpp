#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "spinprop/common.hpp"

namespace spinprop {

/// One normal-ordered monomial  coeff * a†^m a^n J+^p Jz^q J-^r.
/// Spin operators carry hbar (Jz eigenvalues are hbar*m), so the coefficient
/// supplies only the remaining energy factors.
struct OperatorTerm {
    cplx coeff;
    int m = 0;  // creation power
    int n = 0;  // annihilation power
    int p = 0;  // J+ power
    int q = 0;  // Jz power
    int r = 0;  // J- power
};

using OperatorSpec = std::vector<OperatorTerm>;

inline constexpr int kMaxBosonPower = 8;
inline constexpr int kMaxSpinPower = 4;

/// Throws std::invalid_argument if any term exceeds the configured power limits.
void validate_spec(const OperatorSpec& spec);

/// Hermitian adjoint of a spec (term-wise conjugate transpose).
OperatorSpec adjoint_spec(const OperatorSpec& spec);

/// True when the spec equals its adjoint term-by-term (after merging duplicates).
bool is_hermitian_spec(const OperatorSpec& spec);

/// Value, gradient and Hessian of the symbol at a point, variables ordered (u, U, v, V).
struct SymbolValue {
    cplx value;
    std::array<cplx, 4> grad{};
    Eigen::Matrix4cd hess = Eigen::Matrix4cd::Zero();
};

enum class Var : int { u = 0, U = 1, v = 2, V = 3 };

/// The analytically continued Q-symbol H~(u,U,v,V) of an operator spec, with
/// exact first and second partial derivatives of its rational representation.
///
/// Per term the boson factor is v^m u^n exactly; the spin factor is
/// N(V,U)/(1+UV)^(2j) with N the polynomial obtained from the (2j+1)-dim
/// matrix representation contracted with coherent expansion coefficients.
class SymbolFunction {
public:
    SymbolFunction(const OperatorSpec& spec, SpinSize size, double hbar);

    SpinSize size() const { return size_; }
    double hbar() const { return hbar_; }
    const OperatorSpec& spec() const { return spec_; }

    /// Full evaluation (value + all derivatives through second order).
    SymbolValue eval(cplx u, cplx U, cplx v, cplx V) const;

    cplx value(cplx u, cplx U, cplx v, cplx V) const { return eval(u, U, v, V).value; }
    cplx deriv(cplx u, cplx U, cplx v, cplx V, Var i) const {
        return eval(u, U, v, V).grad[static_cast<int>(i)];
    }
    cplx deriv2(cplx u, cplx U, cplx v, cplx V, Var i, Var j) const {
        return eval(u, U, v, V).hess(static_cast<int>(i), static_cast<int>(j));
    }

private:
    struct Term {
        cplx coeff;
        int m, n;
        bool trivial_spin;          // p = q = r = 0: spin factor is exactly 1
        Eigen::MatrixXcd spin_poly; // coefficient of V^a U^b at (a, b)
    };

    OperatorSpec spec_;
    SpinSize size_;
    double hbar_;
    std::vector<Term> terms_;
};

/// Build a SymbolFunction for a spec (validates power limits).
SymbolFunction q_symbol(const OperatorSpec& spec, SpinSize size, double hbar);

/// Matrix representation on Fock(n_max+1) ⊗ Spin(2j+1), boson index major.
Eigen::MatrixXcd matrix_rep(const OperatorSpec& spec, SpinSize size, int n_max, double hbar);

/// Ladder and Jz matrices used by matrix_rep (exposed for tests).
Eigen::MatrixXcd boson_annihilator(int n_max);
Eigen::MatrixXcd spin_plus(SpinSize size, double hbar);
Eigen::MatrixXcd spin_minus(SpinSize size, double hbar);
Eigen::MatrixXcd spin_z(SpinSize size, double hbar);

/// JSON wire format: list of {coeff_re, coeff_im, m, n, p, q, r} records.
OperatorSpec operator_spec_from_json(const std::string& text);
std::string operator_spec_to_json(const OperatorSpec& spec);

}  // namespace spinprop
