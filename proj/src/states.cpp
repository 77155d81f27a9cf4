#include "spinprop/states.hpp"

#include <cmath>

namespace spinprop {

double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("log_binomial: k out of range");
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n <= 20) {
        // exact in integer arithmetic up to n = 20
        long long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return static_cast<double>(r);
    }
    return std::exp(log_binomial(n, k));
}

CanonicalLabel CanonicalLabel::from_phase_space(double q, double p, double b, double c,
                                                double hbar) {
    return CanonicalLabel(qp_to_label(q, p, b, c, hbar));
}

cplx overlap_canonical(cplx z1, cplx z2) {
    return std::exp(-0.5 * std::norm(z1) + std::conj(z1) * z2 - 0.5 * std::norm(z2));
}

cplx overlap_spin(cplx s1, cplx s2, SpinSize size) {
    double j = size.j();
    return std::pow(1.0 + std::conj(s1) * s2, static_cast<double>(size.twoj)) /
           (std::pow(1.0 + std::norm(s1), j) * std::pow(1.0 + std::norm(s2), j));
}

double normalization_lambda(cplx zp, cplx zpp, cplx sp, cplx spp, SpinSize size) {
    return 0.5 * (std::norm(zp) + std::norm(zpp)) +
           size.j() * std::log((1.0 + std::norm(sp)) * (1.0 + std::norm(spp)));
}

FockExpansion fock_vector(cplx z, int n_max, double tail_threshold) {
    if (n_max < 0) throw std::invalid_argument("fock_vector: n_max must be >= 0");
    FockExpansion out;
    out.coeffs.resize(n_max + 1);
    // c_n = exp(-|z|^2/2) z^n / sqrt(n!), built in log space for large n
    double log_mag_z = (z == cplx(0.0)) ? 0.0 : std::log(std::abs(z));
    double arg_z = std::arg(z);
    double norm_sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        if (z == cplx(0.0)) {
            out.coeffs[n] = (n == 0) ? 1.0 : 0.0;
        } else {
            double log_mag = -0.5 * std::norm(z) + n * log_mag_z - 0.5 * log_factorial(n);
            out.coeffs[n] = std::polar(std::exp(log_mag), n * arg_z);
        }
        norm_sum += std::norm(out.coeffs[n]);
    }
    out.tail_mass = 1.0 - norm_sum;
    if (tail_threshold >= 0.0 && out.tail_mass > tail_threshold) {
        // crude estimate: Poisson tail needs n_max of a few times |z|^2
        int needed = static_cast<int>(4.0 * std::norm(z) + 30.0);
        throw truncation_error(out.tail_mass, std::max(needed, n_max + 1));
    }
    return out;
}

Eigen::VectorXcd spin_vector(cplx s, SpinSize size) {
    const int twoj = size.twoj;
    Eigen::VectorXcd v(twoj + 1);
    double log_norm = -0.5 * twoj * std::log1p(std::norm(s));
    double log_mag_s = (s == cplx(0.0)) ? 0.0 : std::log(std::abs(s));
    double arg_s = std::arg(s);
    for (int k = 0; k <= twoj; ++k) {
        if (s == cplx(0.0)) {
            v[k] = (k == 0) ? std::exp(log_norm) : 0.0;
        } else {
            double log_mag = 0.5 * log_binomial(twoj, k) + k * log_mag_s + log_norm;
            v[k] = std::polar(std::exp(log_mag), k * arg_s);
        }
    }
    return v;
}

cplx qp_to_label(double q, double p, double b, double c, double hbar) {
    if (b <= 0.0 || c <= 0.0) throw std::invalid_argument("qp_to_label: variances must be positive");
    if (std::abs(b * c - hbar) > 4.0 * std::numeric_limits<double>::epsilon() * hbar)
        throw std::invalid_argument("qp_to_label: b*c must equal hbar");
    return (q / b + iu * (p / c)) / std::sqrt(2.0);
}

}  // namespace spinprop
