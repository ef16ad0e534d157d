/// Capacitance matrix of a resonator chain and the small quantities derived
/// from it: the per-cell coefficients of the two-spacing pattern and the
/// eigenvalue-to-frequency map of the leading-order resonance formula.
#pragma once

#include <cmath>

#include "chain.hpp"
#include "errors.hpp"
#include "tridiag.hpp"

namespace dimerspec {

/// Assemble the symmetric tridiagonal capacitance matrix from reciprocal
/// spacings: row i couples to its neighbours with -1/s and carries the sum
/// of adjacent reciprocal spacings on the diagonal. Row sums vanish, the
/// all-ones vector spans the kernel, and the matrix is positive
/// semidefinite.
inline SymTridiag assemble_capacitance(const ResonatorChain& chain) {
    validate_chain(chain);
    const std::size_t n = chain.size();
    SymTridiag M;
    M.diag.assign(n, 0.0);
    M.offdiag.assign(n - 1, 0.0);
    // compute each reciprocal once so diagonal and off-diagonal entries
    // cancel exactly in the row sums
    std::vector<double> inv(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) inv[i] = 1.0 / chain.spacings[i];
    M.diag[0] = inv.empty() ? 0.0 : inv[0];
    for (std::size_t i = 1; i + 1 < n; ++i) M.diag[i] = inv[i - 1] + inv[i];
    if (n >= 2) M.diag[n - 1] = inv[n - 2];
    for (std::size_t i = 0; i + 1 < n; ++i) M.offdiag[i] = -inv[i];
    return M;
}

/// Per-cell coefficients of a two-spacing chain:
///   alpha       = 1/s1 + 1/s2   (interior diagonal entry)
///   beta1       = -1/s1         (odd off-diagonal entries)
///   beta2       = -1/s2         (even off-diagonal entries)
///   eta         = 2/s2          (diagonal entry at the defect centre)
///   alpha_tilde = 1/s1          (corner diagonal entry, = alpha + beta2)
struct DimerCoefficients {
    double alpha;
    double beta1;
    double beta2;
    double eta;
    double alpha_tilde;
};

inline DimerCoefficients dimer_coefficients(const DimerSpec& spec) {
    validate(spec);
    DimerCoefficients c{};
    c.alpha = 1.0 / spec.s1 + 1.0 / spec.s2;
    c.beta1 = -1.0 / spec.s1;
    c.beta2 = -1.0 / spec.s2;
    c.eta = 2.0 / spec.s2;
    c.alpha_tilde = 1.0 / spec.s1;
    return c;
}

/// Resonant frequency from a capacitance-matrix eigenvalue mu:
///   omega = v_b * sqrt(delta * mu / ell)
/// with delta the material contrast, v_b the wave speed and ell the common
/// resonator length.
inline double eigenvalue_to_frequency(double mu, double delta, double vb,
                                      double ell) {
    if (!(delta > 0.0) || !(vb > 0.0) || !(ell > 0.0))
        throw InvalidInputError("delta, vb and ell must all be positive");
    if (mu < 0.0)
        throw InvalidInputError(
            "capacitance eigenvalues are nonnegative; refusing a negative "
            "input");
    return vb * std::sqrt(delta * mu / ell);
}

} // namespace dimerspec
