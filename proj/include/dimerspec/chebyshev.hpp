/// Closed-form spectral machinery for tridiagonal matrices whose
/// off-diagonal entries alternate between two values (period-2 Toeplitz
/// structure with perturbed corners): scaled Chebyshev polynomials,
/// characteristic polynomials, seeded two-term recurrences, and the
/// interleaved analytic eigenvectors they generate — including the mirrored
/// assembly for the centrally-symmetric defect chain.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "capacitance.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "tridiag.hpp"

namespace dimerspec {

// ===========================================================================
// Chebyshev polynomials
// ===========================================================================

/// Second-kind Chebyshev polynomial U_k(y), k >= -1 (U_{-1} = 0).
inline double chebU(long k, double y) {
    if (k < -1) throw InvalidInputError("chebU requires k >= -1");
    if (k == -1) return 0.0;
    double prev = 0.0;   // U_{-1}
    double cur = 1.0;    // U_0
    for (long i = 0; i < k; ++i) {
        const double next = 2.0 * y * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// First-kind Chebyshev polynomial T_k(y), k >= 0.
inline double chebT(long k, double y) {
    if (k < 0) throw InvalidInputError("chebT requires k >= 0");
    if (k == 0) return 1.0;
    double prev = 1.0;  // T_0
    double cur = y;     // T_1
    for (long i = 1; i < k; ++i) {
        const double next = 2.0 * y * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// The quadratic substitution carrying the two-band structure:
///   y(z) = (z^2 - beta1^2 - beta2^2) / (2 beta1 beta2).
inline double y_map(double z, double beta1, double beta2) {
    if (beta1 * beta2 == 0.0)
        throw InvalidInputError("y_map requires beta1*beta2 != 0");
    return (z * z - beta1 * beta1 - beta2 * beta2) / (2.0 * beta1 * beta2);
}

/// Scaled polynomial P*_k(x) = (beta1 beta2)^k U_k(y(x - alpha)), k >= -1.
inline double p_star(long k, double x, double alpha, double beta1,
                     double beta2) {
    if (k < -1) throw InvalidInputError("p_star requires k >= -1");
    if (k == -1) return 0.0;
    const double y = y_map(x - alpha, beta1, beta2);
    return std::pow(beta1 * beta2, static_cast<double>(k)) * chebU(k, y);
}

/// P*_{-1} .. P*_{kmax} by the stable three-term recurrence
///   P*_{j+1} = 2 y (beta1 beta2) P*_j - (beta1 beta2)^2 P*_{j-1}.
/// Element [j+1] of the result is P*_j.
inline std::vector<double> p_star_seq(long kmax, double x, double alpha,
                                      double beta1, double beta2) {
    if (kmax < -1) throw InvalidInputError("p_star_seq requires kmax >= -1");
    const double prod = beta1 * beta2;
    const double y = y_map(x - alpha, beta1, beta2);
    std::vector<double> out(static_cast<std::size_t>(kmax) + 2);
    out[0] = 0.0;  // P*_{-1}
    if (kmax >= 0) out[1] = 1.0;
    for (long j = 1; j <= kmax; ++j)
        out[static_cast<std::size_t>(j) + 1] =
            2.0 * y * prod * out[static_cast<std::size_t>(j)] -
            prod * prod * out[static_cast<std::size_t>(j) - 1];
    return out;
}

// ===========================================================================
// Alternating-offdiagonal blocks with perturbed corners
// ===========================================================================

enum class BlockParity { odd, even };

/// Parameters of the block A: diagonal (alpha+a, alpha, ..., alpha, alpha+b),
/// off-diagonal alternating (beta1, beta2, beta1, ...). Size is 2k+1 for
/// odd parity, 2k for even.
struct ToeplitzParams {
    double alpha = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::size_t k = 1;
    BlockParity parity = BlockParity::odd;
};

inline void validate(const ToeplitzParams& p) {
    if (p.beta1 == 0.0 || p.beta2 == 0.0)
        throw InvalidInputError("block requires nonzero beta1 and beta2");
    if (p.k < 1) throw InvalidInputError("block requires k >= 1");
}

inline std::size_t block_size(const ToeplitzParams& p) {
    return p.parity == BlockParity::odd ? 2 * p.k + 1 : 2 * p.k;
}

inline SymTridiag build_toeplitz_block(const ToeplitzParams& p) {
    validate(p);
    const std::size_t n = block_size(p);
    SymTridiag M;
    M.diag.assign(n, p.alpha);
    M.diag[0] += p.a;
    M.diag[n - 1] += p.b;
    M.offdiag.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        M.offdiag[i] = (i % 2 == 0) ? p.beta1 : p.beta2;
    return M;
}

/// Characteristic-polynomial value together with the magnitude sum of its
/// summands, for cancellation-aware comparisons: a computed det near zero
/// is meaningful relative to `scale`, not absolutely.
struct CharPolyValue {
    double value;
    double scale;
};

/// det(xI - A) for the odd block (size 2k+1), in closed form.
inline CharPolyValue char_poly_odd(const ToeplitzParams& p, double x) {
    validate(p);
    const auto P = p_star_seq(static_cast<long>(p.k), x, p.alpha, p.beta1, p.beta2);
    const double pk = P[p.k + 1];
    const double pk1 = P[p.k];
    const double t1 = (x - p.alpha - p.a - p.b) * pk;
    const double t2 =
        (p.a * p.b * (x - p.alpha) - p.a * p.beta1 * p.beta1 -
         p.b * p.beta2 * p.beta2) *
        pk1;
    return {t1 + t2, std::abs(t1) + std::abs(t2)};
}

/// det(xI - A) for the even block (size 2k), in closed form.
inline CharPolyValue char_poly_even(const ToeplitzParams& p, double x) {
    validate(p);
    const auto P = p_star_seq(static_cast<long>(p.k), x, p.alpha, p.beta1, p.beta2);
    const double pk = P[p.k + 1];
    const double pk1 = P[p.k];
    const double pk2 = P[p.k - 1];  // P*_{k-2}; P[0] is P*_{-1}
    const double t1 = pk;
    const double t2 =
        ((p.a + p.b) * (p.alpha - x) + p.a * p.b + p.beta2 * p.beta2) * pk1;
    const double t3 = p.a * p.b * p.beta1 * p.beta1 * pk2;
    return {t1 + t2 + t3, std::abs(t1) + std::abs(t2) + std::abs(t3)};
}

// ===========================================================================
// Seeded recurrences and analytic eigenvectors
// ===========================================================================

/// Seeds for the interleaved eigenvector recurrences. beta is the
/// off-diagonal ratio beta2/beta1.
struct RecurrenceSeeds {
    double xi_p;
    double xi_q;
    double beta;
};

struct PhatQhat {
    std::vector<double> p;  // p[j] = p-hat_j
    std::vector<double> q;  // q[j] = q-hat_j
};

/// The pair of coupled Chebyshev-like sequences seeded at
///   p0 = xi_p,                       q0 = xi_q,
///   p1 = 2 mu xi_p + (xi_p-xi_q)/beta,
///   q1 = (2 mu + beta) xi_p + (xi_p-xi_q)/beta,
/// both continued by x_{j+1} = 2 mu x_j - x_{j-1}.
inline PhatQhat phat_qhat(const RecurrenceSeeds& seeds, double mu, long kmax) {
    if (seeds.beta == 0.0)
        throw InvalidInputError("recurrence seeds require beta != 0");
    if (kmax < 0) throw InvalidInputError("phat_qhat requires kmax >= 0");
    PhatQhat out;
    const auto size = static_cast<std::size_t>(kmax) + 1;
    out.p.resize(size);
    out.q.resize(size);
    const double cross = (seeds.xi_p - seeds.xi_q) / seeds.beta;
    out.p[0] = seeds.xi_p;
    out.q[0] = seeds.xi_q;
    if (kmax >= 1) {
        out.p[1] = 2.0 * mu * seeds.xi_p + cross;
        out.q[1] = (2.0 * mu + seeds.beta) * seeds.xi_p + cross;
    }
    for (long j = 2; j <= kmax; ++j) {
        const auto i = static_cast<std::size_t>(j);
        out.p[i] = 2.0 * mu * out.p[i - 1] - out.p[i - 2];
        out.q[i] = 2.0 * mu * out.q[i - 1] - out.q[i - 2];
    }
    return out;
}

namespace detail {

/// Residual over all rows except the last. The construction satisfies the
/// corner row and every interior row identically; the final row is exactly
/// the eigenvalue condition and is excluded here so callers can apply it to
/// eigenvalues of enclosing matrices that share the same leading rows.
inline double partial_rows_residual(const SymTridiag& M, double lambda,
                                    const std::vector<double>& v) {
    const std::size_t n = M.n();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double r = (M.diag[i] - lambda) * v[i];
        if (i > 0) r += M.offdiag[i - 1] * v[i - 1];
        r += M.offdiag[i] * v[i + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

inline std::vector<double> analytic_interleave(const ToeplitzParams& p,
                                               double lambda,
                                               std::size_t n_entries) {
    const double mu = y_map(lambda - p.alpha, p.beta1, p.beta2);
    const RecurrenceSeeds seeds{p.alpha + p.a - lambda, p.alpha - lambda,
                                p.beta2 / p.beta1};
    const auto seq = phat_qhat(seeds, mu, static_cast<long>(p.k));
    const double xi_q = p.alpha - lambda;

    std::vector<double> v(n_entries);
    for (std::size_t i = 0; i < n_entries; ++i) {
        const std::size_t j = i / 2;
        if (i % 2 == 0)
            v[i] = seq.q[j];
        else
            v[i] = -xi_q * seq.p[j] / p.beta1;
    }

    double amax = 0.0;
    for (double t : v) amax = std::max(amax, std::abs(t));
    if (amax == 0.0)
        throw NotAnEigenvalueError(
            "analytic eigenvector construction degenerated to the zero "
            "vector (all seeds vanish, e.g. lambda = alpha)");

    // construction sanity: corner + interior rows must vanish up to roundoff
    const auto block = build_toeplitz_block(p);
    const double scale = spectral_scale(block);
    double nv = 0.0;
    for (double t : v) nv += t * t;
    nv = std::sqrt(nv);
    if (partial_rows_residual(block, lambda, v) > 1e-6 * scale * nv)
        throw SolverFailureError(
            "analytic eigenvector recurrence lost accuracy (interior rows "
            "do not vanish)");
    return v;
}

} // namespace detail

/// Analytic eigenvector of the odd block (size 2k+1): entries interleave
/// the q-hat and p-hat sequences as
///   (q0, -(alpha-lambda) p0/beta1, q1, -(alpha-lambda) p1/beta1, ..., qk).
/// Unnormalized. lambda must be an eigenvalue of the block for the final
/// row to hold; the other rows hold by construction.
inline std::vector<double> analytic_eigenvector_odd(const ToeplitzParams& p,
                                                    double lambda) {
    validate(p);
    if (p.parity != BlockParity::odd)
        throw InvalidInputError("params describe an even block");
    return detail::analytic_interleave(p, lambda, 2 * p.k + 1);
}

/// Analytic eigenvector of the even block (size 2k): the same interleave
/// truncated after -(alpha-lambda) p_{k-1}/beta1.
inline std::vector<double> analytic_eigenvector_even(const ToeplitzParams& p,
                                                     double lambda) {
    validate(p);
    if (p.parity != BlockParity::even)
        throw InvalidInputError("params describe an odd block");
    return detail::analytic_interleave(p, lambda, 2 * p.k);
}

// ===========================================================================
// Defect-chain eigenvectors by mirrored assembly
// ===========================================================================

/// An eigenpair of the defect chain together with its mirror-symmetry
/// class: sigma = 0 for S v = v, sigma = 1 for S v = -v, where S reverses
/// the entries.
struct MirrorMode {
    EigenPair pair;
    int sigma = 0;
};

/// Closed-form eigenvector of the defect chain (N = 4m+1) for eigenvalue
/// `lambda`: the analytic solution on the leading 2m+1 entries, mirrored
/// about the central resonator with the symmetry class that actually
/// satisfies the matrix (smaller residual wins; the antisymmetric class
/// forces a zero central entry). Returned unit-normalized.
inline MirrorMode defect_eigenvector(const DimerSpec& spec, double lambda) {
    validate(spec);
    const auto c = dimer_coefficients(spec);
    ToeplitzParams params;
    params.alpha = c.alpha;
    params.beta1 = c.beta1;
    params.beta2 = c.beta2;
    params.a = c.beta2;          // corner matches the chain end row
    params.b = c.beta1 - c.beta2;  // centre row carries eta = alpha + b
    params.k = spec.m;
    params.parity = BlockParity::odd;

    const auto x = analytic_eigenvector_odd(params, lambda);
    const std::size_t n = 4 * spec.m + 1;
    const std::size_t centre = 2 * spec.m;

    const auto M = assemble_capacitance(build_defect_chain(spec));
    const double scale = spectral_scale(M);

    std::vector<double> best;
    double best_resid = std::numeric_limits<double>::infinity();
    int best_sigma = 0;
    for (int sigma = 0; sigma <= 1; ++sigma) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i <= centre; ++i) v[i] = x[i];
        if (sigma == 1) v[centre] = 0.0;
        for (std::size_t t = 1; t <= centre; ++t)
            v[centre + t] = (sigma == 0 ? 1.0 : -1.0) * v[centre - t];
        double nv = detail::norm2(v);
        if (!(nv > 0.0)) continue;
        for (double& e : v) e /= nv;
        const double resid = detail::tridiag_residual(M, lambda, v);
        if (resid < best_resid) {
            best_resid = resid;
            best = std::move(v);
            best_sigma = sigma;
        }
    }
    if (!(best_resid <= 1e-6 * scale))
        throw NotAnEigenvalueError(
            "mirrored analytic vector does not satisfy the defect matrix; "
            "lambda is not one of its eigenvalues");
    detail::canonical_sign(best);
    return MirrorMode{EigenPair{lambda, std::move(best), best_resid},
                      best_sigma};
}

} // namespace dimerspec
