/// Self-contained symmetric tridiagonal eigensolver.
///
/// Eigenvalues come from Sturm-count bisection (LDL^T inertia with a pivot
/// floor), eigenvectors from shifted inverse iteration on a partially
/// pivoted tridiagonal LU. A dense cyclic-Jacobi routine doubles as an
/// independent oracle for small problems, sharing no code path with the
/// bisection solver beyond the matrix type itself.
///
/// Determinism: single-threaded, no system RNG; restart vectors for stubborn
/// inverse-iteration cases come from the counter hash, so repeated runs are
/// bit-identical.
#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hashing.hpp"

namespace dimerspec {

// ===========================================================================
// Matrix type
// ===========================================================================

/// Symmetric tridiagonal matrix: diag has n entries, offdiag n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t n() const noexcept { return diag.size(); }
};

inline void validate(const SymTridiag& M) {
    if (M.diag.empty())
        throw InvalidInputError("matrix must have at least one row");
    if (M.offdiag.size() + 1 != M.diag.size())
        throw InvalidInputError("offdiag must have exactly n-1 entries");
    for (double v : M.diag)
        if (!std::isfinite(v))
            throw InvalidInputError("matrix entries must be finite");
    for (double v : M.offdiag)
        if (!std::isfinite(v))
            throw InvalidInputError("matrix entries must be finite");
}

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;   // ||M v - value v||_2 with unit v
};

struct Spectrum {
    std::vector<EigenPair> pairs;          // sorted by value, ascending
    std::uint64_t matrix_fingerprint = 0;  // FNV-1a of the input matrix
};

/// FNV-1a over a canonical little-endian byte rendering of the matrix.
inline std::uint64_t matrix_fingerprint(const SymTridiag& M) {
    std::uint64_t h = fnv1a64("symtridiag");
    const std::uint64_t n = M.n();
    unsigned char nb[8];
    for (int i = 0; i < 8; ++i) nb[i] = static_cast<unsigned char>(n >> (8 * i));
    h = fnv1a64(nb, 8, h);
    for (double v : M.diag) h = fnv1a64_double(v, h);
    for (double v : M.offdiag) h = fnv1a64_double(v, h);
    return h;
}

// ===========================================================================
// Scale bounds
// ===========================================================================

/// Gershgorin-type bound on the spectral magnitude: max_i |d_i| + r_i where
/// r_i sums the adjacent off-diagonal magnitudes. Used to scale tolerances.
inline double spectral_scale(const SymTridiag& M) {
    const std::size_t n = M.n();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(M.diag[i]);
        if (i > 0) r += std::abs(M.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(M.offdiag[i]);
        scale = std::max(scale, r);
    }
    return std::max(scale, std::numeric_limits<double>::min());
}

/// Closed interval guaranteed to contain every eigenvalue.
inline std::pair<double, double> eigenvalue_bracket(const SymTridiag& M) {
    const std::size_t n = M.n();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(M.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(M.offdiag[i]);
        lo = std::min(lo, M.diag[i] - r);
        hi = std::max(hi, M.diag[i] + r);
    }
    // widen so strict/loose comparisons at the ends cannot lose eigenvalues
    const double pad = 1e-12 * spectral_scale(M) + DBL_MIN;
    return {lo - pad, hi + pad};
}

// ===========================================================================
// Sturm counts
// ===========================================================================

/// Number of eigenvalues strictly below x, by the signs of the LDL^T pivots
/// of M - xI. Pivots closer to zero than a floor are forced negative, so a
/// shift landing exactly on an eigenvalue counts it as below; bisection
/// only needs the count to be monotone in x, which this preserves.
inline std::size_t count_below(const SymTridiag& M, double x) {
    const std::size_t n = M.n();
    double max_e2 = 1.0;
    for (double e : M.offdiag) max_e2 = std::max(max_e2, e * e);
    const double pivmin = DBL_MIN * max_e2;

    std::size_t count = 0;
    double q = M.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        const double e = M.offdiag[i - 1];
        q = (M.diag[i] - x) - e * (e / q);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

// ===========================================================================
// Eigenvalues by bisection
// ===========================================================================

inline double default_bisection_atol(const SymTridiag& M) {
    return 1e-12 * spectral_scale(M);
}

namespace detail {

/// Bisect for the k-th (0-based, ascending) eigenvalue inside [lo, hi],
/// which must already bracket it: count_below(lo) <= k < count_below(hi).
inline double bisect_kth(const SymTridiag& M, std::size_t k, double lo,
                         double hi, double atol) {
    if (M.n() == 1) return M.diag[0];  // no coupling, no bisection error
    for (int iter = 0; iter < 200 && (hi - lo) > atol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at rounding limit
        if (count_below(M, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// All eigenvalues, ascending. `atol` is the absolute bisection width;
/// defaults to 1e-12 times the spectral scale.
inline std::vector<double> eigenvalues(const SymTridiag& M,
                                       std::optional<double> atol = {}) {
    validate(M);
    const std::size_t n = M.n();
    const double tol = atol.value_or(default_bisection_atol(M));
    if (!(tol > 0.0)) throw InvalidInputError("bisection atol must be positive");
    const auto [lo0, hi0] = eigenvalue_bracket(M);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k)
        vals[k] = detail::bisect_kth(M, k, lo0, hi0, tol);
    std::sort(vals.begin(), vals.end());  // guard against atol-level inversions
    return vals;
}

/// Eigenvalues in the half-open window [lo, hi), ascending.
inline std::vector<double> eigenvalues_in(const SymTridiag& M, double lo,
                                          double hi,
                                          std::optional<double> atol = {}) {
    validate(M);
    if (!(lo < hi)) throw InvalidInputError("window must satisfy lo < hi");
    const double tol = atol.value_or(default_bisection_atol(M));
    if (!(tol > 0.0)) throw InvalidInputError("bisection atol must be positive");
    const std::size_t k_lo = count_below(M, lo);
    const std::size_t k_hi = count_below(M, hi);
    const auto [lo0, hi0] = eigenvalue_bracket(M);
    std::vector<double> vals;
    vals.reserve(k_hi - k_lo);
    for (std::size_t k = k_lo; k < k_hi; ++k)
        vals.push_back(detail::bisect_kth(M, k, std::max(lo0, lo - tol),
                                          std::min(hi0, hi + tol), tol));
    std::sort(vals.begin(), vals.end());
    return vals;
}

/// The k-th eigenvalue (0-based, ascending).
inline double eigenvalue_at(const SymTridiag& M, std::size_t k,
                            std::optional<double> atol = {}) {
    validate(M);
    if (k >= M.n()) throw InvalidInputError("eigenvalue index out of range");
    const double tol = atol.value_or(default_bisection_atol(M));
    const auto [lo0, hi0] = eigenvalue_bracket(M);
    return detail::bisect_kth(M, k, lo0, hi0, tol);
}

// ===========================================================================
// Eigenvectors by inverse iteration
// ===========================================================================

namespace detail {

/// Partially pivoted LU of a general tridiagonal matrix (three input bands;
/// the factorization grows a second superdiagonal du2 when rows swap).
struct TridiagLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv;  // piv[i] == 1 means rows i, i+1 were swapped
};

inline TridiagLU factor_tridiag(std::vector<double> dl, std::vector<double> d,
                                std::vector<double> du) {
    const std::size_t n = d.size();
    TridiagLU lu;
    lu.du2.assign(n >= 2 ? n - 2 : 0, 0.0);
    lu.piv.assign(n >= 1 ? n - 1 : 0, 0);
    const double tiny = DBL_MIN;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) < tiny) d[i] = (d[i] < 0.0 ? -tiny : tiny);
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if (i + 2 < n) {
                lu.du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            lu.piv[i] = 1;
        }
    }
    if (std::abs(d[n - 1]) < tiny) d[n - 1] = (d[n - 1] < 0.0 ? -tiny : tiny);
    lu.dl = std::move(dl);
    lu.d = std::move(d);
    lu.du = std::move(du);
    return lu;
}

inline void solve_tridiag(const TridiagLU& lu, std::vector<double>& b) {
    const std::size_t n = lu.d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (lu.piv[i] == 0) {
            b[i + 1] -= lu.dl[i] * b[i];
        } else {
            const double temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - lu.dl[i] * b[i];
        }
    }
    b[n - 1] /= lu.d[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - lu.du[n - 2] * b[n - 1]) / lu.d[n - 2];
    for (std::size_t ii = n; ii >= 3; --ii) {
        const std::size_t i = ii - 3;
        b[i] = (b[i] - lu.du[i] * b[i + 1] - lu.du2[i] * b[i + 2]) / lu.d[i];
    }
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double tridiag_residual(const SymTridiag& M, double lambda,
                               const std::vector<double>& v) {
    const std::size_t n = M.n();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (M.diag[i] - lambda) * v[i];
        if (i > 0) r += M.offdiag[i - 1] * v[i - 1];
        if (i + 1 < n) r += M.offdiag[i] * v[i + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

/// Make the largest-magnitude entry positive (ties: lowest index wins).
inline void canonical_sign(std::vector<double>& v) {
    std::size_t imax = 0;
    double amax = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > amax) {
            amax = a;
            imax = i;
        }
    }
    if (v[imax] < 0.0)
        for (double& x : v) x = -x;
}

inline void fill_restart_vector(std::vector<double>& v, std::uint64_t salt,
                                std::uint64_t attempt) {
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = 2.0 * counter_uniform(0x5eed5eedULL + salt, attempt, i) - 1.0;
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
}

inline EigenPair eigenvector_impl(const SymTridiag& M, double lambda,
                                  std::uint64_t salt) {
    validate(M);
    const std::size_t n = M.n();
    const double scale = spectral_scale(M);
    const double resid_tol = 1e-11 * scale;

    if (n == 1) {
        EigenPair p{M.diag[0], {1.0}, std::abs(M.diag[0] - lambda)};
        if (p.residual > resid_tol)
            throw NotAnEigenvalueError("value is not an eigenvalue");
        p.value = lambda;
        return p;
    }

    // small shift offset keeps the factorization away from exact singularity
    const double shift = lambda + 1e-14 * scale;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = M.diag[i] - shift;
    const auto lu = factor_tridiag(M.offdiag, d, M.offdiag);

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (salt != 0) fill_restart_vector(x, salt, 0);
    double resid = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 10; ++iter) {
        if (iter == 4 || iter == 7)
            fill_restart_vector(x, salt, static_cast<std::uint64_t>(iter));
        solve_tridiag(lu, x);
        const double nx = norm2(x);
        if (!(nx > 0.0) || !std::isfinite(nx)) {
            fill_restart_vector(x, salt, 100 + static_cast<std::uint64_t>(iter));
            continue;
        }
        for (double& v : x) v /= nx;
        resid = tridiag_residual(M, lambda, x);
        if (resid <= resid_tol) break;
    }
    if (!(resid <= resid_tol))
        throw SolverFailureError(
            "inverse iteration did not reach the residual tolerance; "
            "the shift may be far from any eigenvalue");
    canonical_sign(x);
    return EigenPair{lambda, std::move(x), resid};
}

} // namespace detail

/// Unit eigenvector for an eigenvalue estimate `lambda` (e.g. a bisection
/// result). Throws solver-failure if the residual tolerance 1e-11*scale is
/// not reached, which is also what happens when `lambda` is far from the
/// spectrum.
inline EigenPair eigenvector(const SymTridiag& M, double lambda) {
    return detail::eigenvector_impl(M, lambda, 0);
}

// ===========================================================================
// Full spectrum
// ===========================================================================

/// All eigenpairs, ascending, with vectors re-orthogonalized inside
/// eigenvalue clusters tighter than 1e-9 * scale (inverse iteration alone
/// cannot separate near-degenerate directions).
inline Spectrum solve_spectrum(const SymTridiag& M,
                               std::optional<double> atol = {}) {
    validate(M);
    const std::size_t n = M.n();
    const double scale = spectral_scale(M);
    const auto vals = eigenvalues(M, atol);

    Spectrum spec;
    spec.matrix_fingerprint = matrix_fingerprint(M);
    spec.pairs.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        spec.pairs.push_back(detail::eigenvector_impl(M, vals[k], 0));

    // cluster pass: re-run members after the first from randomized starts,
    // then modified Gram-Schmidt within the cluster
    const double cluster_tol = 1e-9 * scale;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && vals[j + 1] - vals[j] < cluster_tol) ++j;
        if (j > i) {
            for (std::size_t k = i + 1; k <= j; ++k)
                spec.pairs[k] =
                    detail::eigenvector_impl(M, vals[k], 1 + (k - i));
            for (std::size_t k = i + 1; k <= j; ++k) {
                auto& vk = spec.pairs[k].vector;
                for (std::size_t p = i; p < k; ++p) {
                    const auto& vp = spec.pairs[p].vector;
                    double dot = 0.0;
                    for (std::size_t t = 0; t < n; ++t) dot += vp[t] * vk[t];
                    for (std::size_t t = 0; t < n; ++t) vk[t] -= dot * vp[t];
                }
                const double nv = detail::norm2(vk);
                if (!(nv > 1e-6))
                    throw SolverFailureError(
                        "could not separate a near-degenerate eigenvalue "
                        "cluster");
                for (double& t : vk) t /= nv;
                detail::canonical_sign(vk);
                spec.pairs[k].residual =
                    detail::tridiag_residual(M, spec.pairs[k].value, vk);
            }
        }
        i = j + 1;
    }
    return spec;
}

// ===========================================================================
// Dense Jacobi oracle
// ===========================================================================

namespace detail {

/// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, n x n).
/// Rotates until the off-diagonal Frobenius mass is at machine level.
/// Returns eigenvalues ascending with matching columns in V.
inline void jacobi_eigen(std::vector<double>& A, std::size_t n,
                         std::vector<double>& values,
                         std::vector<double>& V) {
    V.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) V[i * n + i] = 1.0;

    double fro2 = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) fro2 += A[i] * A[i];
    const double stop = fro2 * 4.9e-32 + DBL_MIN;  // ~ (machine eps)^2

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off2 = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off2 += 2.0 * A[p * n + q] * A[p * n + q];
        if (off2 <= stop) break;
        if (sweep == 63)
            throw SolverFailureError("Jacobi sweeps did not converge");

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A[p * n + q];
                if (apq == 0.0) continue;
                const double app = A[p * n + p];
                const double aqq = A[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::isfinite(theta)) {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                } else {
                    t = 0.0;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                A[p * n + p] = app - t * apq;
                A[q * n + q] = aqq + t * apq;
                A[p * n + q] = A[q * n + p] = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = A[r * n + p];
                    const double arq = A[r * n + q];
                    A[r * n + p] = A[p * n + r] = c * arp - s * arq;
                    A[r * n + q] = A[q * n + r] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = V[r * n + p];
                    const double vrq = V[r * n + q];
                    V[r * n + p] = c * vrp - s * vrq;
                    V[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = A[i * n + i];
    // sort ascending, carrying columns along
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> values_sorted(n);
    std::vector<double> V_sorted(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        values_sorted[k] = values[order[k]];
        for (std::size_t r = 0; r < n; ++r)
            V_sorted[r * n + k] = V[r * n + order[k]];
    }
    values.swap(values_sorted);
    V.swap(V_sorted);
}

} // namespace detail

inline constexpr std::size_t dense_oracle_max_n = 64;

/// Independent dense eigensolver (cyclic Jacobi rotations) for small
/// matrices; used to cross-check the bisection/inverse-iteration route.
inline Spectrum dense_oracle(const SymTridiag& M) {
    validate(M);
    const std::size_t n = M.n();
    if (n > dense_oracle_max_n)
        throw InvalidInputError("dense oracle is limited to n <= 64");

    std::vector<double> A(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) A[i * n + i] = M.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        A[i * n + i + 1] = M.offdiag[i];
        A[(i + 1) * n + i] = M.offdiag[i];
    }
    std::vector<double> values, V;
    detail::jacobi_eigen(A, n, values, V);

    Spectrum spec;
    spec.matrix_fingerprint = matrix_fingerprint(M);
    spec.pairs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto& pair = spec.pairs[k];
        pair.value = values[k];
        pair.vector.resize(n);
        for (std::size_t r = 0; r < n; ++r) pair.vector[r] = V[r * n + k];
        detail::canonical_sign(pair.vector);
        pair.residual = detail::tridiag_residual(M, pair.value, pair.vector);
    }
    return spec;
}

} // namespace dimerspec
