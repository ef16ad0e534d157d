/// Perturbation-stability toolkit: spacing-noise budgets in capacitance
/// units, Weyl eigenvalue-shift checks, canonical angles between subspaces,
/// Davis-Kahan eigenvector bounds for the in-gap mode, and a deterministic
/// counter-based Monte Carlo driver aggregating all of them.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "capacitance.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "gap.hpp"
#include "tridiag.hpp"

namespace dimerspec {

// ===========================================================================
// Perturbation budget
// ===========================================================================

/// Entrywise capacitance-coefficient perturbations induced by spacing
/// noise: eps_i = 1/s_hat_i - 1/s_i per spacing, and the row-wise budget
/// eps = max_i (|eps_{i-1}| + |eps_i|) over resonator rows, so that the
/// 2-norm of the capacitance difference is at most 2*eps.
struct EpsilonBudget {
    std::vector<double> eps_i;
    double eps = 0.0;
};

inline EpsilonBudget epsilon_budget(const ResonatorChain& base,
                                    const ResonatorChain& pert) {
    validate_chain(base);
    validate_chain(pert);
    if (base.spacings.size() != pert.spacings.size())
        throw InvalidInputError("chains must have matching spacing counts");
    EpsilonBudget b;
    b.eps_i.resize(base.spacings.size());
    for (std::size_t i = 0; i < base.spacings.size(); ++i)
        b.eps_i[i] = 1.0 / pert.spacings[i] - 1.0 / base.spacings[i];
    const std::size_t n = base.size();
    for (std::size_t row = 0; row < n; ++row) {
        double sum = 0.0;
        if (row > 0) sum += std::abs(b.eps_i[row - 1]);
        if (row < b.eps_i.size()) sum += std::abs(b.eps_i[row]);
        b.eps = std::max(b.eps, sum);
    }
    return b;
}

// ===========================================================================
// Weyl eigenvalue-shift check
// ===========================================================================

inline constexpr double stability_atol = 1e-10;

struct WeylCheck {
    double max_shift = 0.0;        // max_k |pert_k - base_k|
    double bound = 0.0;            // 2 * eps
    double empirical_ratio = 0.0;  // max_shift / bound
    bool ok = false;
};

/// Every eigenvalue of the perturbed matrix stays within 2*eps of its
/// sorted counterpart. Inputs are ascending eigenvalue lists of equal size.
inline WeylCheck weyl_check(const std::vector<double>& base_vals,
                            const std::vector<double>& pert_vals,
                            const EpsilonBudget& budget) {
    if (base_vals.size() != pert_vals.size() || base_vals.empty())
        throw InvalidInputError("eigenvalue lists must match and be nonempty");
    WeylCheck w;
    for (std::size_t k = 0; k < base_vals.size(); ++k)
        w.max_shift = std::max(w.max_shift,
                               std::abs(pert_vals[k] - base_vals[k]));
    w.bound = 2.0 * budget.eps;
    if (w.bound > 0.0)
        w.empirical_ratio = w.max_shift / w.bound;
    else
        w.empirical_ratio = w.max_shift > 0.0
                                ? std::numeric_limits<double>::infinity()
                                : 0.0;
    w.ok = w.max_shift <= w.bound + stability_atol;
    return w;
}

// ===========================================================================
// Canonical angles between subspaces
// ===========================================================================

namespace detail {

inline void require_orthonormal(const std::vector<std::vector<double>>& cols) {
    if (cols.empty()) throw InvalidInputError("subspace must be nonempty");
    const std::size_t n = cols.front().size();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].size() != n)
            throw InvalidInputError("subspace columns must share a length");
        for (std::size_t j = i; j < cols.size(); ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += cols[i][r] * cols[j][r];
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - target) > 1e-10)
                throw InvalidInputError(
                    "subspace columns are not orthonormal to 1e-10");
        }
    }
}

} // namespace detail

/// Principal angles (radians, ascending) between two subspaces given as
/// lists of orthonormal columns of equal row dimension: the arccosines of
/// the singular values of the overlap matrix, obtained from the symmetric
/// eigenproblem of its Gram matrix.
inline std::vector<double> canonical_angles(
    const std::vector<std::vector<double>>& e_cols,
    const std::vector<std::vector<double>>& f_cols) {
    detail::require_orthonormal(e_cols);
    detail::require_orthonormal(f_cols);
    if (e_cols.front().size() != f_cols.front().size())
        throw InvalidInputError("subspaces must share the ambient dimension");
    const std::size_t p = e_cols.size(), q = f_cols.size();
    const std::size_t n = e_cols.front().size();

    // overlap S = E^T F, then Gram G = S^T S (q x q)
    std::vector<double> overlap(p * q, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                dot += e_cols[i][r] * f_cols[j][r];
            overlap[i * q + j] = dot;
        }
    std::vector<double> gram(q * q, 0.0);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < p; ++i)
                dot += overlap[i * q + a] * overlap[i * q + b];
            gram[a * q + b] = dot;
        }
    std::vector<double> gram_eigs, gram_vecs;
    detail::jacobi_eigen(gram, q, gram_eigs, gram_vecs);
    std::vector<double> angles;
    angles.reserve(q);
    for (std::size_t a = 0; a < q; ++a) {
        const double sigma =
            std::sqrt(std::clamp(gram_eigs[q - 1 - a], 0.0, 1.0));
        angles.push_back(std::acos(std::clamp(sigma, 0.0, 1.0)));
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

// ===========================================================================
// Davis-Kahan eigenvector check
// ===========================================================================

struct DavisKahanCheck {
    double dislocation = 0.0;   // ||v - v_hat||_2 after sign alignment
    double sin_theta = 0.0;     // sine of the angle between the two modes
    double delta = 0.0;         // min distance from base lambda to pert neighbors
    double delta0 = 0.0;        // min distance to base neighbors
    double bound = 0.0;         // 2*sqrt(2)*eps / delta
    double apriori_bound = std::numeric_limits<double>::quiet_NaN();
    bool eligible = false;      // eps below the half-gap-width threshold
    bool ok = true;             // bound holds (vacuously true when ineligible)
};

namespace detail {

inline DavisKahanCheck davis_kahan_core(const std::vector<double>& base_vals,
                                        const std::vector<double>& base_vec,
                                        const std::vector<double>& pert_vals,
                                        const std::vector<double>& pert_vec,
                                        std::size_t gap_index,
                                        double eps,
                                        const DimerSpec& spec) {
    const std::size_t n = base_vals.size();
    if (gap_index >= n || pert_vals.size() != n)
        throw InvalidInputError("gap index out of range");
    if (base_vec.size() != pert_vec.size())
        throw InvalidInputError("eigenvectors must share a length");

    DavisKahanCheck dk;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < base_vec.size(); ++i) {
        dot += base_vec[i] * pert_vec[i];
        na += base_vec[i] * base_vec[i];
        nb += pert_vec[i] * pert_vec[i];
    }
    const double norms = std::sqrt(na * nb);
    if (!(norms > 0.0))
        throw InvalidInputError("eigenvectors must be nonzero");
    const double sign = dot >= 0.0 ? 1.0 : -1.0;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < base_vec.size(); ++i) {
        const double d = base_vec[i] - sign * pert_vec[i];
        diff2 += d * d;
    }
    dk.dislocation = std::sqrt(diff2);
    const double cosang = std::clamp(std::abs(dot) / norms, 0.0, 1.0);
    dk.sin_theta = std::sqrt(std::max(0.0, 1.0 - cosang * cosang));

    const double lam = base_vals[gap_index];
    double delta = std::numeric_limits<double>::infinity();
    double delta0 = std::numeric_limits<double>::infinity();
    if (gap_index > 0) {
        delta = std::min(delta, std::abs(pert_vals[gap_index - 1] - lam));
        delta0 = std::min(delta0, std::abs(base_vals[gap_index - 1] - lam));
    }
    if (gap_index + 1 < n) {
        delta = std::min(delta, std::abs(pert_vals[gap_index + 1] - lam));
        delta0 = std::min(delta0, std::abs(base_vals[gap_index + 1] - lam));
    }
    dk.delta = delta;
    dk.delta0 = delta0;

    const double two_sqrt2 = 2.0 * std::sqrt(2.0);
    dk.bound = delta > 0.0 ? two_sqrt2 * eps / delta
                           : std::numeric_limits<double>::infinity();
    if (delta0 > 2.0 * eps)
        dk.apriori_bound = two_sqrt2 * eps / (delta0 - 2.0 * eps);

    dk.eligible = eps < 0.5 * (1.0 / spec.s1 - 1.0 / spec.s2);
    dk.ok = !dk.eligible || dk.dislocation <= dk.bound + stability_atol;
    return dk;
}

} // namespace detail

/// Davis-Kahan check on the gap mode, taking full solved spectra. The
/// dislocation ||v - v_hat|| (signs aligned) must stay below
/// 2*sqrt(2)*eps/delta whenever the noise is small enough that the gap
/// mode provably cannot collide with the bands.
inline DavisKahanCheck davis_kahan_check(const Spectrum& base,
                                         const Spectrum& pert,
                                         std::size_t gap_index,
                                         const EpsilonBudget& budget,
                                         const DimerSpec& spec) {
    if (base.pairs.size() != pert.pairs.size() || base.pairs.empty())
        throw InvalidInputError("spectra must match and be nonempty");
    if (gap_index >= base.pairs.size())
        throw InvalidInputError("gap index out of range");
    std::vector<double> base_vals, pert_vals;
    base_vals.reserve(base.pairs.size());
    pert_vals.reserve(pert.pairs.size());
    for (const auto& p : base.pairs) base_vals.push_back(p.value);
    for (const auto& p : pert.pairs) pert_vals.push_back(p.value);
    return detail::davis_kahan_core(base_vals, base.pairs[gap_index].vector,
                                    pert_vals, pert.pairs[gap_index].vector,
                                    gap_index, budget.eps, spec);
}

// ===========================================================================
// Monte Carlo driver
// ===========================================================================

struct TrialOutcome {
    std::uint64_t trial_index = 0;
    double eps = 0.0;
    double max_eigval_shift = 0.0;
    bool weyl_ok = false;
    double empirical_ratio = 0.0;
    double interface_vec_dislocation = 0.0;
    double dk_bound = 0.0;
    double dk_apriori_bound = std::numeric_limits<double>::quiet_NaN();
    bool dk_eligible = false;
    bool dk_ok = true;
    bool pert_in_gap = false;  // exactly one eigenvalue in the 2eps-shrunk gap
};

struct MonteCarloReport {
    std::size_t runs = 0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::vector<TrialOutcome> trials;
    std::size_t violations_weyl = 0;
    std::size_t violations_dk = 0;              // among eligible trials
    std::size_t violations_gap_persistence = 0; // among eligible trials
    std::size_t eligible_count = 0;
    std::size_t in_gap_count = 0;
    double ratio_max = 0.0;
    double dislocation_mean = 0.0;
    double dislocation_min = 0.0;
    double dislocation_max = 0.0;
};

/// Deterministic Monte Carlo over spacing noise: trial t depends only on
/// (seed, t), never on execution order, so prefixes of a longer run
/// reproduce a shorter run exactly. Each trial checks the Weyl shift
/// bound, the Davis-Kahan dislocation bound on the gap mode, and the
/// persistence of exactly one eigenvalue inside the shrunk gap.
inline MonteCarloReport monte_carlo(const DimerSpec& spec,
                                    const PerturbationSpec& pert,
                                    std::size_t runs) {
    validate(spec);
    if (runs < 1) throw InvalidInputError("need at least one run");
    const auto g = bulk_gap(spec);
    if (g.gap_empty())
        throw EmptyGapError("the gap is empty (requires s1 < s2)");

    const auto base_chain = build_defect_chain(spec);
    const auto M0 = assemble_capacitance(base_chain);
    const auto base_vals = eigenvalues(M0);
    const std::size_t gap_index = count_below(M0, g.gap_lo);
    if (count_below(M0, g.gap_hi) - gap_index != 1)
        throw TheoryViolationError(
            "base chain must carry exactly one gap eigenvalue");
    const auto base_mode = eigenvector(M0, base_vals[gap_index]);

    MonteCarloReport report;
    report.runs = runs;
    report.eta = pert.eta;
    report.seed = pert.seed;
    report.trials.reserve(runs);
    report.dislocation_min = std::numeric_limits<double>::infinity();

    double disl_sum = 0.0;
    for (std::size_t t = 0; t < runs; ++t) {
        const auto chain_t = perturb_chain(base_chain, pert, t);
        const auto M_t = assemble_capacitance(chain_t);
        const auto vals_t = eigenvalues(M_t);
        const auto budget = epsilon_budget(base_chain, chain_t);
        const auto weyl = weyl_check(base_vals, vals_t, budget);
        const auto mode_t = eigenvector(M_t, vals_t[gap_index]);
        const auto dk = detail::davis_kahan_core(
            base_vals, base_mode.vector, vals_t, mode_t.vector, gap_index,
            budget.eps, spec);

        const double lo = g.gap_lo + 2.0 * budget.eps;
        const double hi = g.gap_hi - 2.0 * budget.eps;
        const bool in_gap =
            lo < hi && (count_below(M_t, hi) - count_below(M_t, lo)) == 1;

        TrialOutcome out;
        out.trial_index = t;
        out.eps = budget.eps;
        out.max_eigval_shift = weyl.max_shift;
        out.weyl_ok = weyl.ok;
        out.empirical_ratio = weyl.empirical_ratio;
        out.interface_vec_dislocation = dk.dislocation;
        out.dk_bound = dk.bound;
        out.dk_apriori_bound = dk.apriori_bound;
        out.dk_eligible = dk.eligible;
        out.dk_ok = dk.ok;
        out.pert_in_gap = in_gap;
        report.trials.push_back(out);

        if (!weyl.ok) ++report.violations_weyl;
        if (dk.eligible) {
            ++report.eligible_count;
            if (!dk.ok) ++report.violations_dk;
            if (!in_gap) ++report.violations_gap_persistence;
        }
        if (in_gap) ++report.in_gap_count;
        report.ratio_max = std::max(report.ratio_max, weyl.empirical_ratio);
        disl_sum += dk.dislocation;
        report.dislocation_min =
            std::min(report.dislocation_min, dk.dislocation);
        report.dislocation_max =
            std::max(report.dislocation_max, dk.dislocation);
    }
    report.dislocation_mean = disl_sum / static_cast<double>(runs);
    return report;
}

} // namespace dimerspec
