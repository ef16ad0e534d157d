/// Band/gap analysis of dimer chains: asymptotic bulk and gap intervals,
/// eigenvalue classification with decay roots, detection of the unique
/// in-gap eigenvalue of defect chains, its closed-form large-size limit,
/// the existence function f_m, exponential-convergence studies, spatial
/// decay fits, and pseudospectrum residuals of embedded gap modes.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "capacitance.hpp"
#include "chain.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "tridiag.hpp"

namespace dimerspec {

// ===========================================================================
// Bulk and gap intervals
// ===========================================================================

/// Asymptotic spectral bands [0, 2/s2] and [2/s1, 2/s1 + 2/s2] with the
/// open gap (2/s2, 2/s1) between them; the gap is nonempty iff s1 < s2.
struct BulkGap {
    double band1_lo, band1_hi;
    double band2_lo, band2_hi;
    double gap_lo, gap_hi;

    bool gap_empty() const noexcept { return !(gap_lo < gap_hi); }
    bool in_gap(double lambda) const noexcept {
        return gap_lo < lambda && lambda < gap_hi;
    }
};

inline BulkGap bulk_gap(const DimerSpec& spec) {
    validate(spec);
    BulkGap g{};
    g.band1_lo = 0.0;
    g.band1_hi = 2.0 / spec.s2;
    g.band2_lo = 2.0 / spec.s1;
    g.band2_hi = 2.0 / spec.s1 + 2.0 / spec.s2;
    g.gap_lo = g.band1_hi;
    g.gap_hi = g.band2_lo;
    return g;
}

// ===========================================================================
// Classification
// ===========================================================================

enum class ModeKind { bulk, boundary, gap };

inline const char* to_string(ModeKind k) {
    switch (k) {
        case ModeKind::bulk:     return "bulk";
        case ModeKind::boundary: return "boundary";
        case ModeKind::gap:      return "gap";
    }
    return "unknown";
}

/// Where an eigenvalue sits relative to the asymptotic bands, together with
/// the root r of X^2 - 2yX + 1 = 0 chosen so |r| >= 1: real for gap values
/// (1/|r| is the per-cell decay factor), e^{i theta} on the bands.
struct ModeClassification {
    ModeKind kind = ModeKind::bulk;
    double y_value = 0.0;
    std::complex<double> decay_root{1.0, 0.0};
    double theta = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr double boundary_tol = 1e-9;

inline ModeClassification classify(double lambda, const DimerSpec& spec) {
    validate(spec);
    const auto c = dimer_coefficients(spec);
    ModeClassification out;
    const double y = y_map(lambda - c.alpha, c.beta1, c.beta2);
    out.y_value = y;
    const double y2 = y * y;
    if (std::abs(y2 - 1.0) <= boundary_tol) {
        out.kind = ModeKind::boundary;
        out.decay_root = {y >= 0.0 ? 1.0 : -1.0, 0.0};
        out.theta = y >= 0.0 ? 0.0 : std::acos(-1.0);
    } else if (y2 > 1.0) {
        out.kind = ModeKind::gap;
        const double root =
            y + (y >= 0.0 ? 1.0 : -1.0) * std::sqrt(y2 - 1.0);
        out.decay_root = {root, 0.0};
    } else {
        out.kind = ModeKind::bulk;
        out.theta = std::acos(std::clamp(y, -1.0, 1.0));
        out.decay_root = {y, std::sin(out.theta)};  // e^{i theta}
    }
    return out;
}

// ===========================================================================
// Closed-form spectrum of the defectless chain
// ===========================================================================

/// All eigenvalues of the defectless 2m-resonator dimer chain in closed
/// form: {alpha+beta1+beta2, alpha+beta2-beta1} together with
/// alpha +- sqrt(beta1^2 + 2 beta1 beta2 cos(k pi/m) + beta2^2), k=1..m-1.
/// Sorted ascending.
inline std::vector<double> uniform_dimer_eigenvalues(const DimerSpec& spec,
                                                     std::size_t m_cells) {
    validate(spec);
    if (m_cells < 1)
        throw InvalidInputError("need at least one unit cell");
    const auto c = dimer_coefficients(spec);
    std::vector<double> vals;
    vals.reserve(2 * m_cells);
    vals.push_back(c.alpha + c.beta1 + c.beta2);
    vals.push_back(c.alpha + c.beta2 - c.beta1);
    const double pi = std::acos(-1.0);
    for (std::size_t k = 1; k < m_cells; ++k) {
        const double radicand =
            c.beta1 * c.beta1 +
            2.0 * c.beta1 * c.beta2 *
                std::cos(static_cast<double>(k) * pi /
                         static_cast<double>(m_cells)) +
            c.beta2 * c.beta2;
        const double s = std::sqrt(std::max(radicand, 0.0));
        vals.push_back(c.alpha - s);
        vals.push_back(c.alpha + s);
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

// ===========================================================================
// Large-size limit of the gap eigenvalue
// ===========================================================================

/// Closed-form limit of the defect chain's in-gap eigenvalue as m grows:
///   lambda0 = alpha + (-sqrt(9 b1^2 - 14 b1 b2 + 9 b2^2) - b1 - b2) / 2.
inline double limit_eigenvalue(const DimerSpec& spec) {
    validate(spec);
    const auto g = bulk_gap(spec);
    if (g.gap_empty())
        throw EmptyGapError("the gap is empty (requires s1 < s2)");
    const auto c = dimer_coefficients(spec);
    const double radicand = 9.0 * c.beta1 * c.beta1 -
                            14.0 * c.beta1 * c.beta2 +
                            9.0 * c.beta2 * c.beta2;
    const double lambda0 =
        c.alpha + 0.5 * (-std::sqrt(radicand) - c.beta1 - c.beta2);
    if (!g.in_gap(lambda0))
        throw TheoryViolationError(
            "computed limit eigenvalue fell outside the gap");
    return lambda0;
}

/// Limit L of the polynomial ratio P*_{m-1}/P*_m for gap values: the
/// smaller-magnitude root of the characteristic quadratic over beta1*beta2,
///   L = (y - sign(y) sqrt(y^2 - 1)) / (beta1 beta2).
inline double limit_ratio_L(double lambda, const DimerSpec& spec) {
    validate(spec);
    const auto c = dimer_coefficients(spec);
    const double y = y_map(lambda - c.alpha, c.beta1, c.beta2);
    if (!(y * y > 1.0))
        throw InvalidInputError(
            "limit ratio is defined for gap values only (y^2 > 1)");
    const double root =
        y - (y >= 0.0 ? 1.0 : -1.0) * std::sqrt(y * y - 1.0);
    return root / (c.beta1 * c.beta2);
}

// ===========================================================================
// Existence function f_m
// ===========================================================================

namespace detail {

struct ExistenceCoeffs {
    double A, B, E, F;
};

inline ExistenceCoeffs existence_coeffs(double lambda,
                                        const DimerCoefficients& c) {
    const double z = lambda - c.alpha;
    ExistenceCoeffs k{};
    k.A = z - c.beta1;
    k.B = c.beta2 * (c.beta1 - c.beta2) * z - c.beta2 * c.beta1 * c.beta1 -
          (c.beta1 - c.beta2) * c.beta2 * c.beta2;
    k.E = z - c.beta2;
    k.F = -c.beta2 * c.beta1 * c.beta1;
    return k;
}

inline void require_in_gap(double lambda, const DimerSpec& spec) {
    const auto g = bulk_gap(spec);
    if (g.gap_empty())
        throw EmptyGapError("the gap is empty (requires s1 < s2)");
    if (!g.in_gap(lambda))
        throw InvalidInputError("lambda must lie inside the open gap");
}

} // namespace detail

/// Finite-size existence function whose unique root in the gap is the
/// defect chain's in-gap eigenvalue. Evaluated through the ratio
/// recurrence rho_{j+1} = 1/(2y - rho_j) (never through raw P* values,
/// which overflow long before m gets interesting).
inline double f_m(double lambda, const DimerSpec& spec, std::size_t m) {
    validate(spec);
    if (m < 1) throw InvalidInputError("f_m requires m >= 1");
    detail::require_in_gap(lambda, spec);
    const auto c = dimer_coefficients(spec);
    const auto k = detail::existence_coeffs(lambda, c);
    const double y = y_map(lambda - c.alpha, c.beta1, c.beta2);
    const double prod = c.beta1 * c.beta2;

    double rho_prev = 0.0;  // rho_0
    double rho = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double next = 1.0 / (2.0 * y - rho);
        rho_prev = rho;
        rho = next;
    }
    const double R_m = rho / prod;          // P*_{m-1} / P*_m
    const double R_m1 = rho_prev / prod;    // P*_{m-2} / P*_{m-1}
    return (k.A + k.B * R_m) -
           c.beta2 * c.beta2 * R_m * (k.E + k.F * R_m1);
}

/// Pointwise limit of f_m, with the polynomial ratio replaced by L.
inline double f_infinity(double lambda, const DimerSpec& spec) {
    validate(spec);
    detail::require_in_gap(lambda, spec);
    const auto c = dimer_coefficients(spec);
    const auto k = detail::existence_coeffs(lambda, c);
    const double L = limit_ratio_L(lambda, spec);
    return (k.A + k.B * L) - c.beta2 * c.beta2 * L * (k.E + k.F * L);
}

// ===========================================================================
// Decay fit
// ===========================================================================

struct DecayFit {
    double fitted_ratio = 0.0;     // per-unit-cell amplitude factor, fitted
    double predicted_ratio = 0.0;  // 1/|r| from the classification
    double r_squared = 0.0;
    std::size_t points_used = 0;
};

/// Least-squares fit of log|v| against the unit-cell index on the leading
/// half of a defect-chain eigenvector, restricted to same-parity entries in
/// the middle half between interface and edge (the quarters nearest the
/// interface and nearest the edge are excluded: there the subdominant
/// branch and boundary effects contaminate the slope).
inline DecayFit decay_fit(const std::vector<double>& mode, double lambda,
                          const DimerSpec& spec) {
    validate(spec);
    const std::size_t n = mode.size();
    if (n < 5 || (n - 1) % 4 != 0)
        throw InvalidInputError("mode must have 4m+1 entries");
    const std::size_t m = (n - 1) / 4;
    if (m < 5)
        throw InsufficientDataError(
            "decay fit needs m >= 5 (at least 4 usable cells)");
    const std::size_t centre = 2 * m;

    const std::size_t j_lo = m / 4;
    const std::size_t j_hi = m - m / 4;
    std::vector<double> js, ys;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const double a = std::abs(mode[centre - 2 * j]);
        if (a < 1e-300) continue;  // log would blow past double range
        js.push_back(static_cast<double>(j));
        ys.push_back(std::log(a));
    }
    if (js.size() < 4)
        throw InsufficientDataError(
            "fewer than 4 usable points in the decay window");

    const auto np = static_cast<double>(js.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        sx += js[i];
        sy += ys[i];
        sxx += js[i] * js[i];
        sxy += js[i] * ys[i];
    }
    const double denom = np * sxx - sx * sx;
    const double slope = (np * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / np;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / np;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const double fit = slope * js[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;

    DecayFit fit{};
    fit.fitted_ratio = std::exp(slope);
    fit.predicted_ratio = 1.0 / std::abs(classify(lambda, spec).decay_root);
    fit.r_squared = r2;
    fit.points_used = js.size();
    if (r2 < 0.99)
        throw TheoryViolationError(
            "mode is not exponentially localized (fit R^2 below 0.99)");
    return fit;
}

// ===========================================================================
// Gap eigenvalue detection
// ===========================================================================

struct GapReport {
    double interface_eigenvalue =
        std::numeric_limits<double>::quiet_NaN();  // NaN when none found
    double limit_eigenvalue = 0.0;
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    std::optional<DecayFit> decay;  // populated when m >= 5 and a mode exists
    std::size_t count_in_gap = 0;   // 0 or 1; larger counts throw
};

/// Locate the defect chain's eigenvalue inside the gap by inertia counts at
/// the gap endpoints plus bisection. Exactly zero or one eigenvalue is
/// tolerated; more signals a broken invariant. When m >= 5 and a mode was
/// found, the spatial decay fit of its eigenvector is included.
inline GapReport find_gap_eigenvalue(const DimerSpec& spec,
                                     std::optional<double> atol = {}) {
    validate(spec);
    const auto g = bulk_gap(spec);
    if (g.gap_empty())
        throw EmptyGapError("the gap is empty (requires s1 < s2)");

    const auto M = assemble_capacitance(build_defect_chain(spec));
    const std::size_t below_hi = count_below(M, g.gap_hi);
    const std::size_t below_lo = count_below(M, g.gap_lo);
    const std::size_t count = below_hi - below_lo;

    GapReport report;
    report.limit_eigenvalue = limit_eigenvalue(spec);
    report.count_in_gap = count;
    if (count > 1)
        throw TheoryViolationError(
            "found more than one eigenvalue in the gap");
    if (count == 0) return report;

    const auto vals = eigenvalues_in(M, g.gap_lo, g.gap_hi, atol);
    report.interface_eigenvalue = vals.front();
    report.abs_error =
        std::abs(report.interface_eigenvalue - report.limit_eigenvalue);
    if (spec.m >= 5) {
        const auto pair = eigenvector(M, report.interface_eigenvalue);
        report.decay =
            decay_fit(pair.vector, report.interface_eigenvalue, spec);
    }
    return report;
}

// ===========================================================================
// Convergence study
// ===========================================================================

struct ConvergenceRow {
    std::size_t m = 0;
    std::size_t n = 0;
    double lambda_gap = 0.0;
    double lambda_limit = 0.0;
    double abs_error = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // e_i / e_{i-1}
    double predicted_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double fitted_per_m_ratio = 0.0;     // exp(slope of log-error vs m)
    double predicted_per_m_ratio = 0.0;  // 1/|r|^2 at the limit eigenvalue
    double log_r_squared = 0.0;
};

/// Bisection tolerance used by default inside convergence studies: the
/// error sequence reaches ~1e-13 around m = 25, well below the standard
/// 1e-12*scale solver tolerance, so the study tightens it to a few ulps of
/// the spectral scale to keep the sequence strictly decreasing.
inline double convergence_study_atol(const SymTridiag& M) {
    return 4.0 * std::numeric_limits<double>::epsilon() * spectral_scale(M);
}

/// |lambda_gap(m) - lambda0| for each m in m_list (strictly increasing,
/// all >= 2), plus a least-squares fit of the exponential decay rate.
inline ConvergenceStudy convergence_study(const DimerSpec& spec,
                                          const std::vector<std::size_t>& m_list,
                                          std::optional<double> atol = {}) {
    validate(spec);
    if (m_list.empty())
        throw InvalidInputError("m_list must not be empty");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 2)
            throw InvalidInputError("convergence study requires m >= 2");
        if (i > 0 && m_list[i] <= m_list[i - 1])
            throw InvalidInputError("m_list must be strictly increasing");
    }

    const double lambda0 = limit_eigenvalue(spec);
    const double abs_r =
        std::abs(classify(lambda0, spec).decay_root);
    ConvergenceStudy study;
    study.predicted_per_m_ratio = 1.0 / (abs_r * abs_r);

    study.rows.reserve(m_list.size());
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        DimerSpec s = spec;
        s.m = m_list[i];
        const auto M = assemble_capacitance(build_defect_chain(s));
        const double tol = atol.value_or(convergence_study_atol(M));
        const auto g = bulk_gap(s);
        const auto vals = eigenvalues_in(M, g.gap_lo, g.gap_hi, tol);
        if (vals.size() != 1)
            throw TheoryViolationError(
                "expected exactly one gap eigenvalue during the study");
        ConvergenceRow row;
        row.m = m_list[i];
        row.n = 4 * m_list[i] + 1;
        row.lambda_gap = vals.front();
        row.lambda_limit = lambda0;
        row.abs_error = std::abs(row.lambda_gap - lambda0);
        if (i > 0) {
            const auto& prev = study.rows.back();
            row.ratio = row.abs_error / prev.abs_error;
            row.predicted_ratio =
                std::pow(study.predicted_per_m_ratio,
                         static_cast<double>(m_list[i] - prev.m));
        }
        study.rows.push_back(row);
    }

    // least-squares slope of log(abs_error) against m
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t np = 0;
    for (const auto& row : study.rows) {
        if (!(row.abs_error > 1e-300)) continue;
        const double xm = static_cast<double>(row.m);
        const double ye = std::log(row.abs_error);
        sx += xm;
        sy += ye;
        sxx += xm * xm;
        sxy += xm * ye;
        ++np;
    }
    if (np >= 2) {
        const double fn = static_cast<double>(np);
        const double slope = (fn * sxy - sx * sy) / (fn * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / fn;
        double ss_res = 0.0, ss_tot = 0.0;
        const double mean_y = sy / fn;
        for (const auto& row : study.rows) {
            if (!(row.abs_error > 1e-300)) continue;
            const double xm = static_cast<double>(row.m);
            const double ye = std::log(row.abs_error);
            ss_res += (ye - slope * xm - intercept) * (ye - slope * xm - intercept);
            ss_tot += (ye - mean_y) * (ye - mean_y);
        }
        study.fitted_per_m_ratio = std::exp(slope);
        study.log_r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    }
    return study;
}

// ===========================================================================
// Pseudospectrum residual of the embedded gap mode
// ===========================================================================

struct PseudoResidual {
    double lambda = 0.0;          // gap eigenvalue of the small chain
    double residual_norm = 0.0;   // ||(C_host - lambda) w||_2, w unit
    double spectral_distance = 0.0;
    std::size_t host_n = 0;
};

/// Embed the normalized gap eigenvector of the size-(4m+1) defect chain,
/// padded with 2k zeros on each side, into the size-(4(m+k)+1) defect
/// chain, and measure how well the small chain's gap eigenvalue
/// pseudo-solves the large chain. For a symmetric host the distance from
/// lambda to the host spectrum can never exceed the residual norm.
inline PseudoResidual pseudo_residual(const DimerSpec& spec, std::size_t m,
                                      std::size_t k,
                                      std::optional<double> atol = {}) {
    validate(spec);
    if (m < 1 || k < 1)
        throw InvalidInputError("pseudo_residual requires m >= 1 and k >= 1");
    DimerSpec small = spec;
    small.m = m;
    const auto g = bulk_gap(small);
    if (g.gap_empty())
        throw EmptyGapError("the gap is empty (requires s1 < s2)");

    const auto M_small = assemble_capacitance(build_defect_chain(small));
    const auto vals = eigenvalues_in(M_small, g.gap_lo, g.gap_hi, atol);
    if (vals.size() != 1)
        throw TheoryViolationError("expected exactly one gap eigenvalue");
    const double lambda = vals.front();
    const auto mode = eigenvector(M_small, lambda);

    DimerSpec host = spec;
    host.m = m + k;
    const auto M_host = assemble_capacitance(build_defect_chain(host));
    const std::size_t n_small = 4 * m + 1;
    const std::size_t n_host = 4 * (m + k) + 1;

    std::vector<double> w(n_host, 0.0);
    for (std::size_t i = 0; i < n_small; ++i) w[2 * k + i] = mode.vector[i];

    PseudoResidual out;
    out.lambda = lambda;
    out.host_n = n_host;
    out.residual_norm = detail::tridiag_residual(M_host, lambda, w);

    const std::size_t below = count_below(M_host, lambda);
    double dist = std::numeric_limits<double>::infinity();
    if (below > 0)
        dist = std::min(dist,
                        std::abs(eigenvalue_at(M_host, below - 1, atol) - lambda));
    if (below < n_host)
        dist = std::min(dist,
                        std::abs(eigenvalue_at(M_host, below, atol) - lambda));
    out.spectral_distance = dist;
    return out;
}

} // namespace dimerspec
