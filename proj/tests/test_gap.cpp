/// Band/gap analysis tests: exact gap intervals, classification roots,
/// the closed-form defectless spectrum, the gap eigenvalue and its limit,
/// the existence function and its root, decay fits, convergence studies,
/// and pseudospectrum residuals.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <dimerspec/capacitance.hpp>
#include <dimerspec/chain.hpp>
#include <dimerspec/gap.hpp>
#include <dimerspec/hashing.hpp>
#include <dimerspec/tridiag.hpp>

using namespace dimerspec;

namespace {

DimerSpec make_spec(double s1, double s2, std::size_t m) {
    DimerSpec spec;
    spec.s1 = s1;
    spec.s2 = s2;
    spec.m = m;
    return spec;
}

// frozen oracle values for (s1, s2) = (1, 2), independently recomputed
constexpr double lambda0_12 = 1.2192235935955849;
constexpr double lambda0_13 = 0.8452994616207482;
constexpr double abs_r_12 = 1.780776406404415;
constexpr double limit_L_12 = -1.1231056256176608;

} // namespace

// ===========================================================================
// Gap intervals and classification
// ===========================================================================

TEST_CASE("bulk bands and gap of (1,3) are exact") {
    const auto g = bulk_gap(make_spec(1.0, 3.0, 1));
    REQUIRE(g.band1_lo == 0.0);
    REQUIRE(g.band1_hi == 2.0 / 3.0);
    REQUIRE(g.band2_lo == 2.0);
    REQUIRE(g.band2_hi == 8.0 / 3.0);
    REQUIRE(g.gap_lo == 2.0 / 3.0);
    REQUIRE(g.gap_hi == 2.0);
    REQUIRE_FALSE(g.gap_empty());
    REQUIRE(g.in_gap(1.0));
    REQUIRE_FALSE(g.in_gap(0.5));

    REQUIRE(bulk_gap(make_spec(2.0, 1.0, 1)).gap_empty());
    REQUIRE(bulk_gap(make_spec(1.0, 1.0, 1)).gap_empty());
}

TEST_CASE("classification separates bulk, boundary, and gap values") {
    const auto spec = make_spec(1.0, 2.0, 1);

    const auto bulk = classify(0.3, spec);
    REQUIRE(bulk.kind == ModeKind::bulk);
    REQUIRE(std::abs(std::abs(bulk.decay_root) - 1.0) <= 1e-12);
    REQUIRE(bulk.theta > 0.0);
    REQUIRE(bulk.theta < std::acos(-1.0));

    const auto gap = classify(1.2, spec);
    REQUIRE(gap.kind == ModeKind::gap);
    REQUIRE(gap.decay_root.imag() == 0.0);
    REQUIRE(std::abs(gap.decay_root) > 1.0);

    // lower band edge: z = 1 - 1.5 gives y = -1 exactly
    const auto edge = classify(1.0, spec);
    REQUIRE(edge.kind == ModeKind::boundary);
    REQUIRE(edge.decay_root.real() == -1.0);

    // Vieta: r + 1/r = 2y for every classification
    for (double lambda : {0.1, 0.45, 0.9, 1.1, 1.3, 1.9, 2.2, 2.9}) {
        const auto c = classify(lambda, spec);
        const auto sum = c.decay_root + 1.0 / c.decay_root;
        REQUIRE(std::abs(sum.real() - 2.0 * c.y_value) <= 1e-12);
        REQUIRE(std::abs(sum.imag()) <= 1e-12);
    }
}

// ===========================================================================
// Closed-form defectless spectrum
// ===========================================================================

TEST_CASE("closed-form eigenvalues match the solver on defectless chains") {
    for (std::size_t m : {1, 5, 20}) {
        const auto spec = make_spec(1.0, 3.0, 1);
        const auto closed = uniform_dimer_eigenvalues(spec, m);
        const auto M = assemble_capacitance(build_uniform_dimer(spec, 2 * m));
        const auto solved = eigenvalues(M);
        REQUIRE(closed.size() == solved.size());
        for (std::size_t i = 0; i < closed.size(); ++i)
            REQUIRE(std::abs(closed[i] - solved[i]) <= 1e-10);
    }
}

TEST_CASE("two-resonator chain has eigenvalues 0 and 2/s1") {
    const auto vals = uniform_dimer_eigenvalues(make_spec(1.0, 2.0, 1), 1);
    REQUIRE(vals.size() == 2);
    REQUIRE(vals[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(vals[1] == Catch::Approx(2.0).margin(1e-15));
}

// ===========================================================================
// Limit eigenvalue and ratio limit
// ===========================================================================

TEST_CASE("limit eigenvalue values and the two equivalent forms") {
    REQUIRE(limit_eigenvalue(make_spec(1.0, 2.0, 1)) ==
            Catch::Approx(lambda0_12).margin(1e-12));
    REQUIRE(limit_eigenvalue(make_spec(1.0, 3.0, 1)) ==
            Catch::Approx(lambda0_13).margin(1e-12));
    // spacing form: (3/s1 + 3/s2 - sqrt(9/s1^2 - 14/(s1 s2) + 9/s2^2)) / 2
    const double s1 = 1.0, s2 = 2.0;
    const double direct =
        0.5 * (3.0 / s1 + 3.0 / s2 -
               std::sqrt(9.0 / (s1 * s1) - 14.0 / (s1 * s2) + 9.0 / (s2 * s2)));
    REQUIRE(std::abs(limit_eigenvalue(make_spec(s1, s2, 1)) - direct) <= 1e-14);
    REQUIRE_THROWS_AS(limit_eigenvalue(make_spec(2.0, 1.0, 1)), EmptyGapError);
}

TEST_CASE("ratio limit value, domain, and recurrence convergence") {
    const auto spec = make_spec(1.0, 2.0, 1);
    const double L = limit_ratio_L(lambda0_12, spec);
    REQUIRE(L == Catch::Approx(limit_L_12).margin(1e-12));
    REQUIRE_THROWS_AS(limit_ratio_L(0.3, spec), InvalidInputError);

    // the ratio recurrence rho_{j+1} = 1/(2y - rho_j) tends to L*beta1*beta2
    const double y = y_map(lambda0_12 - 1.5, -1.0, -0.5);
    double rho = 0.0;
    for (int j = 0; j < 200; ++j) rho = 1.0 / (2.0 * y - rho);
    REQUIRE(std::abs(rho / 0.5 - L) <= 1e-10);
}

// ===========================================================================
// Existence function
// ===========================================================================

TEST_CASE("f_m changes sign across the gap eigenvalue and f_inf at limit") {
    const auto spec = make_spec(1.0, 2.0, 10);
    const double left = f_m(lambda0_12 - 0.05, spec, 10);
    const double right = f_m(lambda0_12 + 0.05, spec, 10);
    REQUIRE(left * right < 0.0);
    REQUIRE(std::abs(f_infinity(lambda0_12, spec)) <= 1e-10);
    REQUIRE_THROWS_AS(f_m(0.3, spec, 10), InvalidInputError);
    REQUIRE_THROWS_AS(f_m(1.2, spec, 0), InvalidInputError);
    REQUIRE_THROWS_AS(f_infinity(1.2, make_spec(2.0, 1.0, 1)), EmptyGapError);
}

TEST_CASE("the root of f_m is the solver's gap eigenvalue") {
    for (std::size_t m : {5, 10, 20}) {
        const auto spec = make_spec(1.0, 2.0, m);
        const auto g = bulk_gap(spec);
        double lo = g.gap_lo + 1e-9, hi = g.gap_hi - 1e-9;
        double flo = f_m(lo, spec, m);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f_m(mid, spec, m);
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double root = 0.5 * (lo + hi);
        const auto report = find_gap_eigenvalue(spec);
        REQUIRE(std::abs(root - report.interface_eigenvalue) <= 1e-9);
    }
}

TEST_CASE("f_m approaches f_infinity pointwise") {
    const auto spec = make_spec(1.0, 2.0, 1);
    for (int i = 1; i <= 10; ++i) {
        const double lambda = 1.0 + i / 11.0;  // strictly inside (1, 2)
        REQUIRE(std::abs(f_m(lambda, spec, 200) - f_infinity(lambda, spec)) <=
                1e-8);
    }
}

// ===========================================================================
// Gap eigenvalue detection
// ===========================================================================

TEST_CASE("gap eigenvalue of the defect chain, frozen values") {
    auto report = find_gap_eigenvalue(make_spec(1.0, 2.0, 10));
    REQUIRE(report.count_in_gap == 1);
    REQUIRE(report.interface_eigenvalue ==
            Catch::Approx(1.2192191034363653).margin(1e-9));
    REQUIRE(report.limit_eigenvalue ==
            Catch::Approx(lambda0_12).margin(1e-12));
    REQUIRE(report.abs_error ==
            Catch::Approx(4.49e-6).epsilon(0.01));
    REQUIRE(report.decay.has_value());

    report = find_gap_eigenvalue(make_spec(1.0, 2.0, 4));
    REQUIRE(report.interface_eigenvalue ==
            Catch::Approx(1.2145161240986535).margin(1e-9));
    REQUIRE_FALSE(report.decay.has_value());  // decay fit needs m >= 5

    REQUIRE_THROWS_AS(find_gap_eigenvalue(make_spec(2.0, 1.0, 5)),
                      EmptyGapError);
}

TEST_CASE("uniqueness: one eigenvalue in the gap across sizes and spacings") {
    for (double s2 : {2.0, 3.0})
        for (std::size_t m : {5, 10, 25}) {
            const auto spec = make_spec(1.0, s2, m);
            const auto M = assemble_capacitance(build_defect_chain(spec));
            const auto g = bulk_gap(spec);
            REQUIRE(count_below(M, g.gap_hi) - count_below(M, g.gap_lo) == 1);
        }
}

// ===========================================================================
// Decay fit
// ===========================================================================

TEST_CASE("interface mode decays at the predicted per-cell rate") {
    const auto spec = make_spec(1.0, 2.0, 10);
    const auto report = find_gap_eigenvalue(spec);
    const auto& fit = *report.decay;
    REQUIRE(fit.r_squared >= 0.999);
    REQUIRE(std::abs(fit.fitted_ratio * abs_r_12 - 1.0) <= 0.02);
    REQUIRE(fit.predicted_ratio == Catch::Approx(1.0 / abs_r_12).margin(1e-4));
    REQUIRE(fit.points_used >= 4);
}

TEST_CASE("decay fit rejects delocalized modes and short chains") {
    const auto spec = make_spec(1.0, 2.0, 10);
    const auto M = assemble_capacitance(build_defect_chain(spec));
    const auto vals = eigenvalues(M);
    const auto bulk_pair = eigenvector(M, vals[5]);  // a band mode
    REQUIRE_THROWS_AS(decay_fit(bulk_pair.vector, vals[5], spec),
                      TheoryViolationError);

    const auto small = make_spec(1.0, 2.0, 4);
    const auto Ms = assemble_capacitance(build_defect_chain(small));
    const auto gs = bulk_gap(small);
    const auto lam = eigenvalues_in(Ms, gs.gap_lo, gs.gap_hi).front();
    const auto pair = eigenvector(Ms, lam);
    REQUIRE_THROWS_AS(decay_fit(pair.vector, lam, small),
                      InsufficientDataError);

    REQUIRE_THROWS_AS(decay_fit(std::vector<double>(10, 1.0), 1.2, spec),
                      InvalidInputError);
}

// ===========================================================================
// Convergence study
// ===========================================================================

TEST_CASE("gap eigenvalue converges exponentially to its limit") {
    std::vector<std::size_t> m_list;
    for (std::size_t m = 3; m <= 25; ++m) m_list.push_back(m);
    const auto study = convergence_study(make_spec(1.0, 2.0, 3), m_list);

    REQUIRE(study.rows.size() == m_list.size());
    REQUIRE(study.predicted_per_m_ratio ==
            Catch::Approx(1.0 / (abs_r_12 * abs_r_12)).margin(1e-10));
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& row = study.rows[i];
        REQUIRE(row.n == 4 * row.m + 1);
        REQUIRE(row.lambda_limit == Catch::Approx(lambda0_12).margin(1e-12));
        if (row.m >= 5 && i > 0)  // strictly decreasing from m = 5 on
            REQUIRE(row.abs_error < study.rows[i - 1].abs_error);
        if (i > 0) REQUIRE(row.predicted_ratio ==
                           Catch::Approx(study.predicted_per_m_ratio)
                               .margin(1e-12));
    }
    REQUIRE(study.rows.back().abs_error <= 1e-10);
    REQUIRE(study.log_r_squared >= 0.99);
    REQUIRE(std::abs(study.fitted_per_m_ratio / study.predicted_per_m_ratio -
                     1.0) <= 0.1);
}

TEST_CASE("convergence study input validation") {
    const auto spec = make_spec(1.0, 2.0, 3);
    REQUIRE_THROWS_AS(convergence_study(spec, {}), InvalidInputError);
    REQUIRE_THROWS_AS(convergence_study(spec, {1, 2}), InvalidInputError);
    REQUIRE_THROWS_AS(convergence_study(spec, {3, 3}), InvalidInputError);
    REQUIRE_THROWS_AS(convergence_study(make_spec(2.0, 1.0, 3), {3, 4}),
                      EmptyGapError);
}

// ===========================================================================
// Pseudospectrum residual
// ===========================================================================

TEST_CASE("embedded gap mode leaves a four-entry residual of size 2|b2 v0|") {
    const auto spec = make_spec(1.0, 2.0, 1);
    for (const auto& [m, k] : {std::pair<std::size_t, std::size_t>{5, 2},
                               {8, 3}}) {
        const auto pr = pseudo_residual(spec, m, k);
        REQUIRE(pr.host_n == 4 * (m + k) + 1);
        REQUIRE(pr.spectral_distance <= pr.residual_norm);

        // rebuild the embedding by hand and locate the nonzero rows
        DimerSpec small = spec;
        small.m = m;
        const auto Ms = assemble_capacitance(build_defect_chain(small));
        const auto gs = bulk_gap(small);
        const double lam = eigenvalues_in(Ms, gs.gap_lo, gs.gap_hi).front();
        const auto mode = eigenvector(Ms, lam);
        DimerSpec hostspec = spec;
        hostspec.m = m + k;
        const auto Mh = assemble_capacitance(build_defect_chain(hostspec));
        const std::size_t n_small = 4 * m + 1;
        std::vector<double> w(pr.host_n, 0.0);
        for (std::size_t i = 0; i < n_small; ++i)
            w[2 * k + i] = mode.vector[i];
        std::vector<std::size_t> nonzero;
        for (std::size_t i = 0; i < pr.host_n; ++i) {
            double r = (Mh.diag[i] - lam) * w[i];
            if (i > 0) r += Mh.offdiag[i - 1] * w[i - 1];
            if (i + 1 < pr.host_n) r += Mh.offdiag[i] * w[i + 1];
            if (std::abs(r) > 1e-10) nonzero.push_back(i);
        }
        REQUIRE(nonzero == std::vector<std::size_t>{2 * k - 1, 2 * k,
                                                    2 * k + n_small - 1,
                                                    2 * k + n_small});
        const double expected = 2.0 * 0.5 * std::abs(mode.vector.front());
        REQUIRE(pr.residual_norm ==
                Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("pseudospectrum residual decays with the embedded size") {
    const auto spec = make_spec(1.0, 2.0, 1);
    const auto r5 = pseudo_residual(spec, 5, 3);
    const auto r15 = pseudo_residual(spec, 15, 3);
    REQUIRE(r15.residual_norm * 10.0 <= r5.residual_norm);
    REQUIRE_THROWS_AS(pseudo_residual(spec, 0, 1), InvalidInputError);
    REQUIRE_THROWS_AS(pseudo_residual(spec, 5, 0), InvalidInputError);
    REQUIRE_THROWS_AS(pseudo_residual(make_spec(2.0, 1.0, 1), 5, 1),
                      EmptyGapError);
}
