/// Command-line front end: reproduces the library's experiment classes
/// (spectra, mode profiles, gap detection, convergence, stability Monte
/// Carlo, mirror indicator, pseudospectrum residuals) as deterministic CSV
/// and JSON artifacts with a manifest cross-referencing scheme.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <dimerspec/dimerspec.hpp>

using nlohmann::json;

namespace {

using namespace dimerspec;

// ===========================================================================
// Small helpers
// ===========================================================================

struct CommonOpts {
    double s1 = 1.0;
    double s2 = 2.0;
    std::size_t m = 10;
    double ell = 1.0;
    std::string outdir = ".";
    std::string config_path;

    DimerSpec spec() const {
        DimerSpec s;
        s.s1 = s1;
        s.s2 = s2;
        s.m = m;
        s.ell = ell;
        validate(s);
        return s;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--s1", opts.s1, "first spacing of the unit cell")
        ->take_last();
    cmd->add_option("--s2", opts.s2, "second spacing of the unit cell")
        ->take_last();
    cmd->add_option("--m", opts.m,
                    "defect half-count; the chain has N = 4m+1 resonators")
        ->take_last();
    cmd->add_option("--ell", opts.ell, "common resonator length")
        ->take_last();
    cmd->add_option("--outdir", opts.outdir,
                    "directory receiving all output files")
        ->envname("DIMERSPEC_OUTDIR")
        ->take_last();
    cmd->add_option("--config", opts.config_path,
                    "flat JSON file whose keys mirror the flag names; "
                    "explicit flags override it")
        ->take_last();
}

/// Hash of the command name plus its science configuration (output paths
/// excluded), used to stamp every artifact the run produces.
std::string manifest_hash(const std::string& command, const json& science) {
    const json j{{"command", command}, {"config", science}};
    return hex64(fnv1a64(j.dump()));
}

void ensure_outdir(const std::string& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
}

std::string join_path(const std::string& outdir, const std::string& name) {
    return (std::filesystem::path(outdir) / name).string();
}

void write_manifest(const std::string& outdir, const std::string& command,
                    const json& science, const json& summary,
                    const std::string& hash) {
    const json manifest{{"command", command},
                        {"config", science},
                        {"manifest_hash", hash},
                        {"summary", summary},
                        {"version", version_string}};
    write_json_file(join_path(outdir, command + "_manifest.json"), manifest);
}

/// CSV writer: first line cross-references the manifest, doubles are
/// shortest-round-trip so reruns diff clean.
class CsvFile {
public:
    CsvFile(const std::string& hash, const std::string& header) {
        buf_ << "# manifest " << hash << "\n" << header << "\n";
    }
    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        (append_cell(cells, first), ...);
        buf_ << "\n";
    }
    void save(const std::string& path) { write_text_file(path, buf_.str()); }

private:
    void append_cell(double v, bool& first) {
        if (!first) buf_ << ",";
        buf_ << format_double(v);
        first = false;
    }
    void append_cell(std::size_t v, bool& first) {
        if (!first) buf_ << ",";
        buf_ << v;
        first = false;
    }
    void append_cell(int v, bool& first) {
        if (!first) buf_ << ",";
        buf_ << v;
        first = false;
    }
    void append_cell(long v, bool& first) {
        if (!first) buf_ << ",";
        buf_ << v;
        first = false;
    }
    void append_cell(const std::string& v, bool& first) {
        if (!first) buf_ << ",";
        buf_ << v;
        first = false;
    }
    std::ostringstream buf_;
};

/// Kernel eigenvalues come out of bisection as +-a-few-ulps; clamp those to
/// zero for the frequency map, and refuse anything genuinely negative.
double clamp_for_frequency(double mu, double atol) {
    if (mu >= 0.0) return mu;
    if (mu >= -64.0 * atol) return 0.0;
    throw TheoryViolationError(
        "eigenvalue is negative beyond solver tolerance; the capacitance "
        "matrix should be positive semidefinite");
}

std::vector<double> parse_sweep(const std::string& text) {
    // "start:stop:count" with count >= 1
    double start = 0.0, stop = 0.0;
    long count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> start >> c1 >> stop >> c2 >> count) || c1 != ':' ||
        c2 != ':' || count < 1 || !ss.eof())
        throw InvalidInputError(
            "sweep must be start:stop:count with count >= 1, got '" + text +
            "'");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(start);
        return out;
    }
    for (long i = 0; i < count; ++i)
        out.push_back(start + (stop - start) * static_cast<double>(i) /
                                  static_cast<double>(count - 1));
    return out;
}

// ===========================================================================
// Subcommand implementations
// ===========================================================================

void run_spectrum(const CommonOpts& common, double delta, double vb,
                  const std::string& matrix_out) {
    const auto spec = common.spec();
    if (!(delta > 0.0) || !(vb > 0.0))
        throw InvalidInputError("delta and vb must be positive");
    const auto M = assemble_capacitance(build_defect_chain(spec));
    const auto vals = eigenvalues(M);
    const auto g = bulk_gap(spec);
    const double atol = default_bisection_atol(M);

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"m", spec.m},
                 {"ell", spec.ell}, {"delta", delta}, {"vb", vb}};
    const auto hash = manifest_hash("spectrum", science);

    CsvFile csv(hash, "index,eigenvalue,frequency,in_gap");
    std::size_t in_gap_count = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double mu = clamp_for_frequency(vals[i], atol);
        const double freq = eigenvalue_to_frequency(mu, delta, vb, spec.ell);
        const bool in_gap = g.in_gap(vals[i]);
        if (in_gap) ++in_gap_count;
        csv.row(i, vals[i], freq, in_gap ? 1 : 0);
    }
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "spectrum.csv"));

    if (!matrix_out.empty()) {
        CsvFile mcsv(hash, "index,diag,offdiag");
        for (std::size_t i = 0; i < M.n(); ++i) {
            if (i + 1 < M.n())
                mcsv.row(i, M.diag[i], M.offdiag[i]);
            else
                mcsv.row(i, M.diag[i], std::string{});
        }
        mcsv.save(join_path(common.outdir, matrix_out));
    }

    const json summary{{"n", vals.size()},
                       {"count_in_gap", in_gap_count},
                       {"gap_lo", g.gap_lo},
                       {"gap_hi", g.gap_hi},
                       {"min_eigenvalue", vals.front()},
                       {"max_eigenvalue", vals.back()}};
    write_manifest(common.outdir, "spectrum", science, summary, hash);
}

void run_modes(const CommonOpts& common, const std::string& which) {
    const auto spec = common.spec();
    if (which != "gap" && which != "all")
        throw InvalidInputError("--which must be 'gap' or 'all'");
    const auto M = assemble_capacitance(build_defect_chain(spec));
    const auto g = bulk_gap(spec);

    std::vector<double> selected;
    if (which == "gap") {
        if (g.gap_empty())
            throw EmptyGapError("the gap is empty (requires s1 < s2)");
        const auto in_window = eigenvalues_in(M, g.gap_lo, g.gap_hi);
        if (in_window.size() != 1)
            throw TheoryViolationError(
                "expected exactly one eigenvalue in the gap");
        selected = in_window;
    } else {
        selected = eigenvalues(M);
    }

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"m", spec.m},
                 {"ell", spec.ell}, {"which", which}};
    const auto hash = manifest_hash("modes", science);

    const long centre = static_cast<long>(2 * spec.m);
    CsvFile csv(hash, "mode,eigenvalue,position,offset,value");
    for (std::size_t k = 0; k < selected.size(); ++k) {
        const auto pair = eigenvector(M, selected[k]);
        for (std::size_t i = 0; i < pair.vector.size(); ++i)
            csv.row(k, selected[k], i, static_cast<long>(i) - centre,
                    pair.vector[i]);
    }
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "modes.csv"));

    json eigs = json::array();
    for (double v : selected) eigs.push_back(v);
    const json summary{{"modes", selected.size()}, {"eigenvalues", eigs}};
    write_manifest(common.outdir, "modes", science, summary, hash);
}

void run_gap(const CommonOpts& common) {
    const auto spec = common.spec();
    const auto report = find_gap_eigenvalue(spec);

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"m", spec.m},
                 {"ell", spec.ell}};
    const auto hash = manifest_hash("gap", science);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvFile csv(hash,
                "N,lambda_gap,lambda_limit,abs_error,fitted_ratio,"
                "predicted_ratio");
    csv.row(4 * spec.m + 1, report.interface_eigenvalue,
            report.limit_eigenvalue, report.abs_error,
            report.decay ? report.decay->fitted_ratio : nan,
            report.decay ? report.decay->predicted_ratio : nan);
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "gap.csv"));

    json summary{{"count_in_gap", report.count_in_gap},
                 {"lambda_gap", report.interface_eigenvalue},
                 {"lambda_limit", report.limit_eigenvalue},
                 {"abs_error", report.abs_error}};
    if (report.decay) {
        summary["decay"] = json{{"fitted_ratio", report.decay->fitted_ratio},
                                {"predicted_ratio",
                                 report.decay->predicted_ratio},
                                {"r_squared", report.decay->r_squared},
                                {"points_used", report.decay->points_used}};
    }
    write_manifest(common.outdir, "gap", science, summary, hash);
}

void run_convergence(const CommonOpts& common, std::size_t m_min,
                     std::size_t m_max) {
    const auto spec = common.spec();
    if (m_min > m_max)
        throw InvalidInputError("--m-min must not exceed --m-max");
    std::vector<std::size_t> m_list;
    for (std::size_t m = m_min; m <= m_max; ++m) m_list.push_back(m);
    const auto study = convergence_study(spec, m_list);

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"ell", spec.ell},
                 {"m-min", m_min}, {"m-max", m_max}};
    const auto hash = manifest_hash("convergence", science);

    CsvFile csv(hash,
                "N,lambda_gap,lambda_limit,abs_error,fitted_ratio,"
                "predicted_ratio");
    for (const auto& row : study.rows)
        csv.row(row.n, row.lambda_gap, row.lambda_limit, row.abs_error,
                row.ratio, row.predicted_ratio);
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "convergence.csv"));

    const json summary{{"rows", study.rows.size()},
                       {"fitted_per_m_ratio", study.fitted_per_m_ratio},
                       {"predicted_per_m_ratio", study.predicted_per_m_ratio},
                       {"log_r_squared", study.log_r_squared},
                       {"final_abs_error", study.rows.back().abs_error}};
    write_manifest(common.outdir, "convergence", science, summary, hash);
}

json stability_point_json(const MonteCarloReport& report) {
    return json{{"eta", report.eta},
                {"runs", report.runs},
                {"violations_weyl", report.violations_weyl},
                {"violations_dk", report.violations_dk},
                {"violations_gap_persistence",
                 report.violations_gap_persistence},
                {"eligible_count", report.eligible_count},
                {"in_gap_count", report.in_gap_count},
                {"ratio_max", report.ratio_max},
                {"dislocation", json{{"mean", report.dislocation_mean},
                                     {"min", report.dislocation_min},
                                     {"max", report.dislocation_max}}}};
}

void run_stability(const CommonOpts& common, double eta,
                   const std::string& eta_sweep, std::size_t runs,
                   std::uint64_t seed, const std::string& trials_out) {
    const auto spec = common.spec();
    std::vector<double> etas;
    if (!eta_sweep.empty())
        etas = parse_sweep(eta_sweep);
    else
        etas.push_back(eta);
    for (double e : etas)
        if (!(e >= 0.0))
            throw InvalidInputError("eta must be nonnegative");

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"m", spec.m},
                 {"ell", spec.ell}, {"runs", runs}, {"seed", seed}};
    if (!eta_sweep.empty())
        science["eta-sweep"] = eta_sweep;
    else
        science["eta"] = eta;
    const auto hash = manifest_hash("stability", science);

    std::optional<CsvFile> trials_csv;
    if (!trials_out.empty())
        trials_csv.emplace(hash,
                           "eta,trial,eps,max_shift,weyl_ok,ratio,"
                           "dislocation,dk_bound,dk_apriori,eligible,dk_ok,"
                           "in_gap");

    json result{{"runs", runs}, {"seed", seed}, {"manifest_hash", hash}};
    json sweep = json::array();
    std::size_t total_weyl = 0, total_dk = 0;
    for (double e : etas) {
        PerturbationSpec pert;
        pert.eta = e;
        pert.seed = seed;
        const auto report = monte_carlo(spec, pert, runs);
        sweep.push_back(stability_point_json(report));
        total_weyl += report.violations_weyl;
        total_dk += report.violations_dk;
        if (trials_csv) {
            for (const auto& t : report.trials)
                trials_csv->row(e, t.trial_index, t.eps, t.max_eigval_shift,
                                t.weyl_ok ? 1 : 0, t.empirical_ratio,
                                t.interface_vec_dislocation, t.dk_bound,
                                t.dk_apriori_bound, t.dk_eligible ? 1 : 0,
                                t.dk_ok ? 1 : 0, t.pert_in_gap ? 1 : 0);
        }
    }
    if (etas.size() == 1) {
        result.update(sweep.front());
    } else {
        result["sweep"] = sweep;
        result["violations_weyl"] = total_weyl;
        result["violations_dk"] = total_dk;
    }

    ensure_outdir(common.outdir);
    write_json_file(join_path(common.outdir, "stability.json"), result);
    if (trials_csv) trials_csv->save(join_path(common.outdir, trials_out));

    json summary = result;
    summary.erase("manifest_hash");
    write_manifest(common.outdir, "stability", science, summary, hash);
}

void run_indicator(const CommonOpts& common, std::size_t dimers,
                   std::optional<double> at_lambda) {
    const auto spec = common.spec();
    const auto sweep = indicator_sweep(spec, dimers);

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"ell", spec.ell},
                 {"dimers", dimers}};
    if (at_lambda) science["at-lambda"] = *at_lambda;
    const auto hash = manifest_hash("indicator", science);

    CsvFile csv(hash, "eigenvalue,indicator");
    for (const auto& row : sweep.rows) csv.row(row.eigenvalue, row.indicator);
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "indicator.csv"));

    json summary{{"band_edge_eigenvalue", sweep.band_edge_eigenvalue},
                 {"band_edge_value", sweep.band_edge_value},
                 {"rows", sweep.rows.size()},
                 {"manifest_hash", hash}};
    if (at_lambda) {
        const auto* best = &sweep.rows.front();
        for (const auto& row : sweep.rows)
            if (std::abs(row.eigenvalue - *at_lambda) <
                std::abs(best->eigenvalue - *at_lambda))
                best = &row;
        summary["at_lambda"] = json{{"requested", *at_lambda},
                                    {"eigenvalue", best->eigenvalue},
                                    {"indicator", best->indicator}};
    }
    write_json_file(join_path(common.outdir, "indicator_summary.json"),
                    summary);
    summary.erase("manifest_hash");
    write_manifest(common.outdir, "indicator", science, summary, hash);
}

void run_pseudospectrum(const CommonOpts& common, std::size_t m_min,
                        std::size_t m_max, std::size_t k) {
    const auto spec = common.spec();
    if (m_min > m_max)
        throw InvalidInputError("--m-min must not exceed --m-max");

    json science{{"s1", spec.s1}, {"s2", spec.s2}, {"ell", spec.ell},
                 {"m-min", m_min}, {"m-max", m_max}, {"k", k}};
    const auto hash = manifest_hash("pseudospectrum", science);

    CsvFile csv(hash, "m,k,host_n,lambda,residual_norm,spectral_distance");
    double first_residual = 0.0, last_residual = 0.0;
    for (std::size_t m = m_min; m <= m_max; ++m) {
        const auto pr = pseudo_residual(spec, m, k);
        csv.row(m, k, pr.host_n, pr.lambda, pr.residual_norm,
                pr.spectral_distance);
        if (m == m_min) first_residual = pr.residual_norm;
        last_residual = pr.residual_norm;
    }
    ensure_outdir(common.outdir);
    csv.save(join_path(common.outdir, "pseudospectrum.csv"));

    const json summary{{"rows", m_max - m_min + 1},
                       {"first_residual", first_residual},
                       {"last_residual", last_residual}};
    write_manifest(common.outdir, "pseudospectrum", science, summary, hash);
}

// ===========================================================================
// Config-file merge
// ===========================================================================

/// Inject config-file entries as synthetic tokens right after the
/// subcommand, so explicit flags (which come later) win under take_last.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    const json cfg = read_json_file(config_path);
    if (!cfg.is_object())
        throw InvalidInputError("config file must hold a flat JSON object");

    std::size_t subcommand_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            subcommand_pos = i;
            break;
        }
    }
    if (subcommand_pos == args.size()) return args;  // parser will complain

    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config")
            throw InvalidInputError("config files cannot nest 'config'");
        tokens.push_back("--" + key);
        if (value.is_string())
            tokens.push_back(value.get<std::string>());
        else
            tokens.push_back(value.dump());
    }
    args.insert(args.begin() + static_cast<long>(subcommand_pos) + 1,
                tokens.begin(), tokens.end());
    return args;
}

int exit_code_for(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::invalid_input:    return 2;
        case ErrorCategory::empty_gap:        return 3;
        case ErrorCategory::solver_failure:   return 4;
        case ErrorCategory::theory_violation: return 4;
        case ErrorCategory::io:               return 5;
    }
    return 1;
}

int report_error(ErrorCategory cat, const std::string& message) {
    const json err{{"error", json{{"category", to_string(cat)},
                                  {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return exit_code_for(cat);
}

} // namespace

// ===========================================================================
// Entry point
// ===========================================================================

int main(int argc, char** argv) {
    CLI::App app{
        "dimerspec: spectra, interface modes, and stability experiments for "
        "finite dimerized resonator chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dimerspec::version_string));

    CommonOpts spectrum_opts, modes_opts, gap_opts, conv_opts, stab_opts,
        ind_opts, pseudo_opts;

    // --- spectrum ---------------------------------------------------------
    auto* spectrum_cmd = app.add_subcommand(
        "spectrum", "all eigenvalues and frequencies of a defect chain");
    add_common(spectrum_cmd, spectrum_opts);
    double delta = 1e-3, vb = 1.0;
    std::string matrix_out;
    spectrum_cmd->add_option("--delta", delta, "density contrast")
        ->take_last();
    spectrum_cmd->add_option("--vb", vb, "background wave speed")
        ->take_last();
    spectrum_cmd
        ->add_option("--matrix-out", matrix_out,
                     "also write the assembled matrix to this CSV file")
        ->take_last();

    // --- modes ------------------------------------------------------------
    auto* modes_cmd = app.add_subcommand(
        "modes", "eigenvector profiles indexed by position and interface "
                 "offset");
    add_common(modes_cmd, modes_opts);
    std::string which = "gap";
    modes_cmd
        ->add_option("--which", which,
                     "'gap' for the interface mode only, 'all' for every "
                     "mode")
        ->take_last();

    // --- gap --------------------------------------------------------------
    auto* gap_cmd = app.add_subcommand(
        "gap", "locate the in-gap eigenvalue and its decay fit");
    add_common(gap_cmd, gap_opts);

    // --- convergence ------------------------------------------------------
    auto* conv_cmd = app.add_subcommand(
        "convergence",
        "gap-eigenvalue error against the closed-form limit as m grows");
    add_common(conv_cmd, conv_opts);
    std::size_t conv_m_min = 3, conv_m_max = 25;
    conv_cmd->add_option("--m-min", conv_m_min, "smallest m (at least 2)")
        ->take_last();
    conv_cmd->add_option("--m-max", conv_m_max, "largest m")->take_last();

    // --- stability --------------------------------------------------------
    auto* stab_cmd = app.add_subcommand(
        "stability", "Monte Carlo bounds under spacing noise");
    add_common(stab_cmd, stab_opts);
    double eta = 0.1;
    std::string eta_sweep, trials_out;
    std::size_t runs = 1000;
    std::uint64_t seed = 0;
    stab_cmd
        ->add_option("--eta", eta,
                     "noise half-width as a fraction of the resonator length")
        ->take_last();
    stab_cmd
        ->add_option("--eta-sweep", eta_sweep,
                     "sweep start:stop:count (overrides --eta)")
        ->take_last();
    stab_cmd->add_option("--runs", runs, "trials per eta")->take_last();
    stab_cmd->add_option("--seed", seed, "base seed of the counter RNG")
        ->take_last();
    stab_cmd
        ->add_option("--trials-out", trials_out,
                     "also write one CSV row per trial to this file")
        ->take_last();

    // --- indicator --------------------------------------------------------
    auto* ind_cmd = app.add_subcommand(
        "indicator", "mirror indicator across a defectless chain's spectrum");
    add_common(ind_cmd, ind_opts);
    std::size_t dimers = 40;
    double at_lambda_value = 0.0;
    ind_cmd->add_option("--dimers", dimers, "number of unit cells")
        ->take_last();
    auto* at_lambda_opt =
        ind_cmd
            ->add_option("--at-lambda", at_lambda_value,
                         "also report the indicator at the eigenvalue "
                         "closest to this value")
            ->take_last();

    // --- pseudospectrum ---------------------------------------------------
    auto* pseudo_cmd = app.add_subcommand(
        "pseudospectrum",
        "residuals of gap modes embedded into larger chains");
    add_common(pseudo_cmd, pseudo_opts);
    std::size_t ps_m_min = 3, ps_m_max = 15, ps_k = 3;
    pseudo_cmd->add_option("--m-min", ps_m_min, "smallest embedded size")
        ->take_last();
    pseudo_cmd->add_option("--m-max", ps_m_max, "largest embedded size")
        ->take_last();
    pseudo_cmd->add_option("--k", ps_k, "zero padding, in unit cells per side")
        ->take_last();

    try {
        auto args = merge_config(std::vector<std::string>(argv + 1, argv + argc));
        // CLI11 parses the reversed token list
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (spectrum_cmd->parsed())
            run_spectrum(spectrum_opts, delta, vb, matrix_out);
        else if (modes_cmd->parsed())
            run_modes(modes_opts, which);
        else if (gap_cmd->parsed())
            run_gap(gap_opts);
        else if (conv_cmd->parsed())
            run_convergence(conv_opts, conv_m_min, conv_m_max);
        else if (stab_cmd->parsed())
            run_stability(stab_opts, eta, eta_sweep, runs, seed, trials_out);
        else if (ind_cmd->parsed())
            run_indicator(ind_opts, dimers,
                          at_lambda_opt->count() > 0
                              ? std::optional<double>(at_lambda_value)
                              : std::nullopt);
        else if (pseudo_cmd->parsed())
            run_pseudospectrum(pseudo_opts, ps_m_min, ps_m_max, ps_k);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(ErrorCategory::invalid_input, e.what());
    } catch (const dimerspec::Error& e) {
        return report_error(e.category(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorCategory::invalid_input, e.what());
    }
    return 0;
}
