/// End-to-end checks of the command-line tool: exit codes, error JSON,
/// manifest cross-referencing, config-file merging, environment overrides,
/// and byte-identical reruns.  The binary under test is injected via the
/// DIMERSPEC_CLI_PATH compile definition.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ===========================================================================
// Process and file helpers
// ===========================================================================

struct RunResult {
    int code = -1;
    std::string err;
};

fs::path scratch_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() /
                     ("dimerspec_cli_tests_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string fresh_outdir() {
    static int counter = 0;
    fs::path p = scratch_root() / ("case_" + std::to_string(counter++));
    fs::create_directories(p);
    return p.string();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path err_path =
        scratch_root() / ("stderr_" + std::to_string(counter++) + ".txt");
    std::string cmd;
    if (!env_prefix.empty()) cmd += env_prefix + " ";
    cmd += std::string(DIMERSPEC_CLI_PATH) + " " + args;
    cmd += " >/dev/null 2>" + err_path.string();
    const int raw = std::system(cmd.c_str());
    RunResult result;
    result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(err_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.err = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::istringstream ss(slurp(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

/// First line must read "# manifest <16 hex digits>"; returns the digits.
std::string manifest_ref(const std::vector<std::string>& lines) {
    REQUIRE(lines.size() >= 2);
    REQUIRE(lines[0].rfind("# manifest ", 0) == 0);
    const std::string hex = lines[0].substr(11);
    REQUIRE(hex.size() == 16);
    for (char c : hex) REQUIRE(std::isxdigit(static_cast<unsigned char>(c)));
    return hex;
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

} // namespace

// ===========================================================================
// Happy paths
// ===========================================================================

TEST_CASE("spectrum writes a flagged CSV and a matching manifest") {
    const std::string out = fresh_outdir();
    const auto r = run_cli("spectrum --s1 1 --s2 3 --m 10 --outdir " + out);
    REQUIRE(r.code == 0);

    const auto lines = read_lines(fs::path(out) / "spectrum.csv");
    const auto hex = manifest_ref(lines);
    REQUIRE(lines[1] == "index,eigenvalue,frequency,in_gap");
    REQUIRE(lines.size() == 2 + 41);

    int in_gap_count = 0;
    double gap_lambda = 0.0;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        REQUIRE(cells[0] == std::to_string(i - 2));
        if (cells[3] == "1") {
            ++in_gap_count;
            gap_lambda = std::strtod(cells[1].c_str(), nullptr);
        }
    }
    REQUIRE(in_gap_count == 1);
    REQUIRE(gap_lambda == Catch::Approx(0.8452994616207482).margin(1e-5));

    // kernel row: eigenvalue within solver noise of zero, frequency tiny
    const auto first = split_csv(lines[2]);
    REQUIRE(std::abs(std::strtod(first[1].c_str(), nullptr)) < 1e-10);
    REQUIRE(std::strtod(first[2].c_str(), nullptr) < 1e-6);
    REQUIRE(first[3] == "0");

    const json manifest = read_json(fs::path(out) / "spectrum_manifest.json");
    REQUIRE(manifest.at("manifest_hash").get<std::string>() == hex);
    REQUIRE(manifest.at("command") == "spectrum");
    REQUIRE(manifest.at("version") == "0.1.0");
    REQUIRE(manifest.at("summary").at("count_in_gap").get<int>() == 1);
    REQUIRE(manifest.at("config").at("s2").get<double>() == 3.0);
}

TEST_CASE("identical configurations produce byte-identical outputs") {
    const std::string out_a = fresh_outdir();
    const std::string out_b = fresh_outdir();
    const std::string flags = "spectrum --s1 1 --s2 2 --m 6 --outdir ";
    REQUIRE(run_cli(flags + out_a).code == 0);
    REQUIRE(run_cli(flags + out_b).code == 0);
    REQUIRE(slurp(fs::path(out_a) / "spectrum.csv") ==
            slurp(fs::path(out_b) / "spectrum.csv"));
    REQUIRE(slurp(fs::path(out_a) / "spectrum_manifest.json") ==
            slurp(fs::path(out_b) / "spectrum_manifest.json"));
}

TEST_CASE("matrix dump mirrors the assembled tridiagonal") {
    const std::string out = fresh_outdir();
    const auto r = run_cli(
        "spectrum --s1 1 --s2 2 --m 1 --matrix-out matrix.csv --outdir " +
        out);
    REQUIRE(r.code == 0);
    const auto lines = read_lines(fs::path(out) / "matrix.csv");
    manifest_ref(lines);
    REQUIRE(lines[1] == "index,diag,offdiag");
    REQUIRE(lines.size() == 2 + 5);
    REQUIRE(lines[2] == "0,1,-1");
    REQUIRE(lines[3] == "1,1.5,-0.5");
    REQUIRE(lines[4] == "2,1,-0.5");
    REQUIRE(lines[5] == "3,1.5,-1");
    REQUIRE(lines[6] == "4,1,");
}

TEST_CASE("modes emits positions and signed interface offsets") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("modes --s1 1 --s2 2 --m 3 --outdir " + out).code == 0);
    const auto lines = read_lines(fs::path(out) / "modes.csv");
    manifest_ref(lines);
    REQUIRE(lines[1] == "mode,eigenvalue,position,offset,value");
    REQUIRE(lines.size() == 2 + 13); // N = 13, single in-gap mode

    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 5);
        const long position = std::strtol(cells[2].c_str(), nullptr, 10);
        const long offset = std::strtol(cells[3].c_str(), nullptr, 10);
        REQUIRE(offset == position - 6);
    }
    // the mode is largest in magnitude at the interface
    double centre_value = 0.0, max_abs = 0.0;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        const double v = std::strtod(cells[4].c_str(), nullptr);
        if (cells[3] == "0") centre_value = std::abs(v);
        max_abs = std::max(max_abs, std::abs(v));
    }
    REQUIRE(centre_value == Catch::Approx(max_abs));

    const std::string out_all = fresh_outdir();
    REQUIRE(run_cli("modes --s1 1 --s2 2 --m 3 --which all --outdir " +
                    out_all)
                .code == 0);
    const auto all_lines = read_lines(fs::path(out_all) / "modes.csv");
    REQUIRE(all_lines.size() == 2 + 13 * 13);
}

TEST_CASE("gap reports the interface eigenvalue with decay data") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("gap --s1 1 --s2 2 --m 10 --outdir " + out).code == 0);
    const auto lines = read_lines(fs::path(out) / "gap.csv");
    const auto hex = manifest_ref(lines);
    REQUIRE(lines.size() == 2 + 1);
    const auto cells = split_csv(lines[2]);
    REQUIRE(cells.size() == 6);
    REQUIRE(cells[0] == "41");
    REQUIRE(std::strtod(cells[1].c_str(), nullptr) ==
            Catch::Approx(1.2192191034363653).margin(1e-9));
    REQUIRE(std::strtod(cells[2].c_str(), nullptr) ==
            Catch::Approx(1.2192235935955849).margin(1e-12));

    const json manifest = read_json(fs::path(out) / "gap_manifest.json");
    REQUIRE(manifest.at("manifest_hash") == hex);
    REQUIRE(manifest.at("summary").at("count_in_gap").get<int>() == 1);
    REQUIRE(manifest.at("summary").contains("decay"));
    REQUIRE(manifest.at("summary").at("decay").at("r_squared").get<double>() >
            0.99);
}

TEST_CASE("convergence table tracks the closed-form limit") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("convergence --s1 1 --s2 2 --m-min 3 --m-max 8 --outdir " +
                    out)
                .code == 0);
    const auto lines = read_lines(fs::path(out) / "convergence.csv");
    manifest_ref(lines);
    REQUIRE(lines.size() == 2 + 6);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        const long n = std::strtol(cells[0].c_str(), nullptr, 10);
        REQUIRE(n == 4 * static_cast<long>(i - 2 + 3) + 1);
    }
    const json manifest =
        read_json(fs::path(out) / "convergence_manifest.json");
    REQUIRE(manifest.at("summary").at("log_r_squared").get<double>() > 0.9);
    REQUIRE(manifest.at("summary").at("rows").get<int>() == 6);
}

TEST_CASE("stability aggregate honours seeding and reports zero violations") {
    const std::string out = fresh_outdir();
    const auto r = run_cli(
        "stability --s1 1 --s2 2 --m 2 --eta 0.05 --runs 20 --seed 3 "
        "--trials-out trials.csv --outdir " +
        out);
    REQUIRE(r.code == 0);

    const json agg = read_json(fs::path(out) / "stability.json");
    REQUIRE(agg.at("runs").get<int>() == 20);
    REQUIRE(agg.at("eta").get<double>() == 0.05);
    REQUIRE(agg.at("seed").get<int>() == 3);
    REQUIRE(agg.at("violations_weyl").get<int>() == 0);
    REQUIRE(agg.at("violations_dk").get<int>() == 0);
    REQUIRE(agg.at("dislocation").contains("mean"));
    REQUIRE(agg.at("dislocation").contains("min"));
    REQUIRE(agg.at("dislocation").contains("max"));

    const auto lines = read_lines(fs::path(out) / "trials.csv");
    const auto hex = manifest_ref(lines);
    REQUIRE(lines.size() == 2 + 20);
    REQUIRE(agg.at("manifest_hash") == hex);
    const json manifest = read_json(fs::path(out) / "stability_manifest.json");
    REQUIRE(manifest.at("manifest_hash") == hex);

    // reruns with the same seed are byte-identical
    const std::string out_b = fresh_outdir();
    REQUIRE(run_cli("stability --s1 1 --s2 2 --m 2 --eta 0.05 --runs 20 "
                    "--seed 3 --trials-out trials.csv --outdir " +
                    out_b)
                .code == 0);
    REQUIRE(slurp(fs::path(out) / "stability.json") ==
            slurp(fs::path(out_b) / "stability.json"));
    REQUIRE(slurp(fs::path(out) / "trials.csv") ==
            slurp(fs::path(out_b) / "trials.csv"));
}

TEST_CASE("stability eta sweep expands to one report per point") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("stability --s1 1 --s2 2 --m 2 --eta-sweep 0.02:0.06:3 "
                    "--runs 5 --seed 1 --outdir " +
                    out)
                .code == 0);
    const json agg = read_json(fs::path(out) / "stability.json");
    REQUIRE(agg.contains("sweep"));
    const auto& sweep = agg.at("sweep");
    REQUIRE(sweep.size() == 3);
    REQUIRE(sweep[0].at("eta").get<double>() == Catch::Approx(0.02));
    REQUIRE(sweep[1].at("eta").get<double>() == Catch::Approx(0.04));
    REQUIRE(sweep[2].at("eta").get<double>() == Catch::Approx(0.06));
    REQUIRE(agg.at("violations_weyl").get<int>() == 0);
}

TEST_CASE("indicator sweep flags the band edge sign") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("indicator --s1 1 --s2 2 --dimers 40 --outdir " + out)
                .code == 0);
    const auto lines = read_lines(fs::path(out) / "indicator.csv");
    manifest_ref(lines);
    REQUIRE(lines.size() == 2 + 80);
    const json summary = read_json(fs::path(out) / "indicator_summary.json");
    REQUIRE(summary.at("band_edge_value").get<double>() > 0.9);

    const std::string out_swapped = fresh_outdir();
    REQUIRE(run_cli("indicator --s1 2 --s2 1 --dimers 40 --outdir " +
                    out_swapped)
                .code == 0);
    const json swapped =
        read_json(fs::path(out_swapped) / "indicator_summary.json");
    REQUIRE(swapped.at("band_edge_value").get<double>() < -0.9);
}

TEST_CASE("indicator reports the row nearest a requested eigenvalue") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("indicator --s1 1 --s2 2 --dimers 12 --at-lambda 0.5 "
                    "--outdir " +
                    out)
                .code == 0);
    const json summary = read_json(fs::path(out) / "indicator_summary.json");
    REQUIRE(summary.contains("at_lambda"));
    REQUIRE(summary.at("at_lambda").at("requested").get<double>() == 0.5);
    const double got = summary.at("at_lambda").at("eigenvalue").get<double>();
    REQUIRE(std::abs(got - 0.5) < 0.5);
}

TEST_CASE("pseudospectrum residuals shrink with the embedded size") {
    const std::string out = fresh_outdir();
    REQUIRE(run_cli("pseudospectrum --s1 1 --s2 2 --m-min 3 --m-max 6 --k 2 "
                    "--outdir " +
                    out)
                .code == 0);
    const auto lines = read_lines(fs::path(out) / "pseudospectrum.csv");
    manifest_ref(lines);
    REQUIRE(lines.size() == 2 + 4);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 6);
        const double residual = std::strtod(cells[4].c_str(), nullptr);
        const double distance = std::strtod(cells[5].c_str(), nullptr);
        REQUIRE(distance <= residual + 1e-15);
        REQUIRE(residual < previous);
        previous = residual;
    }
}

// ===========================================================================
// Config files and environment
// ===========================================================================

TEST_CASE("config file supplies defaults and explicit flags override it") {
    const std::string out = fresh_outdir();
    const fs::path cfg_path = fs::path(out) / "config.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"s1": 1.0, "s2": 3.0, "m": 4})" << "\n";
    }

    REQUIRE(run_cli("spectrum --config " + cfg_path.string() + " --outdir " +
                    out)
                .code == 0);
    json manifest = read_json(fs::path(out) / "spectrum_manifest.json");
    REQUIRE(manifest.at("config").at("m").get<int>() == 4);
    REQUIRE(manifest.at("config").at("s2").get<double>() == 3.0);

    const std::string out_b = fresh_outdir();
    REQUIRE(run_cli("spectrum --config " + cfg_path.string() +
                    " --m 6 --outdir " + out_b)
                .code == 0);
    manifest = read_json(fs::path(out_b) / "spectrum_manifest.json");
    REQUIRE(manifest.at("config").at("m").get<int>() == 6);
    REQUIRE(manifest.at("config").at("s2").get<double>() == 3.0);
}

TEST_CASE("environment variable sets the default output directory") {
    const std::string out = fresh_outdir();
    const auto r = run_cli("spectrum --s1 1 --s2 2 --m 2",
                           "DIMERSPEC_OUTDIR=" + out);
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(fs::path(out) / "spectrum.csv"));
    REQUIRE(fs::exists(fs::path(out) / "spectrum_manifest.json"));
}

// ===========================================================================
// Error mapping
// ===========================================================================

TEST_CASE("invalid geometry exits 2 with a machine-readable category") {
    const auto r = run_cli("spectrum --s1 -1 --s2 2 --m 3 --outdir " +
                           fresh_outdir());
    REQUIRE(r.code == 2);
    const json err = json::parse(r.err);
    REQUIRE(err.at("error").at("category") == "invalid-input");
    REQUIRE_FALSE(err.at("error").at("message").get<std::string>().empty());
}

TEST_CASE("empty gap exits 3") {
    const auto r = run_cli("gap --s1 3 --s2 1 --m 5 --outdir " +
                           fresh_outdir());
    REQUIRE(r.code == 3);
    const json err = json::parse(r.err);
    REQUIRE(err.at("error").at("category") == "empty-gap");
}

TEST_CASE("unwritable output directory exits 5") {
    const std::string out = fresh_outdir();
    const fs::path blocker = fs::path(out) / "blocker";
    { std::ofstream f(blocker); f << "x"; }
    const auto r = run_cli("spectrum --s1 1 --s2 2 --m 2 --outdir " +
                           (blocker / "sub").string());
    REQUIRE(r.code == 5);
    const json err = json::parse(r.err);
    REQUIRE(err.at("error").at("category") == "io");
}

TEST_CASE("missing config file exits 5 and malformed config exits 2") {
    const auto missing = run_cli("spectrum --config /nonexistent/cfg.json");
    REQUIRE(missing.code == 5);
    REQUIRE(json::parse(missing.err).at("error").at("category") == "io");

    const std::string out = fresh_outdir();
    const fs::path bad_path = fs::path(out) / "bad.json";
    { std::ofstream f(bad_path); f << "{not json"; }
    const auto bad = run_cli("spectrum --config " + bad_path.string());
    REQUIRE(bad.code == 2);
    REQUIRE(json::parse(bad.err).at("error").at("category") ==
            "invalid-input");
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
    const auto unknown = run_cli("spectrum --nope 3 --outdir " +
                                 fresh_outdir());
    REQUIRE(unknown.code == 2);
    REQUIRE(json::parse(unknown.err).at("error").at("category") ==
            "invalid-input");

    const auto bare = run_cli("");
    REQUIRE(bare.code == 2);
}

TEST_CASE("help and version exit 0") {
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("spectrum --help").code == 0);
    REQUIRE(run_cli("--version").code == 0);
}
