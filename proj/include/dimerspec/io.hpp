/// Serialization helpers: shortest round-trip double formatting for CSV,
/// JSON (de)serializers for the chain/spec/perturbation types, and file
/// read/write wrappers that map stream failures onto IoError.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "chain.hpp"
#include "errors.hpp"

namespace dimerspec {

// ===========================================================================
// Number formatting
// ===========================================================================

/// Shortest decimal string that round-trips to the exact double. NaN and
/// infinities come out as "nan", "inf", "-inf".
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc())
        throw IoError("failed to format a double");
    return std::string(buf, res.ptr);
}

// ===========================================================================
// JSON serializers
// ===========================================================================

inline void to_json(nlohmann::json& j, const DimerSpec& s) {
    j = nlohmann::json{{"s1", s.s1}, {"s2", s.s2}, {"m", s.m}, {"ell", s.ell}};
}

inline void from_json(const nlohmann::json& j, DimerSpec& s) {
    s.s1 = j.at("s1").get<double>();
    s.s2 = j.at("s2").get<double>();
    s.m = j.at("m").get<std::size_t>();
    s.ell = j.value("ell", 1.0);
    validate(s);
}

inline void to_json(nlohmann::json& j, const PerturbationSpec& p) {
    j = nlohmann::json{{"eta", p.eta},
                       {"seed", p.seed},
                       {"distribution", to_string(p.distribution)}};
}

inline void from_json(const nlohmann::json& j, PerturbationSpec& p) {
    p.eta = j.at("eta").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.distribution =
        parse_distribution(j.value("distribution", std::string("uniform")));
}

/// Chains serialize as {"ell": <common length>, "spacings": [...]}; only
/// chains with identical resonator lengths are representable.
inline void to_json(nlohmann::json& j, const ResonatorChain& c) {
    validate_chain(c);
    const double ell = c.lengths.front();
    for (double l : c.lengths)
        if (l != ell)
            throw InvalidInputError(
                "only chains with a common resonator length serialize");
    j = nlohmann::json{{"ell", ell}, {"spacings", c.spacings}};
}

inline void from_json(const nlohmann::json& j, ResonatorChain& c) {
    const double ell = j.at("ell").get<double>();
    const auto spacings = j.at("spacings").get<std::vector<double>>();
    c.spacings = spacings;
    c.lengths.assign(spacings.size() + 1, ell);
    validate_chain(c);
}

// ===========================================================================
// File helpers
// ===========================================================================

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return ss.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failure: " + path);
}

/// Parse a JSON file. Unreadable files are IoError; malformed JSON is
/// InvalidInputError (the file was delivered, its content is the problem).
inline nlohmann::json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw InvalidInputError("malformed JSON in " + path);
    return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace dimerspec
