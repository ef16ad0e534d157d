/// Chain geometry: finite chains of equal-length resonators separated by
/// alternating spacings, the centrally-mirrored defect variant, and
/// reproducible random spacing perturbations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hashing.hpp"

namespace dimerspec {

// ===========================================================================
// Types
// ===========================================================================

/// A straight chain of N resonators with N-1 inter-resonator spacings.
struct ResonatorChain {
    std::vector<double> lengths;   // resonator lengths, one per resonator
    std::vector<double> spacings;  // gaps between neighbours, size N-1

    std::size_t size() const noexcept { return lengths.size(); }
};

/// Parameters of a two-spacing (dimerized) chain. The defect chain built
/// from it has N = 4m+1 resonators with the alternation pattern reversed at
/// the central resonator, which puts two s2 spacings next to each other.
struct DimerSpec {
    double s1 = 1.0;
    double s2 = 2.0;
    std::size_t m = 1;   // defect chains have N = 4m+1 resonators
    double ell = 1.0;    // common resonator length
};

enum class NoiseDistribution { uniform };

/// Description of i.i.d. spacing noise: each spacing receives an additive
/// perturbation drawn uniformly from (-eta*ell, eta*ell). eta is expressed
/// as a fraction of the resonator length.
struct PerturbationSpec {
    double eta = 0.0;
    std::uint64_t seed = 0;
    NoiseDistribution distribution = NoiseDistribution::uniform;
};

// ===========================================================================
// Validation
// ===========================================================================

inline void validate(const DimerSpec& spec) {
    if (!(spec.s1 > 0.0) || !(spec.s2 > 0.0))
        throw InvalidInputError("spacings s1 and s2 must be positive");
    if (!(spec.ell > 0.0))
        throw InvalidInputError("resonator length ell must be positive");
    if (spec.m < 1)
        throw InvalidInputError("defect half-count m must be at least 1");
}

inline void validate_chain(const ResonatorChain& chain) {
    if (chain.lengths.empty())
        throw InvalidInputError("chain must contain at least one resonator");
    if (chain.spacings.size() + 1 != chain.lengths.size())
        throw InvalidInputError("chain must have exactly N-1 spacings");
    for (double l : chain.lengths)
        if (!(l > 0.0))
            throw InvalidInputError("resonator lengths must be positive");
    for (double s : chain.spacings)
        if (!(s > 0.0))
            throw InvalidInputError("spacings must be positive");
}

inline NoiseDistribution parse_distribution(const std::string& name) {
    if (name == "uniform") return NoiseDistribution::uniform;
    throw InvalidInputError("unknown noise distribution '" + name +
                            "' (supported: uniform)");
}

inline const char* to_string(NoiseDistribution d) {
    switch (d) {
        case NoiseDistribution::uniform: return "uniform";
    }
    return "unknown";
}

// ===========================================================================
// Construction
// ===========================================================================

/// Defectless chain of n resonators: spacings alternate s1, s2, s1, ...
inline ResonatorChain build_uniform_dimer(const DimerSpec& spec,
                                          std::size_t n_resonators) {
    validate(spec);
    if (n_resonators < 2)
        throw InvalidInputError("a dimer chain needs at least 2 resonators");
    ResonatorChain chain;
    chain.lengths.assign(n_resonators, spec.ell);
    chain.spacings.resize(n_resonators - 1);
    for (std::size_t i = 0; i < chain.spacings.size(); ++i)
        chain.spacings[i] = (i % 2 == 0) ? spec.s1 : spec.s2;
    return chain;
}

/// Defect chain of N = 4m+1 resonators. Counting spacings from 1, the
/// first 2m alternate s1, s2, ... and the last 2m alternate s2, s1, ...,
/// so spacings 2m and 2m+1 are both s2 and the sequence is a palindrome.
inline ResonatorChain build_defect_chain(const DimerSpec& spec) {
    validate(spec);
    const std::size_t n = 4 * spec.m + 1;
    ResonatorChain chain;
    chain.lengths.assign(n, spec.ell);
    chain.spacings.resize(n - 1);
    for (std::size_t i = 1; i <= 2 * spec.m; ++i)
        chain.spacings[i - 1] = (i % 2 == 1) ? spec.s1 : spec.s2;
    for (std::size_t i = 2 * spec.m + 1; i <= 4 * spec.m; ++i)
        chain.spacings[i - 1] = ((i - 2 * spec.m) % 2 == 1) ? spec.s2 : spec.s1;
    return chain;
}

// ===========================================================================
// Perturbation
// ===========================================================================

/// Additive spacing noise for one (trial, spacing) cell, in (-1, 1) before
/// scaling. Counter-based: depends only on (seed, trial, index).
inline double noise_variate(std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t index) noexcept {
    return 2.0 * counter_uniform(seed, trial, index) - 1.0;
}

/// Apply i.i.d. uniform noise to every spacing of `chain`. Lengths are kept
/// as they are; only spacings move. The draw for spacing i of trial t is a
/// pure function of (pert.seed, t, i), so trials may be evaluated in any
/// order, or in parallel, with identical results.
inline ResonatorChain perturb_chain(const ResonatorChain& chain,
                                    const PerturbationSpec& pert,
                                    std::uint64_t trial_index) {
    validate_chain(chain);
    if (!(pert.eta >= 0.0))
        throw InvalidInputError("noise level eta must be nonnegative");
    if (pert.distribution != NoiseDistribution::uniform)
        throw InvalidInputError("unsupported noise distribution");
    const double ell = chain.lengths.front();
    const double half_width = pert.eta * ell;

    ResonatorChain out = chain;
    for (std::size_t i = 0; i < out.spacings.size(); ++i) {
        const double tilde =
            half_width * noise_variate(pert.seed, trial_index, i);
        const double s = chain.spacings[i] + tilde;
        if (!(s > 0.0))
            throw InvalidInputError(
                "perturbation closed spacing " + std::to_string(i) +
                " (eta too large for this geometry)");
        out.spacings[i] = s;
    }
    return out;
}

} // namespace dimerspec
