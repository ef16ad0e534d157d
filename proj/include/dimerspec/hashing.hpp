/// Deterministic hashing utilities: a 64-bit mixer, counter-based uniform
/// variates built on it, and FNV-1a for fingerprinting binary payloads.
///
/// Everything here is pure integer arithmetic plus one float multiply, so
/// results are bit-identical across runs and platforms. The counter scheme
/// lets Monte-Carlo trials draw noise by (seed, trial, index) without any
/// sequential generator state, which makes aggregates independent of trial
/// execution order.
#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace dimerspec {

/// Finalizer-style 64-bit mixer (the splitmix64 output function).
/// Full-avalanche: every input bit affects every output bit.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Combine a seed with two counters into one well-mixed 64-bit word.
inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return h;
}

/// Uniform variate in the open interval (0, 1): 53 high bits of the key,
/// centered on the bin midpoints so 0 and 1 are never produced.
inline double counter_uniform(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) noexcept {
    const std::uint64_t h = counter_key(seed, a, b);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// FNV-1a (64-bit)
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t fnv1a_offset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t fnv1a_prime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = fnv1a_offset) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= fnv1a_prime;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = fnv1a_offset) noexcept {
    return fnv1a64(s.data(), s.size(), h);
}

/// Feed one double into an FNV-1a stream as its little-endian bit pattern.
inline std::uint64_t fnv1a64_double(double x, std::uint64_t h) noexcept {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    return fnv1a64(bytes, 8, h);
}

/// 16-character lowercase hex rendering of a 64-bit hash.
inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace dimerspec
