#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zdt {

// Bad input: malformed files, violated data preconditions, unusable configs.
// The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training or inference produced a non-finite value. CLI exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownHostError : DataError {
    explicit UnknownHostError(const std::string& host)
        : DataError("unknown host: " + host + " (endpoint absent from graph artifacts)"), host(host) {}
    std::string host;
};

// FNV-1a 64-bit, used for the bundle content and feature-layout checksums.
inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace zdt
