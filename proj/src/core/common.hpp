/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dvslr {

/// Error taxonomy shared by the library, the C API and the CLI.
/// The CLI maps these to exit codes: usage -> 2, data/io -> 3, numeric -> 4.
enum class ErrorCategory {
    usage,    // bad argument / configuration
    data,     // dataset structure or validation failure
    io,       // filesystem / serialization failure
    numeric,  // non-finite values, divergence
    internal, // invariant broken inside the library
};

const char* to_string(ErrorCategory cat);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), cat_(cat) {}
    ErrorCategory category() const { return cat_; }

private:
    ErrorCategory cat_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) { throw Error(ErrorCategory::usage, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrorCategory::data, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorCategory::io, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorCategory::numeric, msg); }
[[noreturn]] inline void throw_internal(const std::string& msg) { throw Error(ErrorCategory::internal, msg); }

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent seed streams.
std::uint64_t mix_bits(std::uint64_t x);

/// Combine a base seed with stream tags into a new seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t extra);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_bits(seed + 0x9e3779b97f4a7c15ULL)); }

} // namespace dvslr
