/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/common.hpp"

namespace dvslr {

const char* to_string(ErrorCategory cat) {
    switch (cat) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::data: return "data";
    case ErrorCategory::io: return "io";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::internal: return "internal";
    }
    return "unknown";
}

std::uint64_t mix_bits(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix_bits(base * 0x9e3779b97f4a7c15ULL + mix_bits(tag));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char ch : tag) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return derive_seed(base, h);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t extra) {
    return derive_seed(derive_seed(base, tag), extra);
}

} // namespace dvslr
