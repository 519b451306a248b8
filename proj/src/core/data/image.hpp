/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dvslr {

/// Decoded 8-bit image, interleaved rows, RGB channel order when c == 3.
struct RawImage {
    int h = 0, w = 0, c = 0;
    std::vector<std::uint8_t> data; // h * w * c

    std::uint8_t& at(int y, int x, int ch) { return data[(static_cast<std::size_t>(y) * w + x) * c + ch]; }
    std::uint8_t at(int y, int x, int ch) const { return data[(static_cast<std::size_t>(y) * w + x) * c + ch]; }
};

/// Decode an image file as stored (no channel coercion). Throws an io error
/// naming the file when it cannot be read or decoded.
RawImage decode_image(const std::filesystem::path& path);

/// Encode as JPEG (quality fixed at 95 for reproducible bytes).
void write_jpeg(const std::filesystem::path& path, const RawImage& img);

/// Central square crop (side = min(h, w)) followed by bilinear resize to
/// target x target. Identity when the input is already square at target size.
RawImage central_crop_resize(const RawImage& img, int target_size);

} // namespace dvslr
