/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/data/manifest.hpp"

namespace dvslr {

/// Configuration of the synthetic dual-view dataset generator.
///
/// Classes are rendered as a disk whose center follows a class-specific 3-D
/// Lissajous-style trajectory. The front camera sees the (x, y) projection,
/// the left camera the (z, y) projection. Classes listed as a front occlusion
/// pair share their (x, y) trajectory exactly and differ only in z, so they
/// cannot be told apart from the front view; left occlusion pairs mirror that
/// construction.
struct SynthConfig {
    int num_classes = 10;
    std::map<std::string, int> samples_per_class_per_split{{"train", 8}, {"val", 2}, {"test", 2}};
    int frames_per_video = 36;
    int image_size = 64;
    std::vector<std::pair<int, int>> front_occlusion_pairs;
    std::vector<std::pair<int, int>> left_occlusion_pairs;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    /// Raw-frame span the downstream clip sampler is expected to cover; a
    /// shorter frames_per_video triggers a warning, not an error.
    int clip_window_hint = 80;

    int signers() const;

    static SynthConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static SynthConfig from_json_text(const std::string& text);

    /// Throws a usage error on invalid settings; returns advisory warnings.
    std::vector<std::string> validate() const;
};

/// Write the dataset (frame tree, mapping, partition files, manifest) under
/// out_dir and return the manifest. Deterministic for a fixed config,
/// including byte-identical frame files across runs.
Manifest generate_synthetic_dataset(const SynthConfig& config,
                                    const std::filesystem::path& out_dir);

} // namespace dvslr
