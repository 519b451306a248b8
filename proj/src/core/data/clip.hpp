/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "core/data/image.hpp"
#include "core/tensor.hpp"

namespace dvslr {

/// Clip extraction and frame preprocessing settings.
struct DataConfig {
    int clip_len = 16;
    int stride = 5;
    int target_size = 256;
    // Per-channel normalization applied after scaling pixels to [0,1].
    // Defaults follow the ImageNet convention used by the pretrained backbone.
    std::array<double, 3> mean{0.485, 0.456, 0.406};
    std::array<double, 3> stddev{0.229, 0.224, 0.225};

    int window() const { return clip_len * stride; }
};

/// Fixed-length preprocessed frame sequence for one view of one sample.
struct FrameClip {
    std::string view;
    int t = 0, c = 3, h = 0, w = 0;
    std::vector<double> data; // t * c * h * w, CHW per frame
    std::vector<std::size_t> source_indices;

    std::size_t frame_size() const { return static_cast<std::size_t>(c) * h * w; }
    const double* frame(int i) const { return data.data() + frame_size() * i; }
    double* frame(int i) { return data.data() + frame_size() * i; }

    Volume as_volume() const;
};

/// Deterministic centered sampling of clip_len raw-frame indices.
///
/// The covered window is clip_len * stride raw frames; its start is clamped
/// to 0 and indices past the last frame repeat it, so short videos still
/// yield a full-length clip.
std::vector<std::size_t> sample_frame_indices(std::size_t num_raw_frames,
                                              int clip_len = 16,
                                              int stride = 5);

/// Central crop, resize to target, scale to [0,1], then per-channel
/// (x - mean) / std. Output is CHW with shape 3 x target x target.
std::vector<double> preprocess_frame(const RawImage& img, int target_size,
                                     const std::array<double, 3>& mean,
                                     const std::array<double, 3>& stddev);

/// Normalization stage alone, for callers that cache cropped/resized frames.
std::vector<double> normalize_frame(const RawImage& square_rgb,
                                    const std::array<double, 3>& mean,
                                    const std::array<double, 3>& stddev);

/// Path of the n-th (1-based) frame file inside a frame directory.
std::filesystem::path frame_file_path(const std::filesystem::path& frame_dir, std::size_t index1);

struct SampleRecord; // manifest.hpp

/// Load and preprocess one view of one sample into a FrameClip.
FrameClip load_clip(const std::filesystem::path& root, const SampleRecord& record,
                    const std::string& view, const DataConfig& cfg);

/// Cacheable stage of load_clip: decoded, cropped and resized 8-bit frames.
std::vector<RawImage> load_clip_raw(const std::filesystem::path& root, const SampleRecord& record,
                                    const std::string& view, const DataConfig& cfg,
                                    std::vector<std::size_t>* source_indices = nullptr);

} // namespace dvslr
