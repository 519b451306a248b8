/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/data/clip.hpp"

#include <cstdio>

#include "core/data/manifest.hpp"

namespace dvslr {

Volume FrameClip::as_volume() const {
    Volume v(t, c, h, w);
    v.data = data;
    return v;
}

std::vector<std::size_t> sample_frame_indices(std::size_t num_raw_frames, int clip_len, int stride) {
    if (num_raw_frames == 0)
        throw_usage("sample_frame_indices: num_raw_frames must be positive");
    if (clip_len < 1 || stride < 1)
        throw_usage("sample_frame_indices: clip_len and stride must be >= 1");

    const std::size_t window = static_cast<std::size_t>(clip_len) * stride;
    std::size_t start = 0;
    if (num_raw_frames > window)
        start = (num_raw_frames - window) / 2;

    std::vector<std::size_t> indices(clip_len);
    const std::size_t last = num_raw_frames - 1;
    for (int i = 0; i < clip_len; ++i)
        indices[i] = std::min(start + static_cast<std::size_t>(i) * stride, last);
    return indices;
}

std::vector<double> normalize_frame(const RawImage& img,
                                    const std::array<double, 3>& mean,
                                    const std::array<double, 3>& stddev) {
    if (img.c != 3)
        throw_data("normalize_frame: expected a 3-channel image, got " + std::to_string(img.c));
    const int hw = img.h * img.w;
    std::vector<double> out(static_cast<std::size_t>(3) * hw);
    for (int ch = 0; ch < 3; ++ch) {
        const double m = mean[ch];
        const double inv_s = 1.0 / stddev[ch];
        double* dst = out.data() + static_cast<std::size_t>(ch) * hw;
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x)
                dst[y * img.w + x] = (img.at(y, x, ch) / 255.0 - m) * inv_s;
    }
    return out;
}

std::vector<double> preprocess_frame(const RawImage& img, int target_size,
                                     const std::array<double, 3>& mean,
                                     const std::array<double, 3>& stddev) {
    if (img.c != 3)
        throw_data("preprocess_frame: expected a 3-channel image, got " + std::to_string(img.c));
    return normalize_frame(central_crop_resize(img, target_size), mean, stddev);
}

std::filesystem::path frame_file_path(const std::filesystem::path& frame_dir, std::size_t index1) {
    char name[16];
    std::snprintf(name, sizeof(name), "%05zu.jpg", index1);
    return frame_dir / name;
}

std::vector<RawImage> load_clip_raw(const std::filesystem::path& root, const SampleRecord& record,
                                    const std::string& view, const DataConfig& cfg,
                                    std::vector<std::size_t>* source_indices) {
    if (!record.has_view(view))
        throw_data("load_clip: record " + record.key() + " has no view '" + view + "'");
    const ViewStream& vs = record.view(view);
    const auto indices = sample_frame_indices(vs.num_raw_frames, cfg.clip_len, cfg.stride);

    std::vector<RawImage> frames;
    frames.reserve(indices.size());
    // Indices repeat for short videos; decode each distinct frame once.
    RawImage last;
    std::size_t last_idx = static_cast<std::size_t>(-1);
    for (std::size_t idx : indices) {
        if (idx != last_idx) {
            last = central_crop_resize(decode_image(frame_file_path(root / vs.frame_dir, idx + 1)),
                                       cfg.target_size);
            last_idx = idx;
        }
        frames.push_back(last);
    }
    if (source_indices)
        *source_indices = indices;
    return frames;
}

FrameClip load_clip(const std::filesystem::path& root, const SampleRecord& record,
                    const std::string& view, const DataConfig& cfg) {
    FrameClip clip;
    clip.view = view;
    std::vector<RawImage> frames = load_clip_raw(root, record, view, cfg, &clip.source_indices);
    clip.t = static_cast<int>(frames.size());
    clip.c = 3;
    clip.h = cfg.target_size;
    clip.w = cfg.target_size;
    clip.data.resize(clip.frame_size() * clip.t);
    for (int i = 0; i < clip.t; ++i) {
        std::vector<double> f = normalize_frame(frames[i], cfg.mean, cfg.stddev);
        std::copy(f.begin(), f.end(), clip.frame(i));
    }
    return clip;
}

} // namespace dvslr
