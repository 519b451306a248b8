/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/train/dataset.hpp"

namespace dvslr {

ClipDataset::ClipDataset(const Manifest& manifest, DataConfig cfg)
    : manifest_(&manifest), cfg_(cfg) {}

void ClipDataset::preload(const std::vector<std::size_t>& record_indices,
                          const std::vector<std::string>& views) {
    std::vector<std::pair<std::size_t, std::string>> todo;
    for (std::size_t idx : record_indices)
        for (const std::string& view : views) {
            auto key = std::make_pair(idx, view);
            if (cache_.find(key) == cache_.end()) {
                cache_.emplace(key, std::vector<RawImage>{});
                todo.push_back(std::move(key));
            }
        }
    const int n = static_cast<int>(todo.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const auto& [idx, view] = todo[i];
        cache_[todo[i]] = load_clip_raw(manifest_->root, manifest_->records.at(idx), view, cfg_);
        (void)idx;
        (void)view;
    }
}

Volume ClipDataset::to_volume(const std::vector<RawImage>& frames) const {
    Volume v(static_cast<int>(frames.size()), 3, cfg_.target_size, cfg_.target_size);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::vector<double> f = normalize_frame(frames[i], cfg_.mean, cfg_.stddev);
        std::copy(f.begin(), f.end(), v.sample(static_cast<int>(i)));
    }
    return v;
}

Volume ClipDataset::clip(std::size_t record_idx, const std::string& view) const {
    auto it = cache_.find(std::make_pair(record_idx, view));
    if (it != cache_.end() && !it->second.empty())
        return to_volume(it->second);
    return to_volume(load_clip_raw(manifest_->root, manifest_->records.at(record_idx), view, cfg_));
}

std::map<std::string, Volume> ClipDataset::clips(std::size_t record_idx,
                                                 const std::vector<std::string>& views) const {
    std::map<std::string, Volume> out;
    for (const std::string& view : views)
        out.emplace(view, clip(record_idx, view));
    return out;
}

int ClipDataset::label(std::size_t record_idx) const {
    return manifest_->records.at(record_idx).gloss_id;
}

std::string ClipDataset::key(std::size_t record_idx) const {
    return manifest_->records.at(record_idx).key();
}

} // namespace dvslr
