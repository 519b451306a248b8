/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/data/clip.hpp"
#include "core/data/manifest.hpp"
#include "core/tensor.hpp"

namespace dvslr {

/// Serves normalized clips for training/evaluation. preload() decodes and
/// caches the cropped/resized 8-bit frames of the requested records once;
/// lookups afterwards are read-only and safe from multiple threads.
class ClipDataset {
public:
    ClipDataset(const Manifest& manifest, DataConfig cfg);

    const Manifest& manifest() const { return *manifest_; }
    const DataConfig& config() const { return cfg_; }
    int num_classes() const { return static_cast<int>(manifest_->vocabulary.size()); }

    void preload(const std::vector<std::size_t>& record_indices,
                 const std::vector<std::string>& views);

    Volume clip(std::size_t record_idx, const std::string& view) const;
    std::map<std::string, Volume> clips(std::size_t record_idx,
                                        const std::vector<std::string>& views) const;
    int label(std::size_t record_idx) const;
    std::string key(std::size_t record_idx) const;

private:
    Volume to_volume(const std::vector<RawImage>& frames) const;

    const Manifest* manifest_;
    DataConfig cfg_;
    std::map<std::pair<std::size_t, std::string>, std::vector<RawImage>> cache_;
};

} // namespace dvslr
