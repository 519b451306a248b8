/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/model/model.hpp"
#include "core/train/dataset.hpp"

namespace dvslr {

struct TrainConfig {
    int batch_size = 32;
    double learning_rate = 0.01; // unspecified upstream; documented default
    double momentum = 0.9;       // unspecified upstream; documented default
    double weight_decay = 0.0;   // unspecified upstream; documented default
    int patience = 5;
    int max_epochs = 100;
    std::uint64_t seed = 0;

    void validate() const;
    static TrainConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_top1 = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;    // first epoch attaining the minimum validation loss
    int stopped_epoch = -1; // last epoch that ran

    nlohmann::json to_json() const;
    static TrainHistory from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static TrainHistory load(const std::filesystem::path& path);
};

/// Min-based patience rule: stop once the best validation loss was not
/// attained anywhere in the last `patience` entries. Returns (should_stop,
/// first index achieving the minimum).
std::pair<bool, int> early_stop_decision(const std::vector<double>& val_losses, int patience);

/// Mini-batch SGD with momentum over cross-entropy, early stopping on the
/// validation loss, weights restored from the best epoch. Deterministic for a
/// fixed seed regardless of the worker-thread count.
TrainHistory train_model(Recognizer& model, const ClipDataset& data,
                         const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& val_idx, const TrainConfig& cfg);

} // namespace dvslr
