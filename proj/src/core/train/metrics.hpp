/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/tensor.hpp"

namespace dvslr {

/// Labeled ranked predictions over one evaluation split.
struct PredictionSet {
    struct Entry {
        int label = 0;
        std::vector<int> ranked; // class ids in descending score order
    };

    int num_classes = 0;
    std::vector<Entry> entries;

    void validate() const; // each ranked list must be a permutation of 0..V-1
};

/// Descending-score class ranking; ties break toward the lower class id.
std::vector<int> rank_classes(const Vec& scores);

/// Fraction of samples whose label appears among the first k ranked classes.
double top_k_accuracy(const PredictionSet& preds, int k);

/// One Table-style result cell.
struct MetricsRow {
    std::string dataset;
    std::string view_mode; // front | left | dual
    std::string method;
    double top1 = 0.0, top5 = 0.0, top10 = 0.0; // percentages

    void validate() const;
    nlohmann::json to_json() const;
    static MetricsRow from_json(const nlohmann::json& j);
};

/// Build a row from predictions; k above the class count trivially yields
/// 100%, so small vocabularies still fill all three columns.
MetricsRow metrics_from_predictions(const PredictionSet& preds, const std::string& dataset,
                                    const std::string& view_mode, const std::string& method);

void save_metrics_rows(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> load_metrics_rows(const std::filesystem::path& path);

} // namespace dvslr
