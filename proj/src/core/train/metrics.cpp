/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/train/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "core/common.hpp"

using nlohmann::json;

namespace dvslr {

void PredictionSet::validate() const {
    if (num_classes < 1)
        throw_usage("prediction set: num_classes must be positive");
    std::vector<char> seen(num_classes);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Entry& e = entries[i];
        if (e.label < 0 || e.label >= num_classes)
            throw_data("prediction set: entry " + std::to_string(i) + " has label out of range");
        if (e.ranked.size() != static_cast<std::size_t>(num_classes))
            throw_data("prediction set: entry " + std::to_string(i) +
                       " ranking has wrong length");
        std::fill(seen.begin(), seen.end(), 0);
        for (int c : e.ranked) {
            if (c < 0 || c >= num_classes || seen[c])
                throw_data("prediction set: entry " + std::to_string(i) +
                           " ranking is not a permutation");
            seen[c] = 1;
        }
    }
}

std::vector<int> rank_classes(const Vec& scores) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](int a, int b) { return scores(a) > scores(b); });
    return order;
}

double top_k_accuracy(const PredictionSet& preds, int k) {
    if (preds.entries.empty())
        throw_usage("top_k_accuracy: empty prediction set");
    if (k < 1 || k > preds.num_classes)
        throw_usage("top_k_accuracy: k must be in [1, " + std::to_string(preds.num_classes) +
                    "], got " + std::to_string(k));
    std::size_t hits = 0;
    for (const auto& e : preds.entries) {
        // Position of the true label in the ranking; a hit iff it is < k.
        for (int pos = 0; pos < k; ++pos)
            if (e.ranked[pos] == e.label) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(preds.entries.size());
}

void MetricsRow::validate() const {
    if (dataset.empty() || view_mode.empty() || method.empty())
        throw_usage("metrics row: dataset, view_mode and method must be set");
    if (view_mode != "front" && view_mode != "left" && view_mode != "dual")
        throw_usage("metrics row: view_mode must be front|left|dual, got '" + view_mode + "'");
    if (!(0.0 <= top1 && top1 <= top5 && top5 <= top10 && top10 <= 100.0))
        throw_usage("metrics row: accuracies must satisfy 0 <= top1 <= top5 <= top10 <= 100");
}

json MetricsRow::to_json() const {
    return json{{"dataset", dataset}, {"view_mode", view_mode}, {"method", method},
                {"top1", top1},       {"top5", top5},           {"top10", top10}};
}

MetricsRow MetricsRow::from_json(const json& j) {
    MetricsRow r;
    r.dataset = j.at("dataset").get<std::string>();
    r.view_mode = j.at("view_mode").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.top1 = j.at("top1").get<double>();
    r.top5 = j.at("top5").get<double>();
    r.top10 = j.at("top10").get<double>();
    r.validate();
    return r;
}

MetricsRow metrics_from_predictions(const PredictionSet& preds, const std::string& dataset,
                                    const std::string& view_mode, const std::string& method) {
    MetricsRow row;
    row.dataset = dataset;
    row.view_mode = view_mode;
    row.method = method;
    auto pct = [&preds](int k) {
        return 100.0 * top_k_accuracy(preds, std::min(k, preds.num_classes));
    };
    row.top1 = pct(1);
    row.top5 = pct(5);
    row.top10 = pct(10);
    row.validate();
    return row;
}

void save_metrics_rows(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back(r.to_json());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw_io("cannot write metrics file: " + path.string());
    out << arr.dump(2) << "\n";
}

std::vector<MetricsRow> load_metrics_rows(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_io("cannot open metrics file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_data("metrics file " + path.string() + " is not valid JSON: " + e.what());
    }
    std::vector<MetricsRow> rows;
    if (j.is_array())
        for (const auto& item : j)
            rows.push_back(MetricsRow::from_json(item));
    else
        rows.push_back(MetricsRow::from_json(j));
    return rows;
}

} // namespace dvslr
