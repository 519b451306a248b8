/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "core/json_util.hpp"
#include "core/train/metrics.hpp"

using nlohmann::json;

namespace dvslr {

void TrainConfig::validate() const {
    if (batch_size < 1)
        throw_usage("train config: batch_size must be >= 1");
    if (patience < 1)
        throw_usage("train config: patience must be >= 1");
    if (max_epochs < 1)
        throw_usage("train config: max_epochs must be >= 1");
    if (!(learning_rate > 0.0))
        throw_usage("train config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw_usage("train config: momentum must be in [0, 1)");
    if (weight_decay < 0.0)
        throw_usage("train config: weight_decay must be >= 0");
}

TrainConfig TrainConfig::from_json(const json& j) {
    check_keys(j,
               {"batch_size", "learning_rate", "momentum", "weight_decay", "patience",
                "max_epochs", "seed"},
               "train config");
    TrainConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.momentum = j.value("momentum", c.momentum);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.patience = j.value("patience", c.patience);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

json TrainConfig::to_json() const {
    return json{{"batch_size", batch_size},     {"learning_rate", learning_rate},
                {"momentum", momentum},         {"weight_decay", weight_decay},
                {"patience", patience},         {"max_epochs", max_epochs},
                {"seed", seed}};
}

json TrainHistory::to_json() const {
    json j;
    j["best_epoch"] = best_epoch;
    j["stopped_epoch"] = stopped_epoch;
    j["epochs"] = json::array();
    for (const auto& e : epochs)
        j["epochs"].push_back(
            {{"train_loss", e.train_loss}, {"val_loss", e.val_loss}, {"val_top1", e.val_top1}});
    return j;
}

TrainHistory TrainHistory::from_json(const json& j) {
    TrainHistory h;
    h.best_epoch = j.at("best_epoch").get<int>();
    h.stopped_epoch = j.at("stopped_epoch").get<int>();
    for (const auto& e : j.at("epochs"))
        h.epochs.push_back({e.at("train_loss").get<double>(), e.at("val_loss").get<double>(),
                            e.at("val_top1").get<double>()});
    return h;
}

void TrainHistory::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw_io("cannot write history file: " + path.string());
    out << to_json().dump(2) << "\n";
}

TrainHistory TrainHistory::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_io("cannot open history file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_data("history file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

std::pair<bool, int> early_stop_decision(const std::vector<double>& val_losses, int patience) {
    if (val_losses.empty())
        throw_usage("early_stop_decision: empty loss list");
    if (patience < 1)
        throw_usage("early_stop_decision: patience must be >= 1");
    int best = 0;
    for (std::size_t i = 1; i < val_losses.size(); ++i)
        if (val_losses[i] < val_losses[best])
            best = static_cast<int>(i);
    const double min_loss = val_losses[best];
    const std::size_t window_begin =
        val_losses.size() > static_cast<std::size_t>(patience) ? val_losses.size() - patience : 0;
    bool attained_in_window = false;
    for (std::size_t i = window_begin; i < val_losses.size(); ++i)
        if (val_losses[i] == min_loss) {
            attained_in_window = true;
            break;
        }
    return {!attained_in_window, best};
}

namespace {

int worker_count() {
#ifdef _OPENMP
    return std::max(1, omp_get_max_threads());
#else
    return 1;
#endif
}

struct ValStats {
    double loss = 0.0;
    double top1 = 0.0;
};

ValStats validate_pass(const Recognizer& model, const ClipDataset& data,
                       const std::vector<std::size_t>& val_idx,
                       const std::vector<std::string>& views) {
    const int n = static_cast<int>(val_idx.size());
    std::vector<double> losses(n);
    std::vector<char> correct(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const auto clips = data.clips(val_idx[i], views);
        const int label = data.label(val_idx[i]);
        Vec logits = model.predict(clips);
        losses[i] = cross_entropy(logits, label);
        correct[i] = rank_classes(logits)[0] == label ? 1 : 0;
    }
    ValStats out;
    for (int i = 0; i < n; ++i) {
        out.loss += losses[i];
        out.top1 += correct[i];
    }
    out.loss /= n;
    out.top1 /= n;
    return out;
}

} // namespace

TrainHistory train_model(Recognizer& model, const ClipDataset& data,
                         const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& val_idx, const TrainConfig& cfg) {
    cfg.validate();
    if (train_idx.empty())
        throw_usage("train: the training split is empty");
    if (val_idx.empty())
        throw_usage("train: the validation split is empty (early stopping needs one)");
    const std::vector<std::string> views = model.required_views();
    const int num_classes = model.num_classes();
    for (std::size_t idx : train_idx)
        if (data.label(idx) < 0 || data.label(idx) >= num_classes)
            throw_data("train: record " + data.key(idx) + " has a label outside the vocabulary");

    ParamStore& params = model.params();
    const std::size_t offset = model.trainable_offset();
    std::vector<double> velocity(params.size(), 0.0);

    // Per-clip gradient buffers processed in waves and reduced in clip order:
    // results do not depend on the number of worker threads.
    const int wave = std::max(1, std::min(cfg.batch_size, 2 * worker_count()));
    std::vector<GradBuffer> clip_grads(wave, GradBuffer(params));
    GradBuffer batch_grad(params);

    TrainHistory history;
    std::vector<double> val_losses;
    std::vector<double> best_params;
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(train_idx);
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffle_rng = make_rng(derive_seed(cfg.seed, "shuffle", epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        const std::size_t n = order.size();
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            const int batch_n = static_cast<int>(end - begin);
            batch_grad.zero();
            double batch_loss = 0.0;

            for (int wbegin = 0; wbegin < batch_n; wbegin += wave) {
                const int wcount = std::min(wave, batch_n - wbegin);
                std::vector<double> losses(wcount);
#pragma omp parallel for schedule(dynamic)
                for (int i = 0; i < wcount; ++i) {
                    const std::size_t idx = order[begin + wbegin + i];
                    clip_grads[i].zero();
                    Rng drop_rng = make_rng(derive_seed(
                        cfg.seed, "dropout",
                        (static_cast<std::uint64_t>(epoch) << 40) ^
                            (static_cast<std::uint64_t>(batch_index) << 20) ^
                            static_cast<std::uint64_t>(wbegin + i)));
                    losses[i] = model.loss_and_backward(data.clips(idx, views), data.label(idx),
                                                        clip_grads[i], &drop_rng);
                }
                for (int i = 0; i < wcount; ++i) {
                    if (!std::isfinite(losses[i]))
                        throw_numeric("train: non-finite loss at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch_index));
                    batch_loss += losses[i];
                    batch_grad.accumulate(clip_grads[i]);
                }
            }
            epoch_loss += batch_loss;

            const double inv_batch = 1.0 / batch_n;
            std::vector<double>& w = params.raw();
            const std::vector<double>& g = batch_grad.raw();
            for (std::size_t j = offset; j < w.size(); ++j) {
                const double grad_j = g[j] * inv_batch + cfg.weight_decay * w[j];
                velocity[j] = cfg.momentum * velocity[j] + grad_j;
                w[j] -= cfg.learning_rate * velocity[j];
            }
        }
        epoch_loss /= static_cast<double>(n);

        const ValStats val = validate_pass(model, data, val_idx, views);
        if (!std::isfinite(val.loss))
            throw_numeric("train: non-finite validation loss at epoch " + std::to_string(epoch));
        history.epochs.push_back({epoch_loss, val.loss, val.top1});
        val_losses.push_back(val.loss);

        if (val.loss < best_val) {
            best_val = val.loss;
            best_params = params.raw();
            history.best_epoch = epoch;
        }
        history.stopped_epoch = epoch;

        const auto [stop, best] = early_stop_decision(val_losses, cfg.patience);
        if (best != history.best_epoch)
            throw_internal("train: early-stop bookkeeping mismatch");
        if (stop)
            break;
    }

    if (!best_params.empty())
        params.raw() = best_params;
    return history;
}

} // namespace dvslr
