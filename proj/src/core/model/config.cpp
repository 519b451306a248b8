/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/model/config.hpp"

#include "core/json_util.hpp"

using nlohmann::json;

namespace dvslr {

SpatialBackboneConfig SpatialBackboneConfig::from_json(const json& j) {
    check_keys(j, {"architecture", "pretrained", "weights", "feature_dim", "frozen"},
               "backbone config");
    SpatialBackboneConfig c;
    c.architecture = j.value("architecture", c.architecture);
    c.pretrained = j.value("pretrained", c.pretrained);
    c.weights = j.value("weights", c.weights);
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.frozen = j.value("frozen", c.frozen);
    return c;
}

json SpatialBackboneConfig::to_json() const {
    return json{{"architecture", architecture},
                {"pretrained", pretrained},
                {"weights", weights},
                {"feature_dim", feature_dim},
                {"frozen", frozen}};
}

void EncoderConfig::validate() const {
    if (num_layers < 1 || num_heads < 1 || embed_dim < 1 || feedforward_dim < 1)
        throw_usage("encoder config: dimensions must be positive");
    if (embed_dim % num_heads != 0)
        throw_usage("encoder config: embed_dim must be divisible by num_heads");
    if (dropout < 0.0 || dropout >= 1.0)
        throw_usage("encoder config: dropout must be in [0, 1)");
    if (positional_encoding != "sinusoidal" && positional_encoding != "learned" &&
        positional_encoding != "none")
        throw_usage("encoder config: positional_encoding must be sinusoidal|learned|none");
}

EncoderConfig EncoderConfig::from_json(const json& j) {
    check_keys(j,
               {"num_layers", "num_heads", "embed_dim", "feedforward_dim", "dropout",
                "positional_encoding"},
               "encoder config");
    EncoderConfig c;
    c.num_layers = j.value("num_layers", c.num_layers);
    c.num_heads = j.value("num_heads", c.num_heads);
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.feedforward_dim = j.value("feedforward_dim", c.feedforward_dim);
    c.dropout = j.value("dropout", c.dropout);
    c.positional_encoding = j.value("positional_encoding", c.positional_encoding);
    c.validate();
    return c;
}

json EncoderConfig::to_json() const {
    return json{{"num_layers", num_layers},
                {"num_heads", num_heads},
                {"embed_dim", embed_dim},
                {"feedforward_dim", feedforward_dim},
                {"dropout", dropout},
                {"positional_encoding", positional_encoding}};
}

HeadConfig HeadConfig::from_json(const json& j) {
    check_keys(j, {"hidden_dim"}, "head config");
    HeadConfig c;
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    if (c.hidden_dim < 0)
        throw_usage("head config: hidden_dim must be >= 0");
    return c;
}

json HeadConfig::to_json() const { return json{{"hidden_dim", hidden_dim}}; }

void FusionConfig::validate() const {
    if (projection_dim < 1)
        throw_usage("fusion config: projection_dim must be positive");
    if (plus_rule != "sum_logits" && plus_rule != "avg_probs")
        throw_usage("fusion config: plus_rule must be sum_logits|avg_probs");
}

FusionConfig FusionConfig::from_json(const json& j) {
    check_keys(j, {"projection_dim", "plus_rule", "share_view_weights"}, "fusion config");
    FusionConfig c;
    c.projection_dim = j.value("projection_dim", c.projection_dim);
    c.plus_rule = j.value("plus_rule", c.plus_rule);
    c.share_view_weights = j.value("share_view_weights", c.share_view_weights);
    c.validate();
    return c;
}

json FusionConfig::to_json() const {
    return json{{"projection_dim", projection_dim},
                {"plus_rule", plus_rule},
                {"share_view_weights", share_view_weights}};
}

void ModelConfig::validate() const {
    encoder.validate();
    fusion.validate();
    if (backbone.feature_dim < 1)
        throw_usage("backbone config: feature_dim must be positive");
}

ModelConfig ModelConfig::from_json(const json& j) {
    check_keys(j, {"backbone", "encoder", "head", "fusion"}, "model config");
    ModelConfig c;
    if (j.contains("backbone"))
        c.backbone = SpatialBackboneConfig::from_json(j.at("backbone"));
    if (j.contains("encoder"))
        c.encoder = EncoderConfig::from_json(j.at("encoder"));
    if (j.contains("head"))
        c.head = HeadConfig::from_json(j.at("head"));
    if (j.contains("fusion"))
        c.fusion = FusionConfig::from_json(j.at("fusion"));
    c.validate();
    return c;
}

json ModelConfig::to_json() const {
    return json{{"backbone", backbone.to_json()},
                {"encoder", encoder.to_json()},
                {"head", head.to_json()},
                {"fusion", fusion.to_json()}};
}

} // namespace dvslr
