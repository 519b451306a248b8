/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>

#include <json.hpp>

#include "core/common.hpp"

namespace dvslr {

struct SpatialBackboneConfig {
    std::string architecture = "resnet34"; // resnet34 | resnet18 | micro
    bool pretrained = false;
    std::string weights;   // checkpoint file supplying weights when pretrained
    int feature_dim = 512; // d_s, must match the architecture's output width
    bool frozen = false;

    static SpatialBackboneConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct EncoderConfig {
    int num_layers = 4;
    int num_heads = 8;
    int embed_dim = 512;
    int feedforward_dim = 2048;
    double dropout = 0.1;
    std::string positional_encoding = "sinusoidal"; // sinusoidal | learned | none

    void validate() const;
    static EncoderConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct HeadConfig {
    int hidden_dim = 0; // 0 = single linear layer

    static HeadConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct FusionConfig {
    int projection_dim = 512;            // d_early / d_late
    std::string plus_rule = "sum_logits"; // sum_logits | avg_probs
    bool share_view_weights = false;

    void validate() const;
    static FusionConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ModelConfig {
    SpatialBackboneConfig backbone;
    EncoderConfig encoder;
    HeadConfig head;
    FusionConfig fusion;

    void validate() const;
    static ModelConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

} // namespace dvslr
