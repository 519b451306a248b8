/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/model/config.hpp"
#include "core/nn/conv.hpp"
#include "core/nn/layers.hpp"

namespace dvslr {

/// Resolved residual-network shape for an architecture identifier.
struct BackboneSpec {
    int stem_channels = 64;
    int stem_kernel = 7;
    int stem_stride = 2;
    bool stem_pool = true; // 3x3 stride-2 max pool after the stem
    std::vector<int> stage_blocks{3, 4, 6, 3};
    std::vector<int> stage_channels{64, 128, 256, 512};

    int output_channels() const { return stage_channels.back(); }
    static BackboneSpec resolve(const std::string& architecture);
};

struct ResBlockCtx {
    Volume x;
    Volume pre1; // conv1 output before relu
    Volume act1;
    Volume pre2;    // conv2 output
    Volume skip_out; // projected skip (when present)
    Volume sum;      // pre final relu
};

/// conv-relu-conv plus identity (or 1x1-projected) skip, relu after the add.
struct ResidualBlock {
    Conv2d conv1, conv2;
    std::optional<Conv2d> skip;

    void build(ParamStore& store, const std::string& name, int in_ch, int out_ch, int stride);
    void init(ParamStore& store, Rng& rng) const;

    Volume forward(const ParamStore& store, const Volume& x, ResBlockCtx& ctx) const;
    Volume backward(const ParamStore& store, const ResBlockCtx& ctx, const Volume& dy,
                    GradBuffer& grad) const;
};

struct BackboneCtx {
    Volume input;
    Volume stem_pre;
    Volume stem_act;
    MaxPoolCtx poolc;
    Volume pooled;
    std::vector<ResBlockCtx> blocks;
    Volume last; // final block output
    Mat gap;     // frames x channels
};

/// Framewise spatial feature extractor: each frame of the clip is processed
/// independently into a d_s-wide feature row.
struct Backbone {
    SpatialBackboneConfig cfg;
    BackboneSpec spec;
    Conv2d stem;
    MaxPool2d pool;
    std::vector<ResidualBlock> blocks;
    bool has_proj = false;
    Linear proj; // output_channels -> d_s when they differ

    void build(ParamStore& store, const std::string& name, const SpatialBackboneConfig& cfg);
    void init(ParamStore& store, Rng& rng) const;

    /// clip frames [T,3,H,W] -> features [T, d_s]
    Mat forward(const ParamStore& store, const Volume& clip, BackboneCtx& ctx) const;
    void backward(const ParamStore& store, const BackboneCtx& ctx, const Mat& dfeat,
                  GradBuffer& grad) const;
};

} // namespace dvslr
