/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/model/backbone.hpp"

namespace dvslr {

BackboneSpec BackboneSpec::resolve(const std::string& architecture) {
    BackboneSpec s;
    if (architecture == "resnet34") {
        // defaults above
    } else if (architecture == "resnet18") {
        s.stage_blocks = {2, 2, 2, 2};
    } else if (architecture == "micro") {
        // Desk-scale net for small frames (e.g. 64x64): three light stages.
        s.stem_channels = 8;
        s.stem_kernel = 3;
        s.stem_stride = 2;
        s.stem_pool = false;
        s.stage_blocks = {1, 1, 1};
        s.stage_channels = {8, 16, 32};
    } else if (architecture == "small") {
        s.stem_channels = 16;
        s.stem_kernel = 3;
        s.stem_stride = 2;
        s.stem_pool = false;
        s.stage_blocks = {2, 2, 2};
        s.stage_channels = {16, 32, 64};
    } else {
        throw_usage("unknown backbone architecture '" + architecture +
                    "' (expected resnet34|resnet18|small|micro)");
    }
    return s;
}

void ResidualBlock::build(ParamStore& store, const std::string& name, int in_ch, int out_ch,
                          int stride) {
    conv1.build(store, name + ".conv1", in_ch, out_ch, 3, stride, 1);
    conv2.build(store, name + ".conv2", out_ch, out_ch, 3, 1, 1);
    if (in_ch != out_ch || stride != 1) {
        skip.emplace();
        skip->build(store, name + ".skip", in_ch, out_ch, 1, stride, 0);
    }
}

void ResidualBlock::init(ParamStore& store, Rng& rng) const {
    conv1.init_he(store, rng);
    conv2.init_he(store, rng);
    if (skip)
        skip->init_he(store, rng);
}

Volume ResidualBlock::forward(const ParamStore& store, const Volume& x, ResBlockCtx& ctx) const {
    ctx.x = x;
    ctx.pre1 = conv1.forward(store, x);
    ctx.act1 = relu(ctx.pre1);
    ctx.pre2 = conv2.forward(store, ctx.act1);
    ctx.sum = ctx.pre2;
    if (skip) {
        ctx.skip_out = skip->forward(store, x);
        for (std::size_t i = 0; i < ctx.sum.data.size(); ++i)
            ctx.sum.data[i] += ctx.skip_out.data[i];
    } else {
        for (std::size_t i = 0; i < ctx.sum.data.size(); ++i)
            ctx.sum.data[i] += x.data[i];
    }
    return relu(ctx.sum);
}

Volume ResidualBlock::backward(const ParamStore& store, const ResBlockCtx& ctx, const Volume& dy,
                               GradBuffer& grad) const {
    Volume dsum = relu_backward(ctx.sum, dy);
    Volume dact1 = conv2.backward(store, ctx.act1, dsum, grad);
    Volume dpre1 = relu_backward(ctx.pre1, dact1);
    Volume dx = conv1.backward(store, ctx.x, dpre1, grad);
    if (skip) {
        Volume dskip = skip->backward(store, ctx.x, dsum, grad);
        for (std::size_t i = 0; i < dx.data.size(); ++i)
            dx.data[i] += dskip.data[i];
    } else {
        for (std::size_t i = 0; i < dx.data.size(); ++i)
            dx.data[i] += dsum.data[i];
    }
    return dx;
}

void Backbone::build(ParamStore& store, const std::string& name,
                     const SpatialBackboneConfig& config) {
    cfg = config;
    spec = BackboneSpec::resolve(config.architecture);
    stem.build(store, name + ".stem", 3, spec.stem_channels, spec.stem_kernel, spec.stem_stride,
               spec.stem_kernel / 2);
    int ch = spec.stem_channels;
    blocks.clear();
    for (std::size_t stage = 0; stage < spec.stage_blocks.size(); ++stage) {
        for (int b = 0; b < spec.stage_blocks[stage]; ++b) {
            const int out_ch = spec.stage_channels[stage];
            const int stride = (b == 0 && stage > 0) ? 2 : 1;
            ResidualBlock block;
            block.build(store,
                        name + ".stage" + std::to_string(stage) + ".block" + std::to_string(b),
                        ch, out_ch, stride);
            blocks.push_back(std::move(block));
            ch = out_ch;
        }
    }
    has_proj = spec.output_channels() != cfg.feature_dim;
    if (has_proj)
        proj.build(store, name + ".proj", spec.output_channels(), cfg.feature_dim);
}

void Backbone::init(ParamStore& store, Rng& rng) const {
    stem.init_he(store, rng);
    for (const auto& b : blocks)
        b.init(store, rng);
    if (has_proj)
        proj.init_he(store, rng);
}

Mat Backbone::forward(const ParamStore& store, const Volume& clip, BackboneCtx& ctx) const {
    if (clip.c != 3)
        throw_usage("backbone: clips must have 3 channels, got " + std::to_string(clip.c));
    ctx.input = clip;
    ctx.stem_pre = stem.forward(store, clip);
    ctx.stem_act = relu(ctx.stem_pre);
    Volume cur = ctx.stem_act;
    if (spec.stem_pool) {
        ctx.pooled = pool.forward(ctx.stem_act, ctx.poolc);
        cur = ctx.pooled;
    }
    ctx.blocks.resize(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i)
        cur = blocks[i].forward(store, cur, ctx.blocks[i]);
    ctx.last = std::move(cur);
    ctx.gap = global_avg_pool(ctx.last);
    return has_proj ? proj.forward(store, ctx.gap) : ctx.gap;
}

void Backbone::backward(const ParamStore& store, const BackboneCtx& ctx, const Mat& dfeat,
                        GradBuffer& grad) const {
    Mat dgap = has_proj ? proj.backward(store, ctx.gap, dfeat, grad) : dfeat;
    Volume d = global_avg_pool_backward(ctx.last, dgap);
    for (std::size_t i = blocks.size(); i-- > 0;)
        d = blocks[i].backward(store, ctx.blocks[i], d, grad);
    if (spec.stem_pool)
        d = pool.backward(ctx.stem_act, ctx.poolc, d);
    d = relu_backward(ctx.stem_pre, d);
    // The stem is the first layer; gradients w.r.t. the input image are not needed.
    stem.backward(store, ctx.input, d, grad, /*need_dx=*/false);
}

} // namespace dvslr
