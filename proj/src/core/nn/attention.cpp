/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/nn/attention.hpp"

#include <cmath>

namespace dvslr {

void MultiHeadAttention::build(ParamStore& store, const std::string& name, int d, int h) {
    if (h < 1 || d % h != 0)
        throw_usage("attention: embed_dim (" + std::to_string(d) +
                    ") must be divisible by num_heads (" + std::to_string(h) + ")");
    dim = d;
    heads = h;
    head_dim = d / h;
    wq.build(store, name + ".wq", d, d);
    wk.build(store, name + ".wk", d, d);
    wv.build(store, name + ".wv", d, d);
    wo.build(store, name + ".wo", d, d);
}

void MultiHeadAttention::init(ParamStore& store, Rng& rng) const {
    wq.init_xavier(store, rng);
    wk.init_xavier(store, rng);
    wv.init_xavier(store, rng);
    wo.init_xavier(store, rng);
}

Mat MultiHeadAttention::forward(const ParamStore& store, const Mat& x, MHACtx& ctx) const {
    ctx.x = x;
    ctx.q = wq.forward(store, x);
    ctx.k = wk.forward(store, x);
    ctx.v = wv.forward(store, x);
    ctx.attn.resize(heads);
    ctx.concat.resize(x.rows(), dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    for (int h = 0; h < heads; ++h) {
        const auto qh = ctx.q.middleCols(h * head_dim, head_dim);
        const auto kh = ctx.k.middleCols(h * head_dim, head_dim);
        const auto vh = ctx.v.middleCols(h * head_dim, head_dim);
        Mat scores = qh * kh.transpose() * scale;
        ctx.attn[h] = softmax_rows(scores);
        ctx.concat.middleCols(h * head_dim, head_dim).noalias() = ctx.attn[h] * vh;
    }
    return wo.forward(store, ctx.concat);
}

Mat MultiHeadAttention::backward(const ParamStore& store, const MHACtx& ctx, const Mat& dy,
                                 GradBuffer& grad) const {
    Mat dconcat = wo.backward(store, ctx.concat, dy, grad);
    Mat dq = Mat::Zero(ctx.x.rows(), dim);
    Mat dk = Mat::Zero(ctx.x.rows(), dim);
    Mat dv = Mat::Zero(ctx.x.rows(), dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    for (int h = 0; h < heads; ++h) {
        const auto kh = ctx.k.middleCols(h * head_dim, head_dim);
        const auto qh = ctx.q.middleCols(h * head_dim, head_dim);
        const auto vh = ctx.v.middleCols(h * head_dim, head_dim);
        const auto dch = dconcat.middleCols(h * head_dim, head_dim);
        Mat dattn = dch * vh.transpose();
        dv.middleCols(h * head_dim, head_dim).noalias() = ctx.attn[h].transpose() * dch;
        Mat dscores = softmax_rows_backward(ctx.attn[h], dattn) * scale;
        dq.middleCols(h * head_dim, head_dim).noalias() = dscores * kh;
        dk.middleCols(h * head_dim, head_dim).noalias() = dscores.transpose() * qh;
    }
    Mat dx = wq.backward(store, ctx.x, dq, grad);
    dx += wk.backward(store, ctx.x, dk, grad);
    dx += wv.backward(store, ctx.x, dv, grad);
    return dx;
}

void EncoderLayer::build(ParamStore& store, const std::string& name, int d, int heads, int ff,
                         double dropout) {
    dim = d;
    ff_dim = ff;
    dropout_p = dropout;
    ln1.build(store, name + ".ln1", d);
    mha.build(store, name + ".attn", d, heads);
    ln2.build(store, name + ".ln2", d);
    ff1.build(store, name + ".ff1", d, ff);
    ff2.build(store, name + ".ff2", ff, d);
}

void EncoderLayer::init(ParamStore& store, Rng& rng) const {
    ln1.init_default(store);
    mha.init(store, rng);
    ln2.init_default(store);
    ff1.init_xavier(store, rng);
    ff2.init_xavier(store, rng);
}

Mat EncoderLayer::forward(const ParamStore& store, const Mat& x, EncoderLayerCtx& ctx,
                          bool training, Rng* rng) const {
    ctx.x = x;
    ctx.u = ln1.forward(store, x, ctx.ln1c);
    Mat attn_out = mha.forward(store, ctx.u, ctx.mhac);
    ctx.x1 = x + dropout_forward(attn_out, dropout_p, training, rng, ctx.d1);
    ctx.v2 = ln2.forward(store, ctx.x1, ctx.ln2c);
    ctx.ff_pre = ff1.forward(store, ctx.v2);
    ctx.ff_act = gelu(ctx.ff_pre);
    Mat ff_out = ff2.forward(store, ctx.ff_act);
    return ctx.x1 + dropout_forward(ff_out, dropout_p, training, rng, ctx.d2);
}

Mat EncoderLayer::backward(const ParamStore& store, const EncoderLayerCtx& ctx, const Mat& dy,
                           GradBuffer& grad) const {
    Mat dx1 = dy;
    Mat dff_out = dropout_backward(ctx.d2, dy);
    Mat dff_act = ff2.backward(store, ctx.ff_act, dff_out, grad);
    Mat dff_pre = gelu_backward(ctx.ff_pre, dff_act);
    Mat dv2 = ff1.backward(store, ctx.v2, dff_pre, grad);
    dx1 += ln2.backward(store, ctx.ln2c, dv2, grad);

    Mat dx = dx1;
    Mat dattn = dropout_backward(ctx.d1, dx1);
    Mat du = mha.backward(store, ctx.mhac, dattn, grad);
    dx += ln1.backward(store, ctx.ln1c, du, grad);
    return dx;
}

PosEncKind pos_enc_kind_from_string(const std::string& s) {
    if (s == "sinusoidal")
        return PosEncKind::sinusoidal;
    if (s == "learned")
        return PosEncKind::learned;
    if (s == "none")
        return PosEncKind::none;
    throw_usage("unknown positional_encoding '" + s + "' (expected sinusoidal|learned|none)");
}

const char* to_string(PosEncKind k) {
    switch (k) {
    case PosEncKind::sinusoidal: return "sinusoidal";
    case PosEncKind::learned: return "learned";
    case PosEncKind::none: return "none";
    }
    return "unknown";
}

Mat PositionalEncoding::sinusoidal_table(int len, int dim) {
    Mat pe(len, dim);
    for (int t = 0; t < len; ++t)
        for (int j = 0; j < dim; ++j) {
            const double exponent = 2.0 * (j / 2) / dim;
            const double angle = t * std::pow(10000.0, -exponent);
            pe(t, j) = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return pe;
}

void PositionalEncoding::build(ParamStore& store, const std::string& name, PosEncKind kk, int d,
                               int len) {
    kind = kk;
    dim = d;
    max_len = len;
    if (kind == PosEncKind::learned)
        table = store.add(name + ".pos", len, d);
}

void PositionalEncoding::init(ParamStore& store, Rng& rng) const {
    if (kind == PosEncKind::learned)
        fill_normal(store, table, rng, 0.02);
}

Mat PositionalEncoding::forward(const ParamStore& store, const Mat& x) const {
    if (kind == PosEncKind::none)
        return x;
    if (x.rows() > max_len)
        throw_usage("sequence length " + std::to_string(x.rows()) +
                    " exceeds positional encoding capacity " + std::to_string(max_len));
    if (kind == PosEncKind::learned)
        return x + store.mat(table).topRows(x.rows());
    return x + sinusoidal_table(static_cast<int>(x.rows()), dim);
}

void PositionalEncoding::backward(const Mat& dy, GradBuffer& grad) const {
    if (kind == PosEncKind::learned)
        grad.mat(table).topRows(dy.rows()) += dy;
}

void TransformerEncoder::build(ParamStore& store, const std::string& name, const Options& o) {
    opt = o;
    if (o.num_layers < 1)
        throw_usage("encoder: num_layers must be >= 1");
    has_proj = o.input_dim != o.embed_dim;
    if (has_proj)
        proj.build(store, name + ".proj", o.input_dim, o.embed_dim);
    pos.build(store, name + ".posenc", o.pos_enc, o.embed_dim, o.max_len);
    layers.resize(o.num_layers);
    for (int i = 0; i < o.num_layers; ++i)
        layers[i].build(store, name + ".layer" + std::to_string(i), o.embed_dim, o.num_heads,
                        o.ff_dim, o.dropout);
}

void TransformerEncoder::init(ParamStore& store, Rng& rng) const {
    if (has_proj)
        proj.init_xavier(store, rng);
    pos.init(store, rng);
    for (const auto& l : layers)
        l.init(store, rng);
}

void TransformerEncoder::init_sublayers_zero(ParamStore& store) const {
    for (const auto& l : layers) {
        l.ln1.init_default(store);
        l.ln2.init_default(store);
        store.mat(l.mha.wq.w).setZero();
        store.mat(l.mha.wk.w).setZero();
        store.mat(l.mha.wv.w).setZero();
        store.mat(l.mha.wo.w).setZero();
        store.mat(l.ff1.w).setZero();
        store.mat(l.ff2.w).setZero();
    }
}

Mat TransformerEncoder::forward(const ParamStore& store, const Mat& x, EncoderCtx& ctx,
                                bool training, Rng* rng) const {
    if (x.cols() != opt.input_dim)
        throw_usage("encoder: input width " + std::to_string(x.cols()) + " != configured " +
                    std::to_string(opt.input_dim));
    if (!x.allFinite())
        throw_numeric("encoder: non-finite input features");
    ctx.input = x;
    ctx.embedded = pos.forward(store, has_proj ? proj.forward(store, x) : x);
    ctx.layers.resize(layers.size());
    Mat h = ctx.embedded;
    for (std::size_t i = 0; i < layers.size(); ++i)
        h = layers[i].forward(store, h, ctx.layers[i], training, rng);
    return h;
}

Mat TransformerEncoder::backward(const ParamStore& store, const EncoderCtx& ctx, const Mat& dy,
                                 GradBuffer& grad) const {
    Mat d = dy;
    for (std::size_t i = layers.size(); i-- > 0;)
        d = layers[i].backward(store, ctx.layers[i], d, grad);
    pos.backward(d, grad);
    if (has_proj)
        d = proj.backward(store, ctx.input, d, grad);
    return d;
}

} // namespace dvslr
