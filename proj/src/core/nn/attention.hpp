/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>
#include <vector>

#include "core/nn/layers.hpp"

namespace dvslr {

struct MHACtx {
    Mat x;
    Mat q, k, v;
    std::vector<Mat> attn; // per-head T x T softmax maps
    Mat concat;
};

struct MultiHeadAttention {
    int dim = 0, heads = 0, head_dim = 0;
    Linear wq, wk, wv, wo;

    void build(ParamStore& store, const std::string& name, int dim, int heads);
    void init(ParamStore& store, Rng& rng) const;

    Mat forward(const ParamStore& store, const Mat& x, MHACtx& ctx) const;
    Mat backward(const ParamStore& store, const MHACtx& ctx, const Mat& dy, GradBuffer& grad) const;
};

struct EncoderLayerCtx {
    Mat x;
    LayerNormCtx ln1c;
    Mat u;
    MHACtx mhac;
    DropoutCtx d1;
    Mat x1;
    LayerNormCtx ln2c;
    Mat v2;
    Mat ff_pre;
    Mat ff_act;
    DropoutCtx d2;
};

/// Pre-norm transformer encoder layer:
///   x1 = x + Drop(MHA(LN1(x)));  y = x1 + Drop(FF(LN2(x1)))
/// With zero-initialized sublayer weights this is exactly the identity, which
/// the tests rely on.
struct EncoderLayer {
    int dim = 0, ff_dim = 0;
    double dropout_p = 0.0;
    LayerNorm ln1, ln2;
    MultiHeadAttention mha;
    Linear ff1, ff2;

    void build(ParamStore& store, const std::string& name, int dim, int heads, int ff_dim,
               double dropout);
    void init(ParamStore& store, Rng& rng) const;

    Mat forward(const ParamStore& store, const Mat& x, EncoderLayerCtx& ctx, bool training,
                Rng* rng) const;
    Mat backward(const ParamStore& store, const EncoderLayerCtx& ctx, const Mat& dy,
                 GradBuffer& grad) const;
};

enum class PosEncKind { sinusoidal, learned, none };

PosEncKind pos_enc_kind_from_string(const std::string& s);
const char* to_string(PosEncKind k);

struct PositionalEncoding {
    PosEncKind kind = PosEncKind::sinusoidal;
    int dim = 0, max_len = 0;
    int table = -1; // learned variant

    void build(ParamStore& store, const std::string& name, PosEncKind kind, int dim, int max_len);
    void init(ParamStore& store, Rng& rng) const;

    Mat forward(const ParamStore& store, const Mat& x) const;
    void backward(const Mat& dy, GradBuffer& grad) const;

    static Mat sinusoidal_table(int len, int dim);
};

struct EncoderCtx {
    Mat input;
    Mat embedded; // after projection + positional encoding
    std::vector<EncoderLayerCtx> layers;
};

/// Stack of encoder layers over a T x d sequence, with an input projection
/// when the feature width differs from the embedding width.
struct TransformerEncoder {
    struct Options {
        int input_dim = 512;
        int embed_dim = 512;
        int num_layers = 4;
        int num_heads = 8;
        int ff_dim = 2048;
        double dropout = 0.1;
        PosEncKind pos_enc = PosEncKind::sinusoidal;
        int max_len = 512;
    };

    Options opt;
    bool has_proj = false;
    Linear proj;
    PositionalEncoding pos;
    std::vector<EncoderLayer> layers;

    void build(ParamStore& store, const std::string& name, const Options& options);
    void init(ParamStore& store, Rng& rng) const;
    /// Zero attention/feed-forward weights: the stack becomes the identity on
    /// the positionally-encoded input.
    void init_sublayers_zero(ParamStore& store) const;

    Mat forward(const ParamStore& store, const Mat& x, EncoderCtx& ctx, bool training = false,
                Rng* rng = nullptr) const;
    /// Returns the gradient w.r.t. the encoder input.
    Mat backward(const ParamStore& store, const EncoderCtx& ctx, const Mat& dy,
                 GradBuffer& grad) const;
};

} // namespace dvslr
