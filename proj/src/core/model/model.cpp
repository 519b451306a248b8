/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/model/model.hpp"

#include "core/model/checkpoint.hpp"

namespace dvslr {

void ClassifierHead::build(ParamStore& store, const std::string& name, int in_dim,
                           int num_classes, int hidden_dim) {
    if (num_classes < 1)
        throw_usage("classification head: number of classes must be positive");
    in = in_dim;
    classes = num_classes;
    hidden = hidden_dim;
    if (hidden > 0) {
        l1.build(store, name + ".fc1", in, hidden);
        l2.build(store, name + ".fc2", hidden, classes);
    } else {
        l1.build(store, name + ".fc", in, classes);
    }
}

void ClassifierHead::init(ParamStore& store, Rng& rng) const {
    l1.init_xavier(store, rng);
    if (hidden > 0)
        l2.init_xavier(store, rng);
}

Vec ClassifierHead::forward(const ParamStore& store, const Mat& seq, HeadCtx& ctx) const {
    if (seq.cols() != in)
        throw_usage("head: sequence width " + std::to_string(seq.cols()) + " != " +
                    std::to_string(in));
    ctx.t = static_cast<int>(seq.rows());
    ctx.pooled = seq.colwise().mean();
    if (hidden > 0) {
        ctx.hidden_pre = l1.forward(store, ctx.pooled);
        ctx.hidden_act = gelu(ctx.hidden_pre);
        return l2.forward(store, ctx.hidden_act).row(0).transpose();
    }
    return l1.forward(store, ctx.pooled).row(0).transpose();
}

Mat ClassifierHead::backward(const ParamStore& store, const HeadCtx& ctx, const Vec& dlogits,
                             GradBuffer& grad) const {
    Mat dl = dlogits.transpose(); // 1 x classes
    Mat dpooled;
    if (hidden > 0) {
        Mat dact = l2.backward(store, ctx.hidden_act, dl, grad);
        Mat dpre = gelu_backward(ctx.hidden_pre, dact);
        dpooled = l1.backward(store, ctx.pooled, dpre, grad);
    } else {
        dpooled = l1.backward(store, ctx.pooled, dl, grad);
    }
    // Mean pooling spreads the gradient uniformly over the T rows.
    Mat dseq(ctx.t, in);
    dseq.rowwise() = (dpooled.row(0) / ctx.t);
    return dseq;
}

SingleViewModel::SingleViewModel(const ModelConfig& cfg, int num_classes, int clip_len,
                                 std::string view, std::uint64_t init_seed)
    : cfg_(cfg), classes_(num_classes), clip_len_(clip_len), view_(std::move(view)) {
    cfg_.validate();
    if (classes_ < 1)
        throw_usage("model: number of classes must be positive");
    if (clip_len_ < 1)
        throw_usage("model: clip length must be positive");

    backbone_.build(store_, "backbone", cfg_.backbone);
    backbone_params_ = store_.size();

    TransformerEncoder::Options opt;
    opt.input_dim = cfg_.backbone.feature_dim;
    opt.embed_dim = cfg_.encoder.embed_dim;
    opt.num_layers = cfg_.encoder.num_layers;
    opt.num_heads = cfg_.encoder.num_heads;
    opt.ff_dim = cfg_.encoder.feedforward_dim;
    opt.dropout = cfg_.encoder.dropout;
    opt.pos_enc = pos_enc_kind_from_string(cfg_.encoder.positional_encoding);
    opt.max_len = clip_len_;
    encoder_.build(store_, "encoder", opt);

    head_.build(store_, "head", cfg_.encoder.embed_dim, classes_, cfg_.head.hidden_dim);

    Rng rng = make_rng(derive_seed(init_seed, "model-init"));
    backbone_.init(store_, rng);
    encoder_.init(store_, rng);
    head_.init(store_, rng);

    if (cfg_.backbone.pretrained)
        load_backbone_weights(store_, "backbone", cfg_.backbone.weights);
}

std::size_t SingleViewModel::trainable_offset() const {
    return cfg_.backbone.frozen ? backbone_params_ : 0;
}

Mat SingleViewModel::extract_spatial_features(const Volume& clip, BackboneCtx& ctx) const {
    return backbone_.forward(store_, clip, ctx);
}

Mat SingleViewModel::encode_sequence(const Mat& features, EncoderCtx& ctx, bool training,
                                     Rng* rng) const {
    return encoder_.forward(store_, features, ctx, training, rng);
}

Vec SingleViewModel::pool_and_classify(const Mat& seq, HeadCtx& ctx) const {
    return head_.forward(store_, seq, ctx);
}

Vec SingleViewModel::forward(const Volume& clip, SingleViewCtx& ctx, bool training,
                             Rng* rng) const {
    ctx.features = extract_spatial_features(clip, ctx.backbone);
    ctx.seq = encode_sequence(ctx.features, ctx.encoder, training, rng);
    return pool_and_classify(ctx.seq, ctx.head);
}

Vec SingleViewModel::predict_clip(const Volume& clip) const {
    SingleViewCtx ctx;
    return forward(clip, ctx, /*training=*/false, nullptr);
}

Vec SingleViewModel::predict(const std::map<std::string, Volume>& clips) const {
    return predict_clip(clips.at(view_));
}

double SingleViewModel::loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                                          GradBuffer& grad, Rng* dropout_rng) const {
    SingleViewCtx ctx;
    Vec logits = forward(clips.at(view_), ctx, /*training=*/true, dropout_rng);
    Vec dlogits;
    const double loss = cross_entropy(logits, label, &dlogits);
    Mat dseq = head_.backward(store_, ctx.head, dlogits, grad);
    Mat dfeat = encoder_.backward(store_, ctx.encoder, dseq, grad);
    if (!cfg_.backbone.frozen)
        backbone_.backward(store_, ctx.backbone, dfeat, grad);
    return loss;
}

void load_backbone_weights(ParamStore& store, const std::string& backbone_prefix,
                           const std::string& checkpoint_path) {
    if (checkpoint_path.empty())
        throw_usage("backbone is marked pretrained but no weights file is configured");
    Checkpoint ck = load_checkpoint(checkpoint_path);
    // Source checkpoints store single-view models; their backbone lives under
    // the plain "backbone" prefix.
    std::size_t copied = 0;
    for (const auto& e : store.entries()) {
        if (e.name.rfind(backbone_prefix + ".", 0) != 0)
            continue;
        const std::string src_name = "backbone" + e.name.substr(backbone_prefix.size());
        const int src = ck.params.find(src_name);
        if (src < 0)
            throw_data("pretrained weights: '" + src_name + "' not found in " + checkpoint_path);
        const auto& se = ck.params.entries()[src];
        if (se.rows != e.rows || se.cols != e.cols)
            throw_data("pretrained weights: shape mismatch for '" + src_name + "'");
        const int dst = store.find(e.name);
        store.mat(dst) = ck.params.mat(src);
        ++copied;
    }
    if (copied == 0)
        throw_data("pretrained weights: no backbone parameters found in " + checkpoint_path);
}

} // namespace dvslr
