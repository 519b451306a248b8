/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/fusion/fusion.hpp"

namespace dvslr {

void FusionProjection::build(ParamStore& store, const std::string& name, int d_in, int d_out) {
    linear.build(store, name, 2 * d_in, d_out);
}

void FusionProjection::init(ParamStore& store, Rng& rng) const {
    // Fan-in-scaled weights, zero bias.
    linear.init_lecun(store, rng);
}

Mat concat_features(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows())
        throw_usage("fusion: sequences have different lengths (" + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.rows()) + ")");
    Mat out(a.rows(), a.cols() + b.cols());
    out.leftCols(a.cols()) = a;
    out.rightCols(b.cols()) = b;
    return out;
}

namespace {

Mat fuse_project(const ParamStore& store, const Mat& a, const Mat& b,
                 const FusionProjection& proj) {
    if (a.cols() != b.cols() || 2 * a.cols() != proj.input_dim())
        throw_usage("fusion: feature widths " + std::to_string(a.cols()) + "/" +
                    std::to_string(b.cols()) + " do not match the projection input " +
                    std::to_string(proj.input_dim()));
    return proj.linear.forward(store, concat_features(a, b));
}

} // namespace

Mat early_fuse(const ParamStore& store, const Mat& p_front, const Mat& p_left,
               const FusionProjection& proj) {
    return fuse_project(store, p_front, p_left, proj);
}

Mat late_fuse(const ParamStore& store, const Mat& t_front, const Mat& t_left,
              const FusionProjection& proj) {
    return fuse_project(store, t_front, t_left, proj);
}

namespace {

void check_plus_inputs(const ScoreVector& front, const ScoreVector& left) {
    if (front.scores.size() != left.scores.size())
        throw_usage("plus_fuse: score lengths differ (" + std::to_string(front.scores.size()) +
                    " vs " + std::to_string(left.scores.size()) + ")");
    if (front.scores.size() == 0)
        throw_usage("plus_fuse: empty score vectors");
    if (front.normalized || left.normalized)
        throw_usage("plus_fuse: expects raw logits, got normalized scores");
    if (!front.scores.allFinite() || !left.scores.allFinite())
        throw_numeric("plus_fuse: non-finite scores");
}

} // namespace

ScoreVector plus_fuse(const ScoreVector& front, const ScoreVector& left) {
    check_plus_inputs(front, left);
    ScoreVector out;
    out.scores = softmax(front.scores + left.scores);
    out.normalized = true;
    return out;
}

ScoreVector plus_fuse_avg_probs(const ScoreVector& front, const ScoreVector& left) {
    check_plus_inputs(front, left);
    ScoreVector out;
    out.scores = 0.5 * (softmax(front.scores) + softmax(left.scores));
    out.normalized = true;
    return out;
}

ScoreVector plus_fuse_with_rule(const ScoreVector& front, const ScoreVector& left,
                                const std::string& rule) {
    if (rule == "sum_logits")
        return plus_fuse(front, left);
    if (rule == "avg_probs")
        return plus_fuse_avg_probs(front, left);
    throw_usage("unknown plus fusion rule '" + rule + "'");
}

EarlyFusionModel::EarlyFusionModel(const ModelConfig& cfg, int num_classes, int clip_len,
                                   std::uint64_t init_seed)
    : cfg_(cfg), classes_(num_classes), clip_len_(clip_len) {
    cfg_.validate();
    if (classes_ < 1)
        throw_usage("model: number of classes must be positive");

    bb_front_.build(store_, "front.backbone", cfg_.backbone);
    if (!cfg_.fusion.share_view_weights)
        bb_left_.emplace(), bb_left_->build(store_, "left.backbone", cfg_.backbone);
    backbone_params_ = store_.size();

    proj_.build(store_, "fusion.proj", cfg_.backbone.feature_dim, cfg_.fusion.projection_dim);

    TransformerEncoder::Options opt;
    opt.input_dim = cfg_.fusion.projection_dim;
    opt.embed_dim = cfg_.encoder.embed_dim;
    opt.num_layers = cfg_.encoder.num_layers;
    opt.num_heads = cfg_.encoder.num_heads;
    opt.ff_dim = cfg_.encoder.feedforward_dim;
    opt.dropout = cfg_.encoder.dropout;
    opt.pos_enc = pos_enc_kind_from_string(cfg_.encoder.positional_encoding);
    opt.max_len = clip_len_;
    encoder_.build(store_, "encoder", opt);

    head_.build(store_, "head", cfg_.encoder.embed_dim, classes_, cfg_.head.hidden_dim);

    Rng rng = make_rng(derive_seed(init_seed, "early-init"));
    bb_front_.init(store_, rng);
    if (bb_left_)
        bb_left_->init(store_, rng);
    proj_.init(store_, rng);
    encoder_.init(store_, rng);
    head_.init(store_, rng);

    if (cfg_.backbone.pretrained) {
        load_backbone_weights(store_, "front.backbone", cfg_.backbone.weights);
        if (bb_left_)
            load_backbone_weights(store_, "left.backbone", cfg_.backbone.weights);
    }
}

std::size_t EarlyFusionModel::trainable_offset() const {
    return cfg_.backbone.frozen ? backbone_params_ : 0;
}

Vec EarlyFusionModel::forward(const Volume& clip_front, const Volume& clip_left,
                              EarlyFusionCtx& ctx, bool training, Rng* rng) const {
    ctx.p_front = bb_front_.forward(store_, clip_front, ctx.bb_front);
    ctx.p_left = left_backbone().forward(store_, clip_left, ctx.bb_left);
    ctx.concat = concat_features(ctx.p_front, ctx.p_left);
    ctx.fused = proj_.linear.forward(store_, ctx.concat);
    Mat seq = encoder_.forward(store_, ctx.fused, ctx.encoder, training, rng);
    return head_.forward(store_, seq, ctx.head);
}

Vec EarlyFusionModel::predict(const std::map<std::string, Volume>& clips) const {
    EarlyFusionCtx ctx;
    return forward(clips.at("front"), clips.at("left"), ctx, /*training=*/false, nullptr);
}

double EarlyFusionModel::loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                                           GradBuffer& grad, Rng* dropout_rng) const {
    EarlyFusionCtx ctx;
    Vec logits = forward(clips.at("front"), clips.at("left"), ctx, /*training=*/true, dropout_rng);
    Vec dlogits;
    const double loss = cross_entropy(logits, label, &dlogits);
    Mat dseq = head_.backward(store_, ctx.head, dlogits, grad);
    Mat dfused = encoder_.backward(store_, ctx.encoder, dseq, grad);
    Mat dconcat = proj_.linear.backward(store_, ctx.concat, dfused, grad);
    if (!cfg_.backbone.frozen) {
        const int ds = cfg_.backbone.feature_dim;
        bb_front_.backward(store_, ctx.bb_front, dconcat.leftCols(ds), grad);
        left_backbone().backward(store_, ctx.bb_left, dconcat.rightCols(ds), grad);
    }
    return loss;
}

LateFusionModel::LateFusionModel(const ModelConfig& cfg, int num_classes, int clip_len,
                                 std::uint64_t init_seed)
    : cfg_(cfg), classes_(num_classes), clip_len_(clip_len) {
    cfg_.validate();
    if (classes_ < 1)
        throw_usage("model: number of classes must be positive");

    bb_front_.build(store_, "front.backbone", cfg_.backbone);
    if (!cfg_.fusion.share_view_weights)
        bb_left_.emplace(), bb_left_->build(store_, "left.backbone", cfg_.backbone);
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
    enc_front_.build(store_, "front.encoder", opt);
    enc_left_.build(store_, "left.encoder", opt);

    proj_.build(store_, "fusion.proj", cfg_.encoder.embed_dim, cfg_.fusion.projection_dim);
    head_.build(store_, "head", cfg_.fusion.projection_dim, classes_, cfg_.head.hidden_dim);

    Rng rng = make_rng(derive_seed(init_seed, "late-init"));
    bb_front_.init(store_, rng);
    if (bb_left_)
        bb_left_->init(store_, rng);
    enc_front_.init(store_, rng);
    enc_left_.init(store_, rng);
    proj_.init(store_, rng);
    head_.init(store_, rng);

    if (cfg_.backbone.pretrained) {
        load_backbone_weights(store_, "front.backbone", cfg_.backbone.weights);
        if (bb_left_)
            load_backbone_weights(store_, "left.backbone", cfg_.backbone.weights);
    }
}

std::size_t LateFusionModel::trainable_offset() const {
    return cfg_.backbone.frozen ? backbone_params_ : 0;
}

Vec LateFusionModel::forward(const Volume& clip_front, const Volume& clip_left, LateFusionCtx& ctx,
                             bool training, Rng* rng) const {
    ctx.p_front = bb_front_.forward(store_, clip_front, ctx.bb_front);
    ctx.p_left = (bb_left_ ? *bb_left_ : bb_front_).forward(store_, clip_left, ctx.bb_left);
    ctx.t_front = enc_front_.forward(store_, ctx.p_front, ctx.enc_front, training, rng);
    ctx.t_left = enc_left_.forward(store_, ctx.p_left, ctx.enc_left, training, rng);
    ctx.concat = concat_features(ctx.t_front, ctx.t_left);
    ctx.fused = proj_.linear.forward(store_, ctx.concat);
    return head_.forward(store_, ctx.fused, ctx.head);
}

Vec LateFusionModel::predict(const std::map<std::string, Volume>& clips) const {
    LateFusionCtx ctx;
    return forward(clips.at("front"), clips.at("left"), ctx, /*training=*/false, nullptr);
}

double LateFusionModel::loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                                          GradBuffer& grad, Rng* dropout_rng) const {
    LateFusionCtx ctx;
    Vec logits = forward(clips.at("front"), clips.at("left"), ctx, /*training=*/true, dropout_rng);
    Vec dlogits;
    const double loss = cross_entropy(logits, label, &dlogits);
    Mat dfused = head_.backward(store_, ctx.head, dlogits, grad);
    Mat dconcat = proj_.linear.backward(store_, ctx.concat, dfused, grad);
    const int d = cfg_.encoder.embed_dim;
    Mat dp_front = enc_front_.backward(store_, ctx.enc_front, dconcat.leftCols(d), grad);
    Mat dp_left = enc_left_.backward(store_, ctx.enc_left, dconcat.rightCols(d), grad);
    if (!cfg_.backbone.frozen) {
        bb_front_.backward(store_, ctx.bb_front, dp_front, grad);
        (bb_left_ ? *bb_left_ : bb_front_).backward(store_, ctx.bb_left, dp_left, grad);
    }
    return loss;
}

void PlusEnsemble::validate() const {
    if (!front || !left)
        throw_usage("plus ensemble: both view models are required");
    if (front->num_classes() != left->num_classes())
        throw_usage("plus ensemble: class counts differ (" +
                    std::to_string(front->num_classes()) + " vs " +
                    std::to_string(left->num_classes()) + ")");
    if (front->view() == left->view())
        throw_usage("plus ensemble: the two models must cover different views");
    if (rule != "sum_logits" && rule != "avg_probs")
        throw_usage("plus ensemble: unknown rule '" + rule + "'");
}

ScoreVector PlusEnsemble::predict(const Volume& clip_front, const Volume& clip_left) const {
    validate();
    ScoreVector f{front->predict_clip(clip_front), false};
    ScoreVector l{left->predict_clip(clip_left), false};
    return plus_fuse_with_rule(f, l, rule);
}

} // namespace dvslr
