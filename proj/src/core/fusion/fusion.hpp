/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "core/model/model.hpp"

namespace dvslr {

/// Linear map over the framewise concatenation of two feature sequences.
struct FusionProjection {
    Linear linear; // in = 2 * d_in, out = d_out

    void build(ParamStore& store, const std::string& name, int d_in, int d_out);
    void init(ParamStore& store, Rng& rng) const;
    int input_dim() const { return linear.in; }
    int output_dim() const { return linear.out; }
};

/// Row-wise [a | b]; both inputs need identical row counts.
Mat concat_features(const Mat& a, const Mat& b);

/// Fuse framewise spatial features of the two views (applied before the
/// sequence encoder): row t = proj(concat(p_front[t], p_left[t])).
Mat early_fuse(const ParamStore& store, const Mat& p_front, const Mat& p_left,
               const FusionProjection& proj);

/// Fuse the per-view encoder outputs (no further encoder follows; the fused
/// sequence is pooled directly).
Mat late_fuse(const ParamStore& store, const Mat& t_front, const Mat& t_left,
              const FusionProjection& proj);

/// Prediction-phase fusion of two independently trained view models:
/// softmax over the summed raw logits.
ScoreVector plus_fuse(const ScoreVector& front, const ScoreVector& left);

/// Alternative reading of the prediction-phase rule: mean of the per-view
/// softmax distributions. Agrees with plus_fuse on argmax whenever the views
/// agree; selectable via FusionConfig::plus_rule.
ScoreVector plus_fuse_avg_probs(const ScoreVector& front, const ScoreVector& left);

ScoreVector plus_fuse_with_rule(const ScoreVector& front, const ScoreVector& left,
                                const std::string& rule);

struct EarlyFusionCtx {
    BackboneCtx bb_front, bb_left;
    Mat p_front, p_left;
    Mat concat; // T x 2*d_s
    Mat fused;  // T x d_early
    EncoderCtx encoder;
    HeadCtx head;
};

/// Early-fusion bundle: per-view backbones, fusion projection, one shared
/// post-fusion encoder, one head.
class EarlyFusionModel : public Recognizer {
public:
    EarlyFusionModel(const ModelConfig& cfg, int num_classes, int clip_len,
                     std::uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }
    int clip_len() const { return clip_len_; }
    int num_classes() const override { return classes_; }
    ParamStore& params() override { return store_; }
    const ParamStore& params() const override { return store_; }
    std::vector<std::string> required_views() const override { return {"front", "left"}; }
    std::size_t trainable_offset() const override;

    Vec forward(const Volume& clip_front, const Volume& clip_left, EarlyFusionCtx& ctx,
                bool training = false, Rng* rng = nullptr) const;
    Vec predict(const std::map<std::string, Volume>& clips) const override;
    double loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                             GradBuffer& grad, Rng* dropout_rng) const override;

    const Backbone& front_backbone() const { return bb_front_; }
    const Backbone& left_backbone() const { return bb_left_ ? *bb_left_ : bb_front_; }
    const FusionProjection& projection() const { return proj_; }

private:
    ModelConfig cfg_;
    int classes_ = 0, clip_len_ = 0;
    ParamStore store_;
    Backbone bb_front_;
    std::optional<Backbone> bb_left_; // absent when view weights are shared
    std::size_t backbone_params_ = 0;
    FusionProjection proj_;
    TransformerEncoder encoder_;
    ClassifierHead head_;
};

struct LateFusionCtx {
    BackboneCtx bb_front, bb_left;
    Mat p_front, p_left;
    EncoderCtx enc_front, enc_left;
    Mat t_front, t_left;
    Mat concat; // T x 2*d
    Mat fused;  // T x d_late
    HeadCtx head;
};

/// Late-fusion bundle: per-view backbones and encoders, fusion projection
/// over encoder outputs, then pooling + head (no post-fusion encoder).
class LateFusionModel : public Recognizer {
public:
    LateFusionModel(const ModelConfig& cfg, int num_classes, int clip_len,
                    std::uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }
    int clip_len() const { return clip_len_; }
    int num_classes() const override { return classes_; }
    ParamStore& params() override { return store_; }
    const ParamStore& params() const override { return store_; }
    std::vector<std::string> required_views() const override { return {"front", "left"}; }
    std::size_t trainable_offset() const override;

    Vec forward(const Volume& clip_front, const Volume& clip_left, LateFusionCtx& ctx,
                bool training = false, Rng* rng = nullptr) const;
    Vec predict(const std::map<std::string, Volume>& clips) const override;
    double loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                             GradBuffer& grad, Rng* dropout_rng) const override;

    const FusionProjection& projection() const { return proj_; }

private:
    ModelConfig cfg_;
    int classes_ = 0, clip_len_ = 0;
    ParamStore store_;
    Backbone bb_front_;
    std::optional<Backbone> bb_left_;
    std::size_t backbone_params_ = 0;
    TransformerEncoder enc_front_, enc_left_;
    FusionProjection proj_;
    ClassifierHead head_;
};

/// Prediction-phase ensemble of two complete single-view models. No fusion
/// projection and no shared training state: gradients never cross views.
struct PlusEnsemble {
    const SingleViewModel* front = nullptr;
    const SingleViewModel* left = nullptr;
    std::string rule = "sum_logits";

    void validate() const;
    ScoreVector predict(const Volume& clip_front, const Volume& clip_left) const;
};

} // namespace dvslr
