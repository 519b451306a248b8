/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core/model/backbone.hpp"
#include "core/model/config.hpp"
#include "core/nn/attention.hpp"

namespace dvslr {

/// Per-class scores for one sample; raw logits unless `normalized` is set,
/// in which case entries are a probability distribution.
struct ScoreVector {
    Vec scores;
    bool normalized = false;
};

struct HeadCtx {
    int t = 0;
    Mat pooled; // 1 x d
    Mat hidden_pre;
    Mat hidden_act;
};

/// Temporal mean pooling followed by the classification head.
struct ClassifierHead {
    int in = 0, classes = 0, hidden = 0;
    Linear l1, l2; // l2 used only when hidden > 0

    void build(ParamStore& store, const std::string& name, int in_dim, int num_classes,
               int hidden_dim);
    void init(ParamStore& store, Rng& rng) const;

    Vec forward(const ParamStore& store, const Mat& seq, HeadCtx& ctx) const;
    Mat backward(const ParamStore& store, const HeadCtx& ctx, const Vec& dlogits,
                 GradBuffer& grad) const;
};

/// Training/evaluation facade shared by single-view and fused models.
class Recognizer {
public:
    virtual ~Recognizer() = default;
    virtual ParamStore& params() = 0;
    virtual const ParamStore& params() const = 0;
    virtual std::vector<std::string> required_views() const = 0;
    virtual int num_classes() const = 0;
    /// First trainable offset into the flat parameter vector; parameters
    /// before it (frozen backbones) are excluded from optimizer updates.
    virtual std::size_t trainable_offset() const = 0;
    virtual Vec predict(const std::map<std::string, Volume>& clips) const = 0;
    virtual double loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                                     GradBuffer& grad, Rng* dropout_rng) const = 0;
};

struct SingleViewCtx {
    BackboneCtx backbone;
    EncoderCtx encoder;
    Mat features; // T x d_s
    Mat seq;      // T x d
    HeadCtx head;
};

/// Spatial backbone -> transformer encoder -> mean pool -> head, for one view.
class SingleViewModel : public Recognizer {
public:
    SingleViewModel(const ModelConfig& cfg, int num_classes, int clip_len, std::string view,
                    std::uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }
    const std::string& view() const { return view_; }
    int clip_len() const { return clip_len_; }
    int num_classes() const override { return classes_; }

    ParamStore& params() override { return store_; }
    const ParamStore& params() const override { return store_; }
    std::vector<std::string> required_views() const override { return {view_}; }
    std::size_t trainable_offset() const override;

    Mat extract_spatial_features(const Volume& clip, BackboneCtx& ctx) const;
    Mat encode_sequence(const Mat& features, EncoderCtx& ctx, bool training = false,
                        Rng* rng = nullptr) const;
    Vec pool_and_classify(const Mat& seq, HeadCtx& ctx) const;

    Vec forward(const Volume& clip, SingleViewCtx& ctx, bool training = false,
                Rng* rng = nullptr) const;
    Vec predict(const std::map<std::string, Volume>& clips) const override;
    Vec predict_clip(const Volume& clip) const;

    double loss_and_backward(const std::map<std::string, Volume>& clips, int label,
                             GradBuffer& grad, Rng* dropout_rng) const override;

    const Backbone& backbone() const { return backbone_; }
    const TransformerEncoder& encoder() const { return encoder_; }

private:
    ModelConfig cfg_;
    int classes_ = 0;
    int clip_len_ = 0;
    std::string view_;
    ParamStore store_;
    Backbone backbone_;
    std::size_t backbone_params_ = 0;
    TransformerEncoder encoder_;
    ClassifierHead head_;
};

/// Load pretrained backbone weights from a checkpoint file into `store`,
/// matching parameters by name suffix under the backbone prefix.
void load_backbone_weights(ParamStore& store, const std::string& backbone_prefix,
                           const std::string& checkpoint_path);

} // namespace dvslr
