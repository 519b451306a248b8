/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>

#include "core/tensor.hpp"

namespace dvslr {

/// Fully connected layer, y = x W^T + b. Rows of x are independent samples.
struct Linear {
    int in = 0, out = 0;
    int w = -1, b = -1;

    void build(ParamStore& store, const std::string& name, int in_dim, int out_dim,
               bool bias = true);
    void init_he(ParamStore& store, Rng& rng) const;
    void init_xavier(ParamStore& store, Rng& rng) const;
    void init_lecun(ParamStore& store, Rng& rng) const;

    Mat forward(const ParamStore& store, const Mat& x) const;
    /// Accumulates dW/db and returns dx. `x` must be the forward input.
    Mat backward(const ParamStore& store, const Mat& x, const Mat& dy, GradBuffer& grad) const;
};

struct LayerNormCtx {
    Mat xhat;
    Vec inv_std;
};

/// Per-row layer normalization with learned scale/shift.
struct LayerNorm {
    int dim = 0;
    int gamma = -1, beta = -1;
    double eps = 1e-5;

    void build(ParamStore& store, const std::string& name, int dim);
    void init_default(ParamStore& store) const; // gamma = 1, beta = 0

    Mat forward(const ParamStore& store, const Mat& x, LayerNormCtx& ctx) const;
    Mat backward(const ParamStore& store, const LayerNormCtx& ctx, const Mat& dy,
                 GradBuffer& grad) const;
};

struct DropoutCtx {
    Mat mask;
    bool active = false;
};

Mat dropout_forward(const Mat& x, double p, bool training, Rng* rng, DropoutCtx& ctx);
Mat dropout_backward(const DropoutCtx& ctx, const Mat& dy);

Mat gelu(const Mat& x);
Mat gelu_backward(const Mat& x, const Mat& dy);

/// Row-wise softmax and its backward given the forward output.
Mat softmax_rows(const Mat& x);
Mat softmax_rows_backward(const Mat& y, const Mat& dy);

Vec softmax(const Vec& z);

/// Numerically stable cross-entropy from raw logits. When dlogits is given it
/// receives softmax(z) - onehot(label).
double cross_entropy(const Vec& logits, int label, Vec* dlogits = nullptr);

void fill_normal(ParamStore& store, int id, Rng& rng, double stddev);

} // namespace dvslr
