/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace dvslr {

/// 2-D convolution via im2col + GEMM. Samples of the batch are independent;
/// backward recomputes the column matrix instead of caching it.
struct Conv2d {
    int in_ch = 0, out_ch = 0, k = 1, stride = 1, pad = 0;
    int w = -1, b = -1; // w: out_ch x (in_ch*k*k)

    void build(ParamStore& store, const std::string& name, int in_ch, int out_ch, int k,
               int stride, int pad);
    void init_he(ParamStore& store, Rng& rng) const;

    int out_dim(int in_dim) const { return (in_dim + 2 * pad - k) / stride + 1; }

    Volume forward(const ParamStore& store, const Volume& x) const;
    /// Accumulates dW/db; returns dx unless need_dx is false (first layer).
    Volume backward(const ParamStore& store, const Volume& x, const Volume& dy, GradBuffer& grad,
                    bool need_dx = true) const;
};

struct MaxPoolCtx {
    std::vector<int> argmax; // linear index into the input sample plane
};

struct MaxPool2d {
    int k = 3, stride = 2, pad = 1;

    int out_dim(int in_dim) const { return (in_dim + 2 * pad - k) / stride + 1; }
    Volume forward(const Volume& x, MaxPoolCtx& ctx) const;
    Volume backward(const Volume& x, const MaxPoolCtx& ctx, const Volume& dy) const;
};

Volume relu(const Volume& x);
Volume relu_backward(const Volume& x, const Volume& dy);

/// [N,C,H,W] -> [N,C] mean over the spatial plane.
Mat global_avg_pool(const Volume& x);
Volume global_avg_pool_backward(const Volume& x_shape, const Mat& dy);

} // namespace dvslr
