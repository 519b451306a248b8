/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/nn/conv.hpp"

#include <cmath>
#include <limits>

namespace dvslr {

namespace {

/// Gather convolution patches: cols is (in_ch*k*k) x (ho*wo).
void im2col(const double* src, int c, int h, int w, int k, int stride, int pad, int ho, int wo,
            Mat& cols) {
    cols.resize(c * k * k, ho * wo);
    for (int ch = 0; ch < c; ++ch) {
        const double* plane = src + static_cast<std::size_t>(ch) * h * w;
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const int row = (ch * k + ky) * k + kx;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    double* dst = cols.data() + static_cast<std::size_t>(row) * (ho * wo) +
                                  static_cast<std::size_t>(oy) * wo;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst, dst + wo, 0.0);
                        continue;
                    }
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        dst[ox] = (ix < 0 || ix >= w) ? 0.0 : plane[iy * w + ix];
                    }
                }
            }
    }
}

/// Scatter-add the column gradient back onto the input sample.
void col2im(const Mat& dcols, int c, int h, int w, int k, int stride, int pad, int ho, int wo,
            double* dst) {
    for (int ch = 0; ch < c; ++ch) {
        double* plane = dst + static_cast<std::size_t>(ch) * h * w;
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const int row = (ch * k + ky) * k + kx;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h)
                        continue;
                    const double* src = dcols.data() + static_cast<std::size_t>(row) * (ho * wo) +
                                        static_cast<std::size_t>(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < w)
                            plane[iy * w + ix] += src[ox];
                    }
                }
            }
    }
}

} // namespace

void Conv2d::build(ParamStore& store, const std::string& name, int in_c, int out_c, int kk,
                   int s, int p) {
    in_ch = in_c;
    out_ch = out_c;
    k = kk;
    stride = s;
    pad = p;
    w = store.add(name + ".w", out_ch, in_ch * k * k);
    b = store.add(name + ".b", 1, out_ch);
}

void Conv2d::init_he(ParamStore& store, Rng& rng) const {
    auto m = store.mat(w);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in_ch * k * k)));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            m(r, c) = dist(rng);
    store.mat(b).setZero();
}

Volume Conv2d::forward(const ParamStore& store, const Volume& x) const {
    if (x.c != in_ch)
        throw_usage("Conv2d: expected " + std::to_string(in_ch) + " input channels, got " +
                    std::to_string(x.c));
    const int ho = out_dim(x.h), wo = out_dim(x.w);
    if (ho < 1 || wo < 1)
        throw_usage("Conv2d: input spatial size too small");
    Volume y(x.n, out_ch, ho, wo);
    const auto wm = store.mat(w);
    const auto bm = store.mat(b);
    Mat cols;
    for (int n = 0; n < x.n; ++n) {
        im2col(x.sample(n), x.c, x.h, x.w, k, stride, pad, ho, wo, cols);
        MatMap out(y.sample(n), out_ch, ho * wo);
        out.noalias() = wm * cols;
        out.colwise() += bm.row(0).transpose();
    }
    return y;
}

Volume Conv2d::backward(const ParamStore& store, const Volume& x, const Volume& dy,
                        GradBuffer& grad, bool need_dx) const {
    const int ho = dy.h, wo = dy.w;
    Volume dx;
    if (need_dx)
        dx = Volume(x.n, x.c, x.h, x.w);
    auto dW = grad.mat(w);
    auto db = grad.mat(b);
    const auto wm = store.mat(w);
    Mat cols, dcols;
    for (int n = 0; n < x.n; ++n) {
        ConstMatMap dout(dy.sample(n), out_ch, ho * wo);
        im2col(x.sample(n), x.c, x.h, x.w, k, stride, pad, ho, wo, cols);
        dW.noalias() += dout * cols.transpose();
        db.row(0) += dout.rowwise().sum().transpose();
        if (need_dx) {
            dcols.noalias() = wm.transpose() * dout;
            col2im(dcols, x.c, x.h, x.w, k, stride, pad, ho, wo, dx.sample(n));
        }
    }
    return dx;
}

Volume MaxPool2d::forward(const Volume& x, MaxPoolCtx& ctx) const {
    const int ho = out_dim(x.h), wo = out_dim(x.w);
    Volume y(x.n, x.c, ho, wo);
    ctx.argmax.assign(y.size(), -1);
    std::size_t oi = 0;
    for (int n = 0; n < x.n; ++n)
        for (int ch = 0; ch < x.c; ++ch) {
            const double* plane = x.sample(n) + static_cast<std::size_t>(ch) * x.h * x.w;
            double* out = y.sample(n) + static_cast<std::size_t>(ch) * ho * wo;
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox, ++oi) {
                    double best = -std::numeric_limits<double>::infinity();
                    int best_idx = -1;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= x.h)
                            continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= x.w)
                                continue;
                            const double v = plane[iy * x.w + ix];
                            if (v > best) {
                                best = v;
                                best_idx = iy * x.w + ix;
                            }
                        }
                    }
                    out[oy * wo + ox] = best;
                    ctx.argmax[oi] = best_idx;
                }
        }
    return y;
}

Volume MaxPool2d::backward(const Volume& x, const MaxPoolCtx& ctx, const Volume& dy) const {
    Volume dx(x.n, x.c, x.h, x.w);
    std::size_t oi = 0;
    for (int n = 0; n < dy.n; ++n)
        for (int ch = 0; ch < dy.c; ++ch) {
            double* plane = dx.sample(n) + static_cast<std::size_t>(ch) * x.h * x.w;
            const double* grad = dy.sample(n) + static_cast<std::size_t>(ch) * dy.h * dy.w;
            for (int i = 0; i < dy.h * dy.w; ++i, ++oi)
                if (ctx.argmax[oi] >= 0)
                    plane[ctx.argmax[oi]] += grad[i];
        }
    return dx;
}

Volume relu(const Volume& x) {
    Volume y = x;
    for (double& v : y.data)
        v = v > 0.0 ? v : 0.0;
    return y;
}

Volume relu_backward(const Volume& x, const Volume& dy) {
    Volume dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
        if (x.data[i] <= 0.0)
            dx.data[i] = 0.0;
    return dx;
}

Mat global_avg_pool(const Volume& x) {
    Mat y(x.n, x.c);
    const double inv = 1.0 / (x.h * x.w);
    for (int n = 0; n < x.n; ++n)
        for (int ch = 0; ch < x.c; ++ch) {
            const double* plane = x.sample(n) + static_cast<std::size_t>(ch) * x.h * x.w;
            double s = 0.0;
            for (int i = 0; i < x.h * x.w; ++i)
                s += plane[i];
            y(n, ch) = s * inv;
        }
    return y;
}

Volume global_avg_pool_backward(const Volume& x_shape, const Mat& dy) {
    Volume dx(x_shape.n, x_shape.c, x_shape.h, x_shape.w);
    const double inv = 1.0 / (x_shape.h * x_shape.w);
    for (int n = 0; n < dx.n; ++n)
        for (int ch = 0; ch < dx.c; ++ch) {
            double* plane = dx.sample(n) + static_cast<std::size_t>(ch) * dx.h * dx.w;
            const double g = dy(n, ch) * inv;
            for (int i = 0; i < dx.h * dx.w; ++i)
                plane[i] = g;
        }
    return dx;
}

} // namespace dvslr
