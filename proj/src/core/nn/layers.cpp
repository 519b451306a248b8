/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/nn/layers.hpp"

#include <cmath>

namespace dvslr {

void fill_normal(ParamStore& store, int id, Rng& rng, double stddev) {
    auto m = store.mat(id);
    std::normal_distribution<double> dist(0.0, stddev);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            m(r, c) = dist(rng);
}

void Linear::build(ParamStore& store, const std::string& name, int in_dim, int out_dim, bool bias) {
    if (in_dim < 1 || out_dim < 1)
        throw_usage("Linear '" + name + "': dimensions must be positive");
    in = in_dim;
    out = out_dim;
    w = store.add(name + ".w", out, in);
    b = bias ? store.add(name + ".b", 1, out) : -1;
}

void Linear::init_he(ParamStore& store, Rng& rng) const {
    fill_normal(store, w, rng, std::sqrt(2.0 / in));
}

void Linear::init_xavier(ParamStore& store, Rng& rng) const {
    fill_normal(store, w, rng, std::sqrt(2.0 / (in + out)));
}

void Linear::init_lecun(ParamStore& store, Rng& rng) const {
    fill_normal(store, w, rng, std::sqrt(1.0 / in));
}

Mat Linear::forward(const ParamStore& store, const Mat& x) const {
    if (x.cols() != in)
        throw_usage("Linear: input width " + std::to_string(x.cols()) + " != " + std::to_string(in));
    Mat y = x * store.mat(w).transpose();
    if (b >= 0)
        y.rowwise() += store.mat(b).row(0);
    return y;
}

Mat Linear::backward(const ParamStore& store, const Mat& x, const Mat& dy, GradBuffer& grad) const {
    grad.mat(w).noalias() += dy.transpose() * x;
    if (b >= 0)
        grad.mat(b).row(0) += dy.colwise().sum();
    return dy * store.mat(w);
}

void LayerNorm::build(ParamStore& store, const std::string& name, int d) {
    dim = d;
    gamma = store.add(name + ".gamma", 1, d);
    beta = store.add(name + ".beta", 1, d);
}

void LayerNorm::init_default(ParamStore& store) const {
    store.mat(gamma).setOnes();
    store.mat(beta).setZero();
}

Mat LayerNorm::forward(const ParamStore& store, const Mat& x, LayerNormCtx& ctx) const {
    const auto g = store.mat(gamma).row(0);
    const auto be = store.mat(beta).row(0);
    ctx.xhat.resize(x.rows(), x.cols());
    ctx.inv_std.resize(x.rows());
    Mat y(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().mean();
        const double inv = 1.0 / std::sqrt(var + eps);
        ctx.inv_std(r) = inv;
        ctx.xhat.row(r) = (x.row(r).array() - mean) * inv;
        y.row(r) = ctx.xhat.row(r).cwiseProduct(g) + be;
    }
    return y;
}

Mat LayerNorm::backward(const ParamStore& store, const LayerNormCtx& ctx, const Mat& dy,
                        GradBuffer& grad) const {
    const auto g = store.mat(gamma).row(0);
    grad.mat(gamma).row(0) += dy.cwiseProduct(ctx.xhat).colwise().sum();
    grad.mat(beta).row(0) += dy.colwise().sum();

    Mat dx(dy.rows(), dy.cols());
    for (int r = 0; r < dy.rows(); ++r) {
        const Eigen::RowVectorXd h = dy.row(r).cwiseProduct(g);
        const double m1 = h.mean();
        const double m2 = h.cwiseProduct(ctx.xhat.row(r)).mean();
        dx.row(r) = ctx.inv_std(r) * (h.array() - m1 - ctx.xhat.row(r).array() * m2).matrix();
    }
    return dx;
}

Mat dropout_forward(const Mat& x, double p, bool training, Rng* rng, DropoutCtx& ctx) {
    if (!training || p <= 0.0) {
        ctx.active = false;
        return x;
    }
    if (p >= 1.0)
        throw_usage("dropout probability must be < 1");
    if (!rng)
        throw_internal("dropout in training mode needs an RNG");
    ctx.active = true;
    ctx.mask.resize(x.rows(), x.cols());
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double scale = 1.0 / (1.0 - p);
    for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < x.cols(); ++c)
            ctx.mask(r, c) = dist(*rng) < p ? 0.0 : scale;
    return x.cwiseProduct(ctx.mask);
}

Mat dropout_backward(const DropoutCtx& ctx, const Mat& dy) {
    if (!ctx.active)
        return dy;
    return dy.cwiseProduct(ctx.mask);
}

namespace {
constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
} // namespace

Mat gelu(const Mat& x) {
    return x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); });
}

Mat gelu_backward(const Mat& x, const Mat& dy) {
    Mat dx(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < x.cols(); ++c) {
            const double v = x(r, c);
            const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
            dx(r, c) = dy(r, c) * (cdf + v * pdf);
        }
    return dx;
}

Mat softmax_rows(const Mat& x) {
    Mat y(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r) {
        const double mx = x.row(r).maxCoeff();
        y.row(r) = (x.row(r).array() - mx).exp();
        y.row(r) /= y.row(r).sum();
    }
    return y;
}

Mat softmax_rows_backward(const Mat& y, const Mat& dy) {
    Mat dx(y.rows(), y.cols());
    for (int r = 0; r < y.rows(); ++r) {
        const double dot = y.row(r).dot(dy.row(r));
        dx.row(r) = y.row(r).cwiseProduct((dy.row(r).array() - dot).matrix());
    }
    return dx;
}

Vec softmax(const Vec& z) {
    const double mx = z.maxCoeff();
    Vec e = (z.array() - mx).exp();
    return e / e.sum();
}

double cross_entropy(const Vec& logits, int label, Vec* dlogits) {
    if (label < 0 || label >= logits.size())
        throw_usage("cross_entropy: label out of range");
    if (!logits.allFinite())
        throw_numeric("cross_entropy: non-finite logits");
    const double mx = logits.maxCoeff();
    const double lse = mx + std::log((logits.array() - mx).exp().sum());
    if (dlogits) {
        *dlogits = ((logits.array() - lse).exp()).matrix();
        (*dlogits)(label) -= 1.0;
    }
    return lse - logits(label);
}

} // namespace dvslr
