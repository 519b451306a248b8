/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace dvslr {

// All math runs in double precision: desk-scale workloads are small and
// double keeps finite-difference gradient checks far from rounding noise.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;

/// Batch of image-like activations, laid out N x C x H x W, row-major.
struct Volume {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> data;

    Volume() = default;
    Volume(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0) {}

    std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }
    std::size_t size() const { return static_cast<std::size_t>(n) * sample_size(); }
    double* sample(int i) { return data.data() + sample_size() * i; }
    const double* sample(int i) const { return data.data() + sample_size() * i; }
};

/// Flat storage for all trainable parameters of one model.
///
/// Layers register named matrices and hold on to the returned ids. Keeping
/// everything in one contiguous buffer makes SGD, checkpointing, best-epoch
/// snapshots and finite-difference probes trivial.
class ParamStore {
public:
    struct Entry {
        std::string name;
        int rows = 0, cols = 0;
        std::size_t offset = 0;
    };

    int add(const std::string& name, int rows, int cols);

    MatMap mat(int id) {
        const Entry& e = entries_[id];
        return MatMap(data_.data() + e.offset, e.rows, e.cols);
    }
    ConstMatMap mat(int id) const {
        const Entry& e = entries_[id];
        return ConstMatMap(data_.data() + e.offset, e.rows, e.cols);
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return data_.size(); }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    int find(const std::string& name) const; // -1 if absent

private:
    std::vector<Entry> entries_;
    std::vector<double> data_;
};

/// Gradient accumulator with the same layout as a ParamStore.
class GradBuffer {
public:
    explicit GradBuffer(const ParamStore& ref) : ref_(&ref), data_(ref.size(), 0.0) {}

    void zero() { std::fill(data_.begin(), data_.end(), 0.0); }

    MatMap mat(int id) {
        const auto& e = ref_->entries()[id];
        return MatMap(data_.data() + e.offset, e.rows, e.cols);
    }

    /// this += other, entrywise.
    void accumulate(const GradBuffer& other);
    void scale(double s);

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }
    const ParamStore& ref() const { return *ref_; }

private:
    const ParamStore* ref_;
    std::vector<double> data_;
};

bool all_finite(const double* p, std::size_t n);
inline bool all_finite(const std::vector<double>& v) { return all_finite(v.data(), v.size()); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

} // namespace dvslr
