/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/tensor.hpp"

#include <cmath>

namespace dvslr {

int ParamStore::add(const std::string& name, int rows, int cols) {
    if (rows <= 0 || cols <= 0)
        throw_internal("ParamStore::add: non-positive shape for '" + name + "'");
    for (const auto& e : entries_)
        if (e.name == name)
            throw_internal("ParamStore::add: duplicate parameter name '" + name + "'");
    Entry e;
    e.name = name;
    e.rows = rows;
    e.cols = cols;
    e.offset = data_.size();
    entries_.push_back(e);
    data_.resize(data_.size() + static_cast<std::size_t>(rows) * cols, 0.0);
    return static_cast<int>(entries_.size()) - 1;
}

int ParamStore::find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name)
            return static_cast<int>(i);
    return -1;
}

void GradBuffer::accumulate(const GradBuffer& other) {
    if (other.data_.size() != data_.size())
        throw_internal("GradBuffer::accumulate: layout mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += other.data_[i];
}

void GradBuffer::scale(double s) {
    for (double& v : data_)
        v *= s;
}

bool all_finite(const double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i]))
            return false;
    return true;
}

} // namespace dvslr
