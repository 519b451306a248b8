/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/data/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "core/common.hpp"

namespace dvslr {

namespace {

RawImage from_cv(const cv::Mat& m) {
    RawImage img;
    img.h = m.rows;
    img.w = m.cols;
    img.c = m.channels();
    img.data.resize(static_cast<std::size_t>(img.h) * img.w * img.c);
    if (m.isContinuous()) {
        std::copy(m.data, m.data + img.data.size(), img.data.begin());
    } else {
        for (int y = 0; y < m.rows; ++y)
            std::copy(m.ptr(y), m.ptr(y) + static_cast<std::size_t>(m.cols) * img.c,
                      img.data.begin() + static_cast<std::size_t>(y) * m.cols * img.c);
    }
    return img;
}

cv::Mat to_cv(const RawImage& img) {
    cv::Mat m(img.h, img.w, CV_8UC(img.c));
    std::copy(img.data.begin(), img.data.end(), m.data);
    return m;
}

} // namespace

RawImage decode_image(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty())
        throw_io("cannot read image file: " + path.string());
    if (m.depth() != CV_8U)
        throw_data("unsupported image depth (expected 8-bit): " + path.string());
    if (m.channels() == 3)
        cv::cvtColor(m, m, cv::COLOR_BGR2RGB);
    else if (m.channels() == 4)
        cv::cvtColor(m, m, cv::COLOR_BGRA2RGBA);
    return from_cv(m);
}

void write_jpeg(const std::filesystem::path& path, const RawImage& img) {
    if (img.c != 3)
        throw_usage("write_jpeg expects a 3-channel RGB image");
    cv::Mat m = to_cv(img);
    cv::cvtColor(m, m, cv::COLOR_RGB2BGR);
    std::vector<int> params{cv::IMWRITE_JPEG_QUALITY, 95};
    if (!cv::imwrite(path.string(), m, params))
        throw_io("cannot write image file: " + path.string());
}

RawImage central_crop_resize(const RawImage& img, int target_size) {
    if (target_size < 1)
        throw_usage("central_crop_resize: target_size must be >= 1");
    if (img.h < 1 || img.w < 1)
        throw_usage("central_crop_resize: empty image");
    const int side = std::min(img.h, img.w);
    const int top = (img.h - side) / 2;
    const int left = (img.w - side) / 2;
    cv::Mat m = to_cv(img);
    cv::Mat crop = m(cv::Rect(left, top, side, side));
    if (side == target_size)
        return from_cv(crop.clone());
    cv::Mat resized;
    cv::resize(crop, resized, cv::Size(target_size, target_size), 0, 0, cv::INTER_LINEAR);
    return from_cv(resized);
}

} // namespace dvslr
