#pragma once

// Conversions between Image / dataset examples and the column-per-sample
// matrices consumed by the nets.

#include <vector>

#include "acai/common.hpp"
#include "acai/nn.hpp"
#include "acai/synthworld.hpp"

namespace acai::nn {

inline Mat<float> image_to_col(const Image& img) {
    Mat<float> col(static_cast<Eigen::Index>(img.data.size()), 1);
    std::copy(img.data.begin(), img.data.end(), col.data());
    return col;
}

inline Image col_to_image(const Mat<float>& col, int height, int width, Eigen::Index j = 0) {
    Image img(height, width, 3);
    std::copy(col.col(j).data(), col.col(j).data() + img.data.size(), img.data.begin());
    return img;
}

template <class T>
Mat<T> batch_images(const std::vector<world::RenderedExample>& examples,
                    const std::vector<int>& indices) {
    if (indices.empty()) throw ValidationError("batch_images: empty index set");
    const auto& first = examples[static_cast<size_t>(indices[0])].image;
    Mat<T> out(static_cast<Eigen::Index>(first.data.size()), static_cast<Eigen::Index>(indices.size()));
    for (size_t b = 0; b < indices.size(); ++b) {
        const auto& img = examples[static_cast<size_t>(indices[b])].image;
        for (size_t i = 0; i < img.data.size(); ++i)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = static_cast<T>(img.data[i]);
    }
    return out;
}

inline std::vector<int> batch_labels(const std::vector<world::RenderedExample>& examples,
                                     const std::vector<int>& indices) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(examples[static_cast<size_t>(i)].label);
    return out;
}

// Broadcasts per-sample scalars (rows of `values`) into constant channel
// planes appended below `feat`. Used for code / label conditioning.
template <class T>
Mat<T> append_constant_channels(const Mat<T>& feat, const Mat<T>& values, int hw) {
    Mat<T> out(feat.rows() + values.rows() * hw, feat.cols());
    out.topRows(feat.rows()) = feat;
    for (Eigen::Index j = 0; j < feat.cols(); ++j)
        for (Eigen::Index r = 0; r < values.rows(); ++r)
            out.col(j).segment(feat.rows() + r * hw, hw).setConstant(values(r, j));
    return out;
}

template <class T>
Mat<T> one_hot(const std::vector<int>& labels, int n_classes) {
    Mat<T> out = Mat<T>::Zero(n_classes, static_cast<Eigen::Index>(labels.size()));
    for (size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] < 0 || labels[j] >= n_classes)
            throw ValidationError("one_hot: label out of range");
        out(labels[j], static_cast<Eigen::Index>(j)) = T(1);
    }
    return out;
}

}  // namespace acai::nn
