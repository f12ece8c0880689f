#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"

namespace polyqc {

inline void check_prediction_lengths(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw InvalidArgumentError("predictions and labels differ in length");
    if (predictions.empty()) throw InvalidArgumentError("no predictions to score");
}

inline double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    check_prediction_lengths(predictions, labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// 2x2 confusion counts with VIS (+1) as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }

    // Poisson counting error per cell.
    static double poisson_error(std::size_t count) { return std::sqrt(static_cast<double>(count)); }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    check_prediction_lengths(predictions, labels);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] == kVisLabel;
        const bool predicted = predictions[i] == kVisLabel;
        if (actual && predicted) ++cm.tp;
        else if (!actual && predicted) ++cm.fp;
        else if (actual) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

inline MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) return {};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

}  // namespace polyqc
