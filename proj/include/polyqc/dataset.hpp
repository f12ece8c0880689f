#pragma once

#include <string>
#include <vector>

namespace polyqc {

// Class labels: VIS = +1 (positive), NIR = -1.
inline constexpr int kVisLabel = 1;
inline constexpr int kNirLabel = -1;

// k-dimensional feature vector with a +/-1 label.
struct FeatureVector {
    std::string id;
    std::vector<double> values;
    int label = kVisLabel;

    std::size_t dim() const noexcept { return values.size(); }
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

using Dataset = std::vector<FeatureVector>;

}  // namespace polyqc
