#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "polyqc/errors.hpp"

namespace polyqc {

using Complex = std::complex<double>;
using UnitaryMatrix = Eigen::MatrixXcd;

// Where an element's angle comes from.
struct Trainable {
    int block = 1;  // 1 = input mesh W1, 2 = output mesh W2
    int slot = 0;
    friend bool operator==(const Trainable&, const Trainable&) = default;
};

struct DataBound {
    int feature = 0;
    friend bool operator==(const DataBound&, const DataBound&) = default;
};

struct Fixed {
    double value = 0.0;
    friend bool operator==(const Fixed&, const Fixed&) = default;
};

using ParameterBinding = std::variant<Trainable, DataBound, Fixed>;

enum class ElementKind { phase_shifter, beam_splitter };

// Phase shifter on `mode`, or beam splitter on (mode, mode + 1).
struct CircuitElement {
    ElementKind kind = ElementKind::phase_shifter;
    int mode = 0;
    ParameterBinding binding = Fixed{};

    static CircuitElement phase_shifter(int mode, ParameterBinding b) {
        return {ElementKind::phase_shifter, mode, b};
    }
    static CircuitElement beam_splitter(int upper_mode, ParameterBinding b) {
        return {ElementKind::beam_splitter, upper_mode, b};
    }

    friend bool operator==(const CircuitElement&, const CircuitElement&) = default;
};

// Angle vectors an element binding is resolved against.
struct CircuitParameters {
    std::span<const double> theta1;
    std::span<const double> theta2;
    std::span<const double> features;
};

inline double resolve(const ParameterBinding& binding, const CircuitParameters& params) {
    return std::visit(
        [&](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Fixed>) {
                return b.value;
            } else if constexpr (std::is_same_v<T, DataBound>) {
                if (b.feature < 0 || static_cast<std::size_t>(b.feature) >= params.features.size())
                    throw BindingError("feature index " + std::to_string(b.feature) +
                                       " out of range for " + std::to_string(params.features.size()) +
                                       " features");
                return params.features[static_cast<std::size_t>(b.feature)];
            } else {
                const auto& theta = b.block == 1 ? params.theta1 : params.theta2;
                if ((b.block != 1 && b.block != 2) || b.slot < 0 ||
                    static_cast<std::size_t>(b.slot) >= theta.size())
                    throw BindingError("trainable slot " + std::to_string(b.slot) + " of block " +
                                       std::to_string(b.block) + " is not available");
                return theta[static_cast<std::size_t>(b.slot)];
            }
        },
        binding);
}

// 2x2 transfer block of a beam splitter; symmetric convention.
inline Eigen::Matrix2cd beam_splitter_block(double angle) {
    const double c = std::cos(angle);
    const Complex is{0.0, std::sin(angle)};
    Eigen::Matrix2cd block;
    block << c, is, is, c;
    return block;
}

// Left-multiplies `u` in place by the element's m x m matrix.
inline void apply_element(UnitaryMatrix& u, const CircuitElement& element, double angle) {
    const Eigen::Index j = element.mode;
    if (element.kind == ElementKind::phase_shifter) {
        u.row(j) *= std::polar(1.0, angle);
        return;
    }
    const Eigen::Matrix2cd block = beam_splitter_block(angle);
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> rows = u.middleRows(j, 2);
    u.middleRows(j, 2) = block * rows;
}

class CircuitSpec {
public:
    CircuitSpec(int modes, std::vector<CircuitElement> elements, int theta1_size, int theta2_size,
                int feature_dim)
        : modes_(modes),
          elements_(std::move(elements)),
          theta1_size_(theta1_size),
          theta2_size_(theta2_size),
          feature_dim_(feature_dim) {
        validate();
    }

    int modes() const noexcept { return modes_; }
    const std::vector<CircuitElement>& elements() const noexcept { return elements_; }
    int theta1_size() const noexcept { return theta1_size_; }
    int theta2_size() const noexcept { return theta2_size_; }
    int trainable_size() const noexcept { return theta1_size_ + theta2_size_; }
    int feature_dim() const noexcept { return feature_dim_; }

    friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;

private:
    // Block order is W1 elements, then data elements, then W2 elements.
    // Fixed elements may appear anywhere.
    void validate() const {
        if (modes_ < 1) throw ConfigurationError("circuit needs at least one mode");
        if (theta1_size_ < 0 || theta2_size_ < 0 || feature_dim_ < 0)
            throw ConfigurationError("negative parameter count in circuit spec");

        std::vector<int> seen1(static_cast<std::size_t>(theta1_size_), 0);
        std::vector<int> seen2(static_cast<std::size_t>(theta2_size_), 0);
        int stage = 0;  // 0: W1, 1: data, 2: W2
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            const auto& e = elements_[i];
            const std::string where = "element " + std::to_string(i);
            const int last = e.kind == ElementKind::beam_splitter ? e.mode + 1 : e.mode;
            if (e.mode < 0 || last >= modes_)
                throw ConfigurationError(where + ": mode index out of range");

            if (const auto* t = std::get_if<Trainable>(&e.binding)) {
                auto& seen = t->block == 1 ? seen1 : seen2;
                if ((t->block != 1 && t->block != 2) || t->slot < 0 ||
                    static_cast<std::size_t>(t->slot) >= seen.size())
                    throw ConfigurationError(where + ": trainable slot out of range");
                ++seen[static_cast<std::size_t>(t->slot)];
                const int s = t->block == 1 ? 0 : 2;
                if (s < stage) throw ConfigurationError(where + ": W1 element after data or W2 element");
                stage = s;
            } else if (const auto* d = std::get_if<DataBound>(&e.binding)) {
                if (d->feature < 0 || d->feature >= feature_dim_)
                    throw ConfigurationError(where + ": feature index out of range");
                if (stage > 1) throw ConfigurationError(where + ": data element after W2 element");
                stage = 1;
            }
        }
        auto all_once = [](const std::vector<int>& seen) {
            return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
        };
        if (!all_once(seen1) || !all_once(seen2))
            throw ConfigurationError("every trainable slot must be bound exactly once");
    }

    int modes_;
    std::vector<CircuitElement> elements_;
    int theta1_size_;
    int theta2_size_;
    int feature_dim_;
};

// Full m x m matrix of one element.
inline UnitaryMatrix element_matrix(const CircuitElement& element, int modes,
                                    const CircuitParameters& params) {
    if (element.mode < 0 ||
        element.mode + (element.kind == ElementKind::beam_splitter ? 1 : 0) >= modes)
        throw BindingError("element mode outside the circuit");
    UnitaryMatrix u = UnitaryMatrix::Identity(modes, modes);
    apply_element(u, element, resolve(element.binding, params));
    return u;
}

// U = W2(theta2) S(x) W1(theta1): later elements multiply on the left.
inline UnitaryMatrix build_unitary(const CircuitSpec& spec, std::span<const double> theta1,
                                   std::span<const double> theta2, std::span<const double> x) {
    if (theta1.size() != static_cast<std::size_t>(spec.theta1_size()) ||
        theta2.size() != static_cast<std::size_t>(spec.theta2_size()))
        throw ConfigurationError("trainable parameter count does not match the circuit");
    if (x.size() != static_cast<std::size_t>(spec.feature_dim()))
        throw ConfigurationError("feature vector has dimension " + std::to_string(x.size()) +
                                 ", circuit expects " + std::to_string(spec.feature_dim()));
    const CircuitParameters params{theta1, theta2, x};
    UnitaryMatrix u = UnitaryMatrix::Identity(spec.modes(), spec.modes());
    for (const auto& e : spec.elements()) apply_element(u, e, resolve(e.binding, params));
    return u;
}

// Frobenius norm of U^dagger U - I.
inline double unitarity_defect(const UnitaryMatrix& u) {
    return (u.adjoint() * u - UnitaryMatrix::Identity(u.cols(), u.cols())).norm();
}

struct AnsatzOptions {
    // Trainable phases per mesh. 0 = every beam splitter and its phase
    // shifter is trainable (2 per mode pair). A smaller budget keeps all
    // beam-splitter angles trainable and drops the phase shifters of the
    // last pairs, e.g. 16 on five modes.
    int phases_per_block = 0;
};

// Mode pairs of a rectangular (Clements-style) mesh, column by column.
inline std::vector<int> rectangular_mesh_pairs(int modes) {
    std::vector<int> uppers;
    for (int column = 0; column < modes; ++column)
        for (int j = column % 2; j + 1 < modes; j += 2) uppers.push_back(j);
    return uppers;
}

// Two trainable rectangular meshes around k data phase shifters on the last
// k modes; feature j drives mode m - k + j. The second mesh mirrors the
// first column order with its own parameters.
inline CircuitSpec default_ansatz(int modes, int feature_dim, AnsatzOptions options = {}) {
    if (modes < 2) throw ConfigurationError("ansatz needs at least two modes");
    if (feature_dim < 1 || feature_dim > modes)
        throw ConfigurationError("ansatz feature dimension must lie in [1, modes]");

    const std::vector<int> pairs = rectangular_mesh_pairs(modes);
    const int full = 2 * static_cast<int>(pairs.size());
    const int budget = options.phases_per_block == 0 ? full : options.phases_per_block;
    if (budget < static_cast<int>(pairs.size()) || budget > full)
        throw ConfigurationError("phases_per_block must lie in [" + std::to_string(pairs.size()) +
                                 ", " + std::to_string(full) + "]");
    const int with_phase = budget - static_cast<int>(pairs.size());

    std::vector<CircuitElement> elements;
    auto mesh = [&](int block, bool mirrored) {
        int slot = 0;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const int upper = mirrored ? pairs[pairs.size() - 1 - p] : pairs[p];
            if (static_cast<int>(p) < with_phase)
                elements.push_back(CircuitElement::phase_shifter(upper, Trainable{block, slot++}));
            elements.push_back(CircuitElement::beam_splitter(upper, Trainable{block, slot++}));
        }
    };

    mesh(1, false);
    for (int j = 0; j < feature_dim; ++j)
        elements.push_back(CircuitElement::phase_shifter(modes - feature_dim + j, DataBound{j}));
    mesh(2, true);
    return CircuitSpec(modes, std::move(elements), budget, budget, feature_dim);
}

}  // namespace polyqc
