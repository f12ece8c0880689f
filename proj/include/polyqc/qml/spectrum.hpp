#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "polyqc/errors.hpp"
#include "polyqc/qml/vqc.hpp"

namespace polyqc {

struct FourierCoefficient {
    int frequency = 0;
    std::complex<double> value;
};

// Samples f along feature `feature` on the grid 2 pi g / G (other features
// held at `base`) and returns the discrete Fourier coefficients for
// frequencies -G/2+1 .. G/2. An n-photon model has support |w| <= n.
inline std::vector<FourierCoefficient> spectrum_probe(const VqcModel& model, std::size_t feature, int grid,
                                                      std::vector<double> base, const Backend& backend = ExactBackend{}) {
    if (!std::holds_alternative<ExactBackend>(backend))
        throw UnsupportedInputError("spectrum probe needs exact probabilities");
    const int n = model.input_state().photons();
    if (grid < 2 * n + 2) throw InvalidArgumentError("grid must have at least 2n + 2 points");
    if (base.size() != static_cast<std::size_t>(model.spec().feature_dim()) || feature >= base.size())
        throw InvalidArgumentError("feature index or base point does not match the circuit");

    std::vector<double> samples(static_cast<std::size_t>(grid));
    for (int g = 0; g < grid; ++g) {
        base[feature] = 2.0 * std::numbers::pi * g / grid;
        samples[static_cast<std::size_t>(g)] = model_eval(model, base);
    }

    std::vector<FourierCoefficient> coefficients;
    for (int w = -grid / 2 + 1; w <= grid / 2; ++w) {
        std::complex<double> c{};
        for (int g = 0; g < grid; ++g)
            c += samples[static_cast<std::size_t>(g)] * std::polar(1.0, -2.0 * std::numbers::pi * w * g / grid);
        coefficients.push_back({w, c / static_cast<double>(grid)});
    }
    return coefficients;
}

}  // namespace polyqc
