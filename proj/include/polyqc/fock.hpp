#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "polyqc/errors.hpp"

namespace polyqc {

// Photon counts per optical mode.
class FockState {
public:
    FockState() = default;

    explicit FockState(std::vector<int> occupations) : occupations_(std::move(occupations)) {
        for (int n : occupations_)
            if (n < 0) throw InvalidArgumentError("negative occupation in Fock state " + to_string());
    }

    FockState(std::initializer_list<int> occupations)
        : FockState(std::vector<int>(occupations)) {}

    std::size_t modes() const noexcept { return occupations_.size(); }

    int photons() const noexcept {
        return std::accumulate(occupations_.begin(), occupations_.end(), 0);
    }

    int operator[](std::size_t mode) const { return occupations_[mode]; }
    const std::vector<int>& occupations() const noexcept { return occupations_; }

    // True if every mode holds at most one photon.
    bool is_single_photon() const noexcept {
        return std::all_of(occupations_.begin(), occupations_.end(), [](int n) { return n <= 1; });
    }

    std::string to_string() const {
        std::ostringstream out;
        out << '|';
        for (std::size_t i = 0; i < occupations_.size(); ++i) out << (i ? "," : "") << occupations_[i];
        out << '>';
        return out.str();
    }

    friend bool operator==(const FockState&, const FockState&) = default;
    friend auto operator<=>(const FockState&, const FockState&) = default;

private:
    std::vector<int> occupations_;
};

// Product of factorials of the occupations, the bosonic normalization
// entering the permanent amplitude formula.
inline std::uint64_t occupancy_factor(const FockState& state) {
    std::uint64_t product = 1;
    for (int n : state.occupations())
        for (int k = 2; k <= n; ++k) product *= static_cast<std::uint64_t>(k);
    return product;
}

// Threshold-detector view: 1 where at least one photon is present.
inline std::vector<int> to_click_pattern(const FockState& state) {
    std::vector<int> clicks(state.modes());
    std::transform(state.occupations().begin(), state.occupations().end(), clicks.begin(),
                   [](int n) { return n > 0 ? 1 : 0; });
    return clicks;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

// All n-photon states over m modes in lexicographically descending order,
// so (n,0,...,0) comes first and (0,...,0,n) last. Immutable once built.
class FockBasis {
public:
    FockBasis(int photons, int modes) : photons_(photons), modes_(modes) {
        if (modes < 1) throw DimensionError("Fock basis needs at least one mode");
        if (photons < 0) throw DimensionError("Fock basis needs a non-negative photon count");
        states_.reserve(static_cast<std::size_t>(binomial(photons + modes - 1, photons)));
        std::vector<int> occ(static_cast<std::size_t>(modes), 0);
        fill(occ, 0, photons);
    }

    int photons() const noexcept { return photons_; }
    int modes() const noexcept { return modes_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<FockState>& states() const noexcept { return states_; }
    const FockState& operator[](std::size_t i) const { return states_[i]; }

    auto begin() const noexcept { return states_.begin(); }
    auto end() const noexcept { return states_.end(); }

    bool contains(const FockState& state) const noexcept {
        return static_cast<int>(state.modes()) == modes_ && state.photons() == photons_;
    }

    std::size_t index_of(const FockState& state) const {
        if (!contains(state))
            throw NotInBasisError("state " + state.to_string() + " is not in the " +
                                  std::to_string(photons_) + "-photon, " + std::to_string(modes_) +
                                  "-mode basis");
        auto it = std::lower_bound(states_.begin(), states_.end(), state, std::greater<>{});
        return static_cast<std::size_t>(it - states_.begin());
    }

private:
    void fill(std::vector<int>& occ, std::size_t mode, int remaining) {
        if (mode + 1 == occ.size()) {
            occ[mode] = remaining;
            states_.emplace_back(occ);
            return;
        }
        for (int n = remaining; n >= 0; --n) {
            occ[mode] = n;
            fill(occ, mode + 1, remaining - n);
        }
        occ[mode] = 0;
    }

    int photons_;
    int modes_;
    std::vector<FockState> states_;
};

inline FockBasis enumerate_basis(int photons, int modes) { return FockBasis(photons, modes); }

}  // namespace polyqc
