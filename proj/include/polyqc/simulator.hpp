#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "polyqc/errors.hpp"
#include "polyqc/fock.hpp"
#include "polyqc/interferometer.hpp"

namespace polyqc {

// Imperfections of the single-photon source.
//
// indistinguishability is read as a per-photon probability: each photon is
// independently "ideal" with that probability and otherwise lives in its own
// orthogonal internal mode. Only ideal photons interfere.
//
// Under post-selection on all n photons, uniform source loss commutes with
// the interferometer and leaves the outcome distribution unchanged; it only
// thins the number of usable shots (see effective_shots).
struct NoiseModel {
    double source_loss = 0.0;
    double indistinguishability = 1.0;

    static NoiseModel ideal() { return {}; }

    void validate() const {
        if (!(source_loss >= 0.0 && source_loss <= 1.0))
            throw InvalidArgumentError("source_loss must lie in [0, 1]");
        if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0))
            throw InvalidArgumentError("indistinguishability must lie in [0, 1]");
    }

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

inline constexpr double kProbabilityFloor = 1e-12;

// Probability vector over a Fock basis.
struct OutputDistribution {
    std::shared_ptr<const FockBasis> basis;
    std::vector<double> probabilities;

    double probability_of(const FockState& state) const { return probabilities[basis->index_of(state)]; }
};

inline std::shared_ptr<const FockBasis> make_basis(int photons, int modes) {
    return std::make_shared<const FockBasis>(photons, modes);
}

// Matrix permanent by Ryser's formula with Gray-code subset order,
// O(2^d d).
inline Complex permanent(const Eigen::Ref<const UnitaryMatrix>& a) {
    if (a.rows() != a.cols())
        throw DimensionError("permanent of a non-square " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " matrix");
    const auto n = static_cast<int>(a.rows());
    if (n == 0) return {1.0, 0.0};
    if (n > 30) throw DimensionError("permanent size too large for Ryser enumeration");

    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex{});
    Complex total{};
    std::uint64_t previous = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        const std::uint64_t flipped = gray ^ previous;
        const int column = std::countr_zero(flipped);
        const double direction = (gray & flipped) ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += direction * a(i, column);
        previous = gray;

        Complex product{1.0, 0.0};
        for (const auto& s : row_sums) product *= s;
        const int size = std::popcount(gray);
        total += ((n - size) % 2 == 0) ? product : -product;
    }
    return total;
}

namespace detail {

inline std::vector<int> expand_modes(const FockState& state) {
    std::vector<int> modes;
    for (std::size_t j = 0; j < state.modes(); ++j)
        for (int k = 0; k < state[j]; ++k) modes.push_back(static_cast<int>(j));
    return modes;
}

inline void check_transition(const UnitaryMatrix& u, const FockState& input, const FockState& output) {
    if (input.photons() != output.photons())
        throw InvalidTransitionError("photon number changes from " + std::to_string(input.photons()) +
                                     " to " + std::to_string(output.photons()));
    if (input.modes() != output.modes() || static_cast<Eigen::Index>(input.modes()) != u.rows() ||
        u.rows() != u.cols())
        throw InvalidTransitionError("mode count mismatch between states and unitary");
}

inline void check_basis(const FockBasis& basis, const FockState& input, const UnitaryMatrix& u) {
    if (!basis.contains(input))
        throw InvalidTransitionError("basis does not match the input state " + input.to_string());
    if (u.rows() != basis.modes() || u.cols() != basis.modes())
        throw InvalidTransitionError("unitary size does not match the basis mode count");
}

// Clamp tiny values to zero, then renormalize.
inline std::vector<double> finalize(std::vector<double> p) {
    double sum = 0.0;
    for (auto& v : p) {
        if (v < kProbabilityFloor) v = 0.0;
        sum += v;
    }
    if (sum > 0.0)
        for (auto& v : p) v /= sum;
    return p;
}

inline Complex amplitude_unchecked(const UnitaryMatrix& u, const std::vector<int>& in_modes,
                                   double in_norm, const FockState& output) {
    const std::vector<int> out_modes = expand_modes(output);
    const auto n = static_cast<Eigen::Index>(in_modes.size());
    UnitaryMatrix sub(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            sub(r, c) = u(out_modes[static_cast<std::size_t>(r)], in_modes[static_cast<std::size_t>(c)]);
    const double norm = std::sqrt(in_norm * static_cast<double>(occupancy_factor(output)));
    return permanent(sub) / norm;
}

inline std::vector<double> raw_ideal(const UnitaryMatrix& u, const FockState& input, const FockBasis& basis) {
    const std::vector<int> in_modes = expand_modes(input);
    const double in_norm = static_cast<double>(occupancy_factor(input));
    std::vector<double> p(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        p[i] = std::norm(amplitude_unchecked(u, in_modes, in_norm, basis[i]));
    return p;
}

// Independent particles: photon from mode j lands in mode i with |U_ij|^2.
inline std::vector<double> raw_classical(const UnitaryMatrix& u, const FockState& input,
                                         const FockBasis& basis) {
    const std::vector<int> sources = expand_modes(input);
    const int m = basis.modes();
    std::vector<double> p(basis.size(), 0.0);
    std::vector<int> occ(static_cast<std::size_t>(m), 0);
    std::function<void(std::size_t, double)> land = [&](std::size_t photon, double weight) {
        if (photon == sources.size()) {
            p[basis.index_of(FockState(occ))] += weight;
            return;
        }
        for (int i = 0; i < m; ++i) {
            const double w = std::norm(u(i, sources[photon]));
            if (w == 0.0) continue;
            ++occ[static_cast<std::size_t>(i)];
            land(photon + 1, weight * w);
            --occ[static_cast<std::size_t>(i)];
        }
    };
    land(0, 1.0);
    return p;
}

}  // namespace detail

// <output| U |input> = Per(U[out rows, in cols]) / sqrt(prod in! prod out!).
inline Complex transition_amplitude(const UnitaryMatrix& u, const FockState& input, const FockState& output) {
    detail::check_transition(u, input, output);
    return detail::amplitude_unchecked(u, detail::expand_modes(input),
                                       static_cast<double>(occupancy_factor(input)), output);
}

inline OutputDistribution ideal_distribution(const UnitaryMatrix& u, const FockState& input,
                                             std::shared_ptr<const FockBasis> basis) {
    detail::check_basis(*basis, input, u);
    auto p = detail::finalize(detail::raw_ideal(u, input, *basis));
    return {std::move(basis), std::move(p)};
}

// Fully distinguishable photons.
inline OutputDistribution classical_distribution(const UnitaryMatrix& u, const FockState& input,
                                                 std::shared_ptr<const FockBasis> basis) {
    detail::check_basis(*basis, input, u);
    auto p = detail::finalize(detail::raw_classical(u, input, *basis));
    return {std::move(basis), std::move(p)};
}

// Mixture over the subset S of ideal photons, weight p^|S| (1-p)^(n-|S|):
// photons in S interfere, the rest propagate independently, and the two
// partial occupation distributions are convolved.
inline OutputDistribution noisy_distribution(const UnitaryMatrix& u, const FockState& input,
                                             std::shared_ptr<const FockBasis> basis, const NoiseModel& noise) {
    noise.validate();
    detail::check_basis(*basis, input, u);
    if (!input.is_single_photon())
        throw UnsupportedInputError("noisy source model needs at most one photon per input mode, got " +
                                    input.to_string());

    const std::vector<int> photon_modes = detail::expand_modes(input);
    const int n = static_cast<int>(photon_modes.size());
    const int m = basis->modes();
    const double p = noise.indistinguishability;

    std::vector<FockBasis> sub_bases;
    for (int k = 0; k <= n; ++k) sub_bases.emplace_back(k, m);

    std::vector<double> mixed(basis->size(), 0.0);
    std::vector<int> combined(static_cast<std::size_t>(m));
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const int ideal_count = std::popcount(mask);
        const double weight = std::pow(p, ideal_count) * std::pow(1.0 - p, n - ideal_count);
        if (weight == 0.0) continue;

        std::vector<int> ideal_occ(static_cast<std::size_t>(m), 0), classical_occ(static_cast<std::size_t>(m), 0);
        for (int k = 0; k < n; ++k)
            ++((mask >> k) & 1u ? ideal_occ : classical_occ)[static_cast<std::size_t>(photon_modes[static_cast<std::size_t>(k)])];

        const FockBasis& qb = sub_bases[static_cast<std::size_t>(ideal_count)];
        const FockBasis& cb = sub_bases[static_cast<std::size_t>(n - ideal_count)];
        const auto quantum = detail::raw_ideal(u, FockState(ideal_occ), qb);
        const auto classical = detail::raw_classical(u, FockState(classical_occ), cb);
        for (std::size_t a = 0; a < qb.size(); ++a) {
            if (quantum[a] == 0.0) continue;
            for (std::size_t b = 0; b < cb.size(); ++b) {
                if (classical[b] == 0.0) continue;
                for (int j = 0; j < m; ++j)
                    combined[static_cast<std::size_t>(j)] = qb[a][static_cast<std::size_t>(j)] + cb[b][static_cast<std::size_t>(j)];
                mixed[basis->index_of(FockState(combined))] += weight * quantum[a] * classical[b];
            }
        }
    }
    return {std::move(basis), detail::finalize(std::move(mixed))};
}

// Multinomial draw by sequential conditional binomials; deterministic per
// seed on a given standard library.
inline std::vector<std::uint64_t> sample_counts(const std::vector<double>& probabilities, std::uint64_t shots,
                                                std::uint64_t seed) {
    if (shots == 0) throw InvalidArgumentError("shots must be positive");
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> counts(probabilities.size(), 0);
    std::uint64_t remaining = shots;
    double remaining_mass = 1.0;
    for (std::size_t i = 0; i < probabilities.size() && remaining > 0; ++i) {
        if (i + 1 == probabilities.size() || remaining_mass <= 0.0) {
            counts[i] = remaining;
            remaining = 0;
            break;
        }
        const double q = std::clamp(probabilities[i] / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        counts[i] = q >= 1.0 ? remaining : draw(rng);
        remaining -= counts[i];
        remaining_mass -= probabilities[i];
    }
    return counts;
}

inline std::vector<std::uint64_t> sample_counts(const OutputDistribution& dist, std::uint64_t shots,
                                                std::uint64_t seed) {
    return sample_counts(dist.probabilities, shots, seed);
}

// What the quoted shot count refers to.
enum class ShotConvention {
    post_selected,  // shots are already n-photon coincidence events
    pre_loss,       // shots are source pulses; only (1 - loss)^n survive
};

inline std::uint64_t effective_shots(std::uint64_t shots, const NoiseModel& noise, int photons,
                                     ShotConvention convention) {
    if (convention == ShotConvention::post_selected) return shots;
    const double survive = std::pow(1.0 - noise.source_loss, photons);
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(shots) * survive));
}

enum class Detector { pnr, threshold };

// Labels of the observable's outcomes and the map from Fock basis index to
// outcome index. Under PNR detection outcomes are the Fock states; under
// threshold detection they are the distinct click patterns, ordered
// lexicographically descending.
class OutcomeSpace {
public:
    OutcomeSpace(std::shared_ptr<const FockBasis> basis, Detector detector)
        : basis_(std::move(basis)), detector_(detector) {
        if (detector == Detector::pnr) {
            for (const auto& s : *basis_) labels_.push_back(s.occupations());
            map_.resize(basis_->size());
            for (std::size_t i = 0; i < map_.size(); ++i) map_[i] = i;
            return;
        }
        std::map<std::vector<int>, std::size_t, std::greater<>> patterns;
        for (const auto& s : *basis_) patterns.emplace(to_click_pattern(s), 0);
        std::size_t next = 0;
        for (auto& [pattern, index] : patterns) {
            index = next++;
            labels_.push_back(pattern);
        }
        for (const auto& s : *basis_) map_.push_back(patterns.at(to_click_pattern(s)));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    Detector detector() const noexcept { return detector_; }
    const FockBasis& basis() const noexcept { return *basis_; }
    const std::shared_ptr<const FockBasis>& basis_ptr() const noexcept { return basis_; }
    const std::vector<std::vector<int>>& labels() const noexcept { return labels_; }
    std::size_t outcome_of(std::size_t basis_index) const { return map_.at(basis_index); }

    std::vector<double> collapse(const std::vector<double>& fock_probabilities) const {
        std::vector<double> out(size(), 0.0);
        for (std::size_t i = 0; i < fock_probabilities.size(); ++i) out[map_[i]] += fock_probabilities[i];
        return out;
    }

private:
    std::shared_ptr<const FockBasis> basis_;
    Detector detector_;
    std::vector<std::vector<int>> labels_;
    std::vector<std::size_t> map_;
};

}  // namespace polyqc
