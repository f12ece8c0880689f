#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"

namespace polyqc {

inline constexpr std::size_t kEncodedLength = 139;

// Character -> index, indices 0..size-1 in sorted character order.
class TokenDictionary {
public:
    TokenDictionary() = default;

    explicit TokenDictionary(const std::set<char>& characters) {
        int next = 0;
        for (char c : characters) index_[c] = next++;
    }

    std::size_t size() const noexcept { return index_.size(); }
    bool contains(char c) const { return index_.count(c) != 0; }

    int index_of(char c) const {
        auto it = index_.find(c);
        if (it == index_.end()) throw UnknownTokenError(std::string("character '") + c + "' is not in the dictionary");
        return it->second;
    }

    const std::map<char, int>& entries() const noexcept { return index_; }
    friend bool operator==(const TokenDictionary&, const TokenDictionary&) = default;

private:
    std::map<char, int> index_;
};

inline TokenDictionary build_dictionary(std::span<const std::string> corpus) {
    if (corpus.empty()) throw InvalidArgumentError("cannot build a dictionary from an empty corpus");
    std::set<char> chars;
    for (const auto& s : corpus) chars.insert(s.begin(), s.end());
    return TokenDictionary(chars);
}

// The 34-character polymer SMILES alphabet. Entries 1-4 ('(' ')' '+' '-')
// are inferred from the sorted order of the surrounding entries.
inline TokenDictionary reference_dictionary() {
    const std::string alphabet = "#()+-./0123456789=@CFHNOPS[\\]cinos";
    return TokenDictionary(std::set<char>(alphabet.begin(), alphabet.end()));
}

// Index lookup, zero-padded to `length`. Padding shares index 0 with the
// first dictionary character ('#' in the reference alphabet).
inline std::vector<int> encode_smiles(const std::string& smiles, const TokenDictionary& dict,
                                      std::size_t length = kEncodedLength) {
    if (smiles.size() > length)
        throw OverlongError("SMILES of length " + std::to_string(smiles.size()) + " exceeds " + std::to_string(length));
    std::vector<int> tokens(length, 0);
    for (std::size_t i = 0; i < smiles.size(); ++i) tokens[i] = dict.index_of(smiles[i]);
    return tokens;
}

enum class GapClass { nir, vis, mir };

struct GapLabel {
    GapClass gap_class;
    std::optional<int> label;  // -1 NIR, +1 VIS, none for MIR
};

inline const char* to_string(GapClass c) {
    switch (c) {
        case GapClass::nir: return "NIR";
        case GapClass::vis: return "VIS";
        case GapClass::mir: return "MIR";
    }
    return "?";
}

// MIR [0.025, 0.4], NIR (0.4, 1.6], VIS (1.6, 4.0], gap in eV.
inline GapLabel label_gap(double gap_ev) {
    if (!(gap_ev >= 0.025 && gap_ev <= 4.0))
        throw OutOfRangeLabelError("gap " + std::to_string(gap_ev) + " eV is outside [0.025, 4.0]");
    if (gap_ev <= 0.4) return {GapClass::mir, std::nullopt};
    if (gap_ev <= 1.6) return {GapClass::nir, kNirLabel};
    return {GapClass::vis, kVisLabel};
}

struct PolymerRecord {
    std::string id;
    std::string smiles;
    double gap_ev = 0.0;
    friend bool operator==(const PolymerRecord&, const PolymerRecord&) = default;
};

struct PreprocessReport {
    std::size_t input = 0;
    std::size_t duplicates = 0;
    std::size_t overlong = 0;
    std::size_t out_of_range = 0;
    std::size_t mir = 0;
    std::size_t outliers = 0;
    std::size_t kept = 0;
};

inline constexpr double kOutlierZ = 3.0;

// Dedupes SMILES (first wins), drops SMILES longer than 139, gaps outside the
// labelled range, MIR records, and gap outliers with |z| > 3. Outlier
// removal is repeated until no record exceeds the threshold, which makes
// the whole transformation idempotent.
inline std::vector<PolymerRecord> preprocess_dataset(std::span<const PolymerRecord> records,
                                                     PreprocessReport* report = nullptr) {
    PreprocessReport rep;
    rep.input = records.size();
    std::vector<PolymerRecord> kept;
    std::unordered_set<std::string> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.smiles).second) {
            ++rep.duplicates;
            continue;
        }
        if (r.smiles.size() > kEncodedLength) {
            ++rep.overlong;
            continue;
        }
        if (!(r.gap_ev >= 0.025 && r.gap_ev <= 4.0)) {
            ++rep.out_of_range;
            continue;
        }
        if (label_gap(r.gap_ev).gap_class == GapClass::mir) {
            ++rep.mir;
            continue;
        }
        kept.push_back(r);
    }

    for (;;) {
        if (kept.size() < 2) break;
        const double n = static_cast<double>(kept.size());
        double mean = 0.0;
        for (const auto& r : kept) mean += r.gap_ev;
        mean /= n;
        double var = 0.0;
        for (const auto& r : kept) var += (r.gap_ev - mean) * (r.gap_ev - mean);
        const double sd = std::sqrt(var / n);
        if (sd == 0.0) break;
        const auto before = kept.size();
        std::erase_if(kept, [&](const PolymerRecord& r) { return std::abs(r.gap_ev - mean) / sd > kOutlierZ; });
        rep.outliers += before - kept.size();
        if (kept.size() == before) break;
    }
    rep.kept = kept.size();
    if (report) *report = rep;
    return kept;
}

// Per-dimension standardization with statistics from a training subset.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<bool> constant;  // zero-variance dimensions pass through unchanged

    static Standardizer fit(std::span<const FeatureVector> train) {
        if (train.empty()) throw InvalidArgumentError("cannot standardize with an empty training set");
        const std::size_t k = train.front().dim();
        Standardizer s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0), std::vector<bool>(k, false)};
        const double n = static_cast<double>(train.size());
        for (const auto& v : train) {
            if (v.dim() != k) throw DimensionError("feature vectors have inconsistent dimensions");
            for (std::size_t j = 0; j < k; ++j) s.mean[j] += v.values[j];
        }
        for (auto& m : s.mean) m /= n;
        for (const auto& v : train)
            for (std::size_t j = 0; j < k; ++j) s.std[j] += (v.values[j] - s.mean[j]) * (v.values[j] - s.mean[j]);
        for (std::size_t j = 0; j < k; ++j) {
            s.std[j] = std::sqrt(s.std[j] / n);
            s.constant[j] = s.std[j] == 0.0;
        }
        return s;
    }

    bool any_constant() const { return std::find(constant.begin(), constant.end(), true) != constant.end(); }

    FeatureVector apply(FeatureVector v) const {
        if (v.dim() != mean.size()) throw DimensionError("feature dimension differs from the fitted standardizer");
        for (std::size_t j = 0; j < v.dim(); ++j)
            if (!constant[j]) v.values[j] = (v.values[j] - mean[j]) / std[j];
        return v;
    }

    Dataset apply(std::span<const FeatureVector> vs) const {
        Dataset out;
        out.reserve(vs.size());
        for (const auto& v : vs) out.push_back(apply(v));
        return out;
    }
};

// (x1, x2) -> (x1, x2, x1^2, x2^2).
inline FeatureVector augment(const FeatureVector& v) {
    if (v.dim() != 2) throw DimensionError("augmentation expects 2-dimensional vectors, got " + std::to_string(v.dim()));
    FeatureVector out = v;
    out.values = {v.values[0], v.values[1], v.values[0] * v.values[0], v.values[1] * v.values[1]};
    return out;
}

inline Dataset augment(std::span<const FeatureVector> vs) {
    Dataset out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(augment(v));
    return out;
}

struct DatasetSplit {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double test_fraction = 0.25;
};

namespace detail {

inline std::map<int, std::vector<std::size_t>> indices_by_label(std::span<const FeatureVector> vs) {
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < vs.size(); ++i) by_label[vs[i].label].push_back(i);
    return by_label;
}

}  // namespace detail

// Seeded stratified split. The test set takes ceil(N * test_fraction)
// samples; train counts are allocated to classes by largest remainder so
// every class is within one sample of its global proportion.
inline DatasetSplit stratified_split(std::span<const FeatureVector> vs, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgumentError("test fraction must lie in (0, 1)");
    auto by_label = detail::indices_by_label(vs);
    for (const auto& [label, idx] : by_label)
        if (idx.size() < 2)
            throw StratificationError("class " + std::to_string(label) + " has fewer than 2 samples");
    if (by_label.empty()) throw StratificationError("nothing to split");

    const std::size_t total = vs.size();
    const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(total) * test_fraction - 1e-9));
    const std::size_t n_train = total - n_test;

    struct Share {
        int label;
        std::size_t train;
        double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, idx] : by_label) {
        const double exact = static_cast<double>(idx.size()) * static_cast<double>(n_train) / static_cast<double>(total);
        const auto base = static_cast<std::size_t>(std::floor(exact));
        shares.push_back({label, base, exact - static_cast<double>(base)});
        assigned += base;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t k = 0; assigned < n_train; ++k, ++assigned) ++shares[order[k % order.size()]].train;

    DatasetSplit split;
    split.seed = seed;
    split.test_fraction = test_fraction;
    std::mt19937_64 rng(seed);
    for (const auto& share : shares) {
        auto idx = by_label.at(share.label);
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t train_count = std::clamp<std::size_t>(share.train, 1, idx.size() - 1);
        for (std::size_t i = 0; i < idx.size(); ++i) (i < train_count ? split.train : split.test).push_back(vs[idx[i]]);
    }
    std::shuffle(split.train.begin(), split.train.end(), rng);
    std::shuffle(split.test.begin(), split.test.end(), rng);
    return split;
}

// Seeded class-balanced sample of `size` vectors: the two classes differ by
// at most one, the extra sample going to VIS (+1).
inline Dataset balanced_subsample(std::span<const FeatureVector> vs, std::size_t size, std::uint64_t seed) {
    if (size > vs.size()) throw SamplingError("requested more samples than available");
    auto by_label = detail::indices_by_label(vs);
    if (by_label.size() > 2) throw SamplingError("balanced subsampling supports two classes");
    const std::size_t classes = by_label.size();
    if (classes == 0 || size < classes) throw SamplingError("sample too small to contain every class");

    const std::size_t low = size / classes;
    std::mt19937_64 rng(seed);
    Dataset out;
    std::size_t extra = size - low * classes;
    // iterate VIS first so it receives the odd sample
    for (auto it = by_label.rbegin(); it != by_label.rend(); ++it) {
        auto idx = it->second;
        const std::size_t want = low + (extra > 0 ? 1 : 0);
        if (extra > 0) --extra;
        if (want > idx.size())
            throw SamplingError("class " + std::to_string(it->first) + " has " + std::to_string(idx.size()) +
                                " samples, " + std::to_string(want) + " needed");
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < want; ++i) out.push_back(vs[idx[i]]);
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

// Two Gaussian blobs in 2-d, labels +1 / -1 balanced, centred at
// +/- separation / 2 along the diagonal with unit variance.
inline Dataset synthetic_blobs(std::size_t samples, double separation, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double offset = separation / (2.0 * std::sqrt(2.0));
    Dataset out;
    out.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const int label = i % 2 == 0 ? kVisLabel : kNirLabel;
        const double c = label * offset;
        const double x1 = c + noise(rng);
        const double x2 = c + noise(rng);
        out.push_back({"s" + std::to_string(i), {x1, x2}, label});
    }
    return out;
}

}  // namespace polyqc
