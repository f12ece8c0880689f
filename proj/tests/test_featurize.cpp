#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "polyqc/featurize.hpp"
#include "polyqc/serialization.hpp"

using namespace polyqc;

namespace {

Dataset labelled(std::size_t pos, std::size_t neg) {
    Dataset out;
    for (std::size_t i = 0; i < pos; ++i) out.push_back({"p" + std::to_string(i), {double(i), 0.0}, 1});
    for (std::size_t i = 0; i < neg; ++i) out.push_back({"n" + std::to_string(i), {double(i), 1.0}, -1});
    return out;
}

std::size_t count_label(const Dataset& d, int label) {
    return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [&](const auto& v) { return v.label == label; }));
}

std::set<std::string> ids(const Dataset& d) {
    std::set<std::string> s;
    for (const auto& v : d) s.insert(v.id);
    return s;
}

std::string random_smiles(std::mt19937_64& rng, std::size_t max_len) {
    static const std::string alphabet = "#()+-./0123456789=@CFHNOPS[\\]cinos";
    std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, alphabet.size() - 1);
    std::string s(len(rng), 'C');
    for (auto& c : s) c = alphabet[pick(rng)];
    return s;
}

}  // namespace

TEST(Dictionary, ReferenceIndices) {
    const auto dict = reference_dictionary();
    EXPECT_EQ(dict.size(), 34u);
    EXPECT_EQ(dict.index_of('C'), 19);
    EXPECT_EQ(dict.index_of('='), 17);
    EXPECT_EQ(dict.index_of('1'), 8);
    EXPECT_EQ(dict.index_of('#'), 0);
    EXPECT_EQ(dict.index_of('s'), 33);
}

TEST(Dictionary, BuiltFromCorpus) {
    const std::vector<std::string> cc{"CC"};
    const auto d1 = build_dictionary(cc);
    EXPECT_EQ(d1.size(), 1u);
    EXPECT_EQ(d1.index_of('C'), 0);
    const std::vector<std::string> ab{"AB", "BA"};
    const auto d2 = build_dictionary(ab);
    EXPECT_EQ(d2.index_of('A'), 0);
    EXPECT_EQ(d2.index_of('B'), 1);
    EXPECT_THROW(build_dictionary(std::vector<std::string>{}), InvalidArgumentError);
    EXPECT_THROW(d2.index_of('C'), UnknownTokenError);
}

TEST(Dictionary, FixtureMatchesReference) {
    std::ifstream in(POLYQC_FIXTURES "/smiles_dictionary.json");
    ASSERT_TRUE(in);
    const auto j = nlohmann::json::parse(in);
    const auto dict = dictionary_from_json(j);
    EXPECT_EQ(to_json(dict).at("characters"), to_json(reference_dictionary()).at("characters"));
    EXPECT_EQ(j.at("inferred"), nlohmann::json::parse(R"j(["(", ")", "+", "-"])j"));
}

TEST(Dictionary, JsonRejectsNonSortedIndices) {
    EXPECT_THROW(dictionary_from_json(nlohmann::json::parse(R"({"characters": {"A": 1, "B": 0}})")), ConfigurationError);
    EXPECT_THROW(dictionary_from_json(nlohmann::json::parse(R"({"characters": {"AB": 0}})")), ConfigurationError);
}

TEST(Encode, Polystyrene) {
    const auto tokens = encode_smiles("C=CC1=CC=CC=C1", reference_dictionary());
    ASSERT_EQ(tokens.size(), 139u);
    const std::vector<int> head{19, 17, 19, 19, 8, 17, 19, 19, 17, 19, 19, 17, 19, 8};
    EXPECT_TRUE(std::equal(head.begin(), head.end(), tokens.begin()));
    EXPECT_TRUE(std::all_of(tokens.begin() + 14, tokens.end(), [](int t) { return t == 0; }));
}

TEST(Encode, EdgeCases) {
    const auto dict = reference_dictionary();
    const auto empty = encode_smiles("", dict);
    EXPECT_EQ(empty, std::vector<int>(139, 0));
    EXPECT_NO_THROW(encode_smiles(std::string(139, 'C'), dict));
    EXPECT_THROW(encode_smiles(std::string(140, 'C'), dict), OverlongError);
    EXPECT_THROW(encode_smiles("CXC", dict), UnknownTokenError);
}

TEST(Encode, InjectiveAwayFromPaddingCharacter) {
    std::mt19937_64 rng(1);
    const auto dict = reference_dictionary();
    std::map<std::vector<int>, std::string> seen;
    for (int trial = 0; trial < 3000; ++trial) {
        auto s = random_smiles(rng, 12);
        if (!s.empty() && s.back() == '#') s.back() = 'C';
        const auto [it, inserted] = seen.emplace(encode_smiles(s, dict), s);
        if (!inserted) ASSERT_EQ(it->second, s);
    }
    // The documented collision: a trailing '#' looks like padding.
    EXPECT_EQ(encode_smiles("C#", dict), encode_smiles("C", dict));
}

TEST(LabelGap, Classes) {
    EXPECT_EQ(label_gap(1.0).label, -1);
    EXPECT_EQ(label_gap(1.0).gap_class, GapClass::nir);
    EXPECT_EQ(label_gap(2.0).label, 1);
    EXPECT_EQ(label_gap(0.3).gap_class, GapClass::mir);
    EXPECT_FALSE(label_gap(0.3).label.has_value());
    EXPECT_EQ(label_gap(0.4).gap_class, GapClass::mir);
    EXPECT_EQ(label_gap(1.6).gap_class, GapClass::nir);
    EXPECT_EQ(label_gap(4.0).gap_class, GapClass::vis);
    EXPECT_EQ(label_gap(0.025).gap_class, GapClass::mir);
    EXPECT_THROW(label_gap(0.02), OutOfRangeLabelError);
    EXPECT_THROW(label_gap(4.01), OutOfRangeLabelError);
    EXPECT_THROW(label_gap(NAN), OutOfRangeLabelError);
}

TEST(LabelGap, PartitionsTheRange) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> gap(0.025, 4.0);
    for (int i = 0; i < 10000; ++i) {
        const double g = gap(rng);
        const auto l = label_gap(g);
        const GapClass expected = g <= 0.4 ? GapClass::mir : g <= 1.6 ? GapClass::nir : GapClass::vis;
        ASSERT_EQ(l.gap_class, expected);
        ASSERT_EQ(l.label.has_value(), expected != GapClass::mir);
    }
}

TEST(Preprocess, DropRules) {
    std::vector<PolymerRecord> records{
        {"a", "CC", 2.0},
        {"b", std::string(150, 'C'), 2.0},
        {"c", "CO", 0.3},
        {"d", "CC", 1.0},
        {"e", "CN", 5.0},
        {"f", std::string(139, 'C'), 1.2},
    };
    PreprocessReport report;
    const auto kept = preprocess_dataset(records, &report);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].id, "a");
    EXPECT_EQ(kept[1].id, "f");
    EXPECT_EQ(report.overlong, 1u);
    EXPECT_EQ(report.mir, 1u);
    EXPECT_EQ(report.duplicates, 1u);
    EXPECT_EQ(report.out_of_range, 1u);
    EXPECT_EQ(report.kept, 2u);
}

TEST(Preprocess, OutliersAndZeroVariance) {
    std::vector<PolymerRecord> same;
    for (int i = 0; i < 20; ++i) same.push_back({"s" + std::to_string(i), "C" + std::string(i, 'O'), 2.0});
    EXPECT_EQ(preprocess_dataset(same).size(), 20u);

    std::vector<PolymerRecord> spread;
    for (int i = 0; i < 30; ++i) spread.push_back({"r" + std::to_string(i), "C" + std::string(i, 'N'), 1.0 + 0.01 * (i % 5)});
    spread.push_back({"far", "F", 3.9});
    PreprocessReport report;
    const auto kept = preprocess_dataset(spread, &report);
    EXPECT_EQ(kept.size(), 30u);
    EXPECT_EQ(report.outliers, 1u);
    EXPECT_TRUE(preprocess_dataset(std::vector<PolymerRecord>{}).empty());
}

TEST(Preprocess, Idempotent) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> gap(0.0, 4.5);
    std::normal_distribution<double> cluster(1.7, 0.2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PolymerRecord> records;
        for (int i = 0; i < 200; ++i) {
            const double g = i % 7 == 0 ? gap(rng) : cluster(rng);
            records.push_back({std::to_string(i), random_smiles(rng, i % 11 == 0 ? 160 : 10), g});
        }
        const auto once = preprocess_dataset(records);
        ASSERT_EQ(preprocess_dataset(once), once);
    }
}

TEST(Standardize, Statistics) {
    Dataset train{{"a", {-1.0, 5.0}, 1}, {"b", {1.0, 5.0}, -1}};
    const auto s = Standardizer::fit(train);
    EXPECT_FALSE(s.constant[0]);
    EXPECT_TRUE(s.constant[1]);
    EXPECT_TRUE(s.any_constant());
    const auto out = s.apply(train);
    EXPECT_DOUBLE_EQ(out[0].values[0], -1.0);
    EXPECT_DOUBLE_EQ(out[1].values[0], 1.0);
    EXPECT_DOUBLE_EQ(out[0].values[1], 5.0);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(3.0, 2.5);
    Dataset big;
    for (int i = 0; i < 500; ++i) big.push_back({"x", {g(rng), g(rng), g(rng), g(rng)}, 1});
    const auto z = Standardizer::fit(big).apply(big);
    for (std::size_t j = 0; j < 4; ++j) {
        double mean = 0, sq = 0;
        for (const auto& v : z) mean += v.values[j];
        mean /= 500;
        for (const auto& v : z) sq += (v.values[j] - mean) * (v.values[j] - mean);
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(std::sqrt(sq / 500), 1.0, 1e-12);
    }
    EXPECT_THROW(Standardizer::fit(Dataset{}), InvalidArgumentError);
}

TEST(Augment, Squares) {
    const auto a = augment(FeatureVector{"a", {0.5, -0.2}, -1});
    EXPECT_EQ(a.values[0], 0.5);
    EXPECT_EQ(a.values[1], -0.2);
    EXPECT_EQ(a.values[2], 0.25);
    EXPECT_NEAR(a.values[3], 0.04, 1e-15);
    EXPECT_EQ(a.label, -1);
    EXPECT_EQ(augment(FeatureVector{"z", {0.0, 0.0}, 1}).values, (std::vector<double>{0, 0, 0, 0}));
    EXPECT_EQ(augment(FeatureVector{"o", {1.0, -1.0}, 1}).values, (std::vector<double>{1, -1, 1, 1}));
    EXPECT_THROW(augment(FeatureVector{"bad", {1.0, 2.0, 3.0}, 1}), DimensionError);
}

TEST(Split, PublishedSizes) {
    for (auto [pos, neg, train, test] : std::vector<std::array<std::size_t, 4>>{
             {279, 278, 417, 140}, {2641, 2640, 3960, 1321}, {67, 67, 100, 34}, {3000, 2281, 3960, 1321}}) {
        const auto split = stratified_split(labelled(pos, neg), 0.25, 11);
        EXPECT_EQ(split.train.size(), train);
        EXPECT_EQ(split.test.size(), test);
    }
}

TEST(Split, Invariants) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> size(2, 300);
    std::uniform_real_distribution<double> frac(0.1, 0.5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t pos = size(rng), neg = size(rng);
        const double f = frac(rng);
        const auto data = labelled(pos, neg);
        const auto split = stratified_split(data, f, trial);
        const auto tr = ids(split.train), te = ids(split.test);
        ASSERT_EQ(tr.size() + te.size(), data.size());
        for (const auto& id : tr) ASSERT_EQ(te.count(id), 0u);
        const double train_fraction = static_cast<double>(split.train.size()) / static_cast<double>(data.size());
        for (auto [label, n] : {std::pair{1, pos}, std::pair{-1, neg}}) {
            const double expected = static_cast<double>(n) * train_fraction;
            ASSERT_LE(std::abs(static_cast<double>(count_label(split.train, label)) - expected), 1.0)
                << "pos=" << pos << " neg=" << neg << " f=" << f;
        }
    }
}

TEST(Split, DeterministicPerSeed) {
    const auto data = labelled(50, 40);
    const auto a = stratified_split(data, 0.25, 9), b = stratified_split(data, 0.25, 9), c = stratified_split(data, 0.25, 10);
    EXPECT_EQ(ids(a.train), ids(b.train));
    EXPECT_EQ(a.train[0].id, b.train[0].id);
    EXPECT_NE(ids(a.train), ids(c.train));
}

TEST(Split, Errors) {
    EXPECT_THROW(stratified_split(labelled(10, 1), 0.25, 1), StratificationError);
    EXPECT_THROW(stratified_split(Dataset{}, 0.25, 1), StratificationError);
    EXPECT_THROW(stratified_split(labelled(10, 10), 1.0, 1), InvalidArgumentError);
}

TEST(Subsample, BalancedFromLargeSet) {
    const auto data = labelled(2641, 2640);
    const auto sub = balanced_subsample(data, 557, 3);
    EXPECT_EQ(sub.size(), 557u);
    EXPECT_EQ(count_label(sub, 1), 279u);
    EXPECT_EQ(count_label(sub, -1), 278u);
    EXPECT_EQ(ids(sub).size(), 557u);
    const auto again = balanced_subsample(data, 557, 3);
    EXPECT_EQ(ids(sub), ids(again));
}

TEST(Subsample, IdentityAndErrors) {
    const auto data = labelled(10, 10);
    EXPECT_EQ(ids(balanced_subsample(data, 20, 1)), ids(data));
    EXPECT_THROW(balanced_subsample(data, 1, 1), SamplingError);
    EXPECT_THROW(balanced_subsample(data, 21, 1), SamplingError);
    EXPECT_THROW(balanced_subsample(labelled(10, 3), 10, 1), SamplingError);
}

TEST(SyntheticBlobs, BalancedAndSeeded) {
    const auto a = synthetic_blobs(134, 4.0, 7);
    EXPECT_EQ(count_label(a, 1), 67u);
    EXPECT_EQ(count_label(a, -1), 67u);
    const auto b = synthetic_blobs(134, 4.0, 7);
    EXPECT_EQ(a[5].values, b[5].values);
    // A linear rule along the diagonal separates well-separated blobs.
    const auto far = synthetic_blobs(1000, 12.0, 1);
    for (const auto& v : far) EXPECT_EQ(v.values[0] + v.values[1] >= 0 ? 1 : -1, v.label);
}
