#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "polyqc/interferometer.hpp"
#include "polyqc/serialization.hpp"

using namespace polyqc;
using std::numbers::pi;

namespace {

std::vector<double> uniform_angles(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(0.0, 2.0 * pi);
    std::vector<double> v(n);
    for (auto& x : v) x = a(rng);
    return v;
}

UnitaryMatrix product_of(const std::vector<CircuitElement>& elements, std::size_t begin, std::size_t end, int modes,
                         const CircuitParameters& params) {
    UnitaryMatrix u = UnitaryMatrix::Identity(modes, modes);
    for (std::size_t i = begin; i < end; ++i) u = element_matrix(elements[i], modes, params) * u;
    return u;
}

}  // namespace

TEST(ElementMatrix, PhaseShifter) {
    const double phi = 0.7;
    const auto u = element_matrix(CircuitElement::phase_shifter(1, Fixed{phi}), 2, {});
    EXPECT_NEAR(std::abs(u(0, 0) - Complex(1.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, phi)), 0.0, 1e-15);
    EXPECT_EQ(u(0, 1), Complex(0.0));
    EXPECT_EQ(u(1, 0), Complex(0.0));
}

TEST(ElementMatrix, BeamSplitterZeroIsIdentity) {
    const auto u = element_matrix(CircuitElement::beam_splitter(0, Fixed{0.0}), 2, {});
    EXPECT_TRUE(u.isApprox(UnitaryMatrix::Identity(2, 2)));
}

TEST(ElementMatrix, BalancedSplitterSquaredSwapsWithPhase) {
    const auto u = element_matrix(CircuitElement::beam_splitter(0, Fixed{pi / 4}), 2, {});
    const UnitaryMatrix sq = u * u;
    UnitaryMatrix expected(2, 2);
    expected << Complex(0, 0), Complex(0, 1), Complex(0, 1), Complex(0, 0);
    EXPECT_LT((sq - expected).norm(), 1e-15);
}

TEST(ElementMatrix, EmbedsIntoLargerCircuit) {
    const double t = 0.3;
    const auto u = element_matrix(CircuitElement::beam_splitter(2, Fixed{t}), 5, {});
    EXPECT_NEAR(u(2, 2).real(), std::cos(t), 1e-15);
    EXPECT_NEAR(u(2, 3).imag(), std::sin(t), 1e-15);
    EXPECT_NEAR(u(3, 2).imag(), std::sin(t), 1e-15);
    EXPECT_EQ(u(0, 0), Complex(1.0));
    EXPECT_EQ(u(4, 4), Complex(1.0));
}

TEST(ElementMatrix, UnresolvableBindingThrows) {
    const std::vector<double> x{0.1};
    EXPECT_THROW(element_matrix(CircuitElement::phase_shifter(0, DataBound{3}), 2, {{}, {}, x}), BindingError);
    EXPECT_THROW(element_matrix(CircuitElement::phase_shifter(0, Trainable{1, 0}), 2, {}), BindingError);
    EXPECT_THROW(element_matrix(CircuitElement::beam_splitter(1, Fixed{0.0}), 2, {}), BindingError);
}

TEST(BuildUnitary, EmptyCircuitIsIdentity) {
    const CircuitSpec spec(5, {}, 0, 0, 0);
    EXPECT_TRUE(build_unitary(spec, {}, {}, {}).isApprox(UnitaryMatrix::Identity(5, 5)));
}

TEST(BuildUnitary, DataPhaseOfPiIsMinusOne) {
    const CircuitSpec spec(1, {CircuitElement::phase_shifter(0, DataBound{0})}, 0, 0, 1);
    const std::vector<double> x{pi};
    const auto u = build_unitary(spec, {}, {}, x);
    EXPECT_NEAR(std::abs(u(0, 0) - Complex(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(BuildUnitary, FixedOnlyCircuitIgnoresParameters) {
    const CircuitSpec spec(3,
                           {CircuitElement::beam_splitter(0, Fixed{0.4}), CircuitElement::phase_shifter(1, Fixed{1.1}),
                            CircuitElement::beam_splitter(1, Fixed{2.3})},
                           0, 0, 2);
    std::mt19937_64 rng(1);
    const auto a = build_unitary(spec, {}, {}, uniform_angles(2, rng));
    const auto b = build_unitary(spec, {}, {}, uniform_angles(2, rng));
    EXPECT_EQ(a, b);
}

TEST(BuildUnitary, LaterElementsMultiplyOnTheLeft) {
    const CircuitSpec spec(2, {CircuitElement::phase_shifter(0, Fixed{0.9}), CircuitElement::beam_splitter(0, Fixed{0.5})},
                           0, 0, 0);
    const auto u = build_unitary(spec, {}, {}, {});
    const auto ps = element_matrix(spec.elements()[0], 2, {});
    const auto bs = element_matrix(spec.elements()[1], 2, {});
    EXPECT_LT((u - bs * ps).norm(), 1e-15);
    EXPECT_GT((u - ps * bs).norm(), 1e-3);
}

TEST(BuildUnitary, DimensionMismatchIsConfigurationError) {
    const auto spec = default_ansatz(5, 4);
    const std::vector<double> t(20, 0.0), short_t(19, 0.0), x(4, 0.0), short_x(3, 0.0);
    EXPECT_THROW(build_unitary(spec, short_t, t, x), ConfigurationError);
    EXPECT_THROW(build_unitary(spec, t, short_t, x), ConfigurationError);
    EXPECT_THROW(build_unitary(spec, t, t, short_x), ConfigurationError);
}

TEST(BuildUnitary, UnitaryForRandomDraws) {
    const auto spec = default_ansatz(5, 4);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto t1 = uniform_angles(20, rng), t2 = uniform_angles(20, rng), x = uniform_angles(4, rng);
        ASSERT_LT(unitarity_defect(build_unitary(spec, t1, t2, x)), 1e-10);
    }
}

TEST(BuildUnitary, CompositionIsAssociative) {
    const auto spec = default_ansatz(5, 4);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t1 = uniform_angles(20, rng), t2 = uniform_angles(20, rng), x = uniform_angles(4, rng);
        const CircuitParameters params{t1, t2, x};
        const auto full = build_unitary(spec, t1, t2, x);
        const auto& el = spec.elements();
        for (std::size_t cut = 0; cut <= el.size(); ++cut) {
            const auto right = product_of(el, 0, cut, 5, params);
            const auto left = product_of(el, cut, el.size(), 5, params);
            ASSERT_LT((left * right - full).norm(), 1e-12) << "cut at " << cut;
        }
    }
}

TEST(BuildUnitary, DataEncodingIsLocal) {
    const auto spec = default_ansatz(5, 4);
    std::mt19937_64 rng(9);
    const auto t1 = uniform_angles(20, rng), t2 = uniform_angles(20, rng);
    auto x = uniform_angles(4, rng);
    // Moving x_j is the same as moving the angle of its phase shifter.
    for (int j = 0; j < 4; ++j) {
        auto moved = x;
        moved[static_cast<std::size_t>(j)] += 0.37;
        auto edited = spec.elements();
        for (auto& e : edited)
            if (const auto* d = std::get_if<DataBound>(&e.binding); d && d->feature == j)
                e.binding = Fixed{moved[static_cast<std::size_t>(j)]};
        const CircuitSpec fixed_spec(5, edited, 20, 20, 4);
        EXPECT_LT((build_unitary(spec, t1, t2, moved) - build_unitary(fixed_spec, t1, t2, x)).norm(), 1e-13);
    }
    const CircuitSpec no_data(3, {CircuitElement::beam_splitter(0, Trainable{1, 0})}, 1, 0, 0);
    const std::vector<double> th{0.3};
    EXPECT_EQ(build_unitary(no_data, th, {}, {}), build_unitary(no_data, th, {}, {}));
}

TEST(CircuitSpec, ValidatesBindingsAndOrder) {
    using E = CircuitElement;
    EXPECT_THROW(CircuitSpec(2, {E::beam_splitter(1, Fixed{0.0})}, 0, 0, 0), ConfigurationError);
    EXPECT_THROW(CircuitSpec(2, {E::phase_shifter(0, DataBound{1})}, 0, 0, 1), ConfigurationError);
    EXPECT_THROW(CircuitSpec(2, {E::phase_shifter(0, Trainable{1, 0})}, 2, 0, 0), ConfigurationError);
    EXPECT_THROW(CircuitSpec(2, {E::phase_shifter(0, Trainable{1, 0}), E::phase_shifter(1, Trainable{1, 0})}, 1, 0, 0),
                 ConfigurationError);
    EXPECT_THROW(CircuitSpec(2, {E::phase_shifter(0, DataBound{0}), E::phase_shifter(1, Trainable{1, 0})}, 1, 0, 1),
                 ConfigurationError);
    EXPECT_THROW(CircuitSpec(2, {E::phase_shifter(0, Trainable{2, 0}), E::phase_shifter(1, DataBound{0})}, 0, 1, 1),
                 ConfigurationError);
    EXPECT_NO_THROW(CircuitSpec(2,
                                {E::phase_shifter(0, Trainable{1, 0}), E::phase_shifter(1, DataBound{0}),
                                 E::beam_splitter(0, Fixed{0.1}), E::phase_shifter(0, Trainable{2, 0})},
                                1, 1, 1));
}

TEST(DefaultAnsatz, FiveModesFourFeatures) {
    const auto spec = default_ansatz(5, 4);
    EXPECT_EQ(spec.theta1_size(), 20);
    EXPECT_EQ(spec.theta2_size(), 20);
    std::vector<int> data_modes;
    for (const auto& e : spec.elements())
        if (const auto* d = std::get_if<DataBound>(&e.binding)) {
            EXPECT_EQ(e.kind, ElementKind::phase_shifter);
            EXPECT_EQ(d->feature, static_cast<int>(data_modes.size()));
            data_modes.push_back(e.mode);
        }
    EXPECT_EQ(data_modes, (std::vector<int>{1, 2, 3, 4}));
}

TEST(DefaultAnsatz, TwoModesOneFeature) {
    const auto spec = default_ansatz(2, 1);
    int data = 0;
    for (const auto& e : spec.elements())
        if (std::holds_alternative<DataBound>(e.binding)) {
            ++data;
            EXPECT_EQ(e.mode, 1);
        }
    EXPECT_EQ(data, 1);
}

TEST(DefaultAnsatz, ZeroParametersGiveIdentity) {
    const auto spec = default_ansatz(5, 4);
    const std::vector<double> t(20, 0.0), x(4, 0.0);
    EXPECT_LT((build_unitary(spec, t, t, x) - UnitaryMatrix::Identity(5, 5)).norm(), 1e-15);
}

TEST(DefaultAnsatz, MeshCoversEveryAdjacentPair) {
    const auto pairs = rectangular_mesh_pairs(5);
    EXPECT_EQ(pairs.size(), 10u);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(std::count(pairs.begin(), pairs.end(), j), j % 2 == 0 ? 3 : 2);
}

TEST(DefaultAnsatz, SecondBlockMirrorsFirst) {
    const auto spec = default_ansatz(5, 4);
    std::vector<int> w1, w2;
    for (const auto& e : spec.elements())
        if (const auto* t = std::get_if<Trainable>(&e.binding); t && e.kind == ElementKind::beam_splitter)
            (t->block == 1 ? w1 : w2).push_back(e.mode);
    std::reverse(w2.begin(), w2.end());
    EXPECT_EQ(w1, w2);
}

TEST(DefaultAnsatz, HardwareBudgetOf16) {
    const auto spec = default_ansatz(5, 4, {16});
    EXPECT_EQ(spec.theta1_size(), 16);
    EXPECT_EQ(spec.theta2_size(), 16);
    int phases = 0;
    for (const auto& e : spec.elements())
        if (std::holds_alternative<Trainable>(e.binding) && e.kind == ElementKind::phase_shifter) ++phases;
    EXPECT_EQ(phases, 12);
    EXPECT_THROW(default_ansatz(5, 4, {9}), ConfigurationError);
    EXPECT_THROW(default_ansatz(5, 4, {21}), ConfigurationError);
}

TEST(DefaultAnsatz, RejectsBadDimensions) {
    EXPECT_THROW(default_ansatz(5, 6), ConfigurationError);
    EXPECT_THROW(default_ansatz(1, 1), ConfigurationError);
    EXPECT_THROW(default_ansatz(5, 0), ConfigurationError);
}

TEST(CircuitJson, RoundTrip) {
    const auto spec = default_ansatz(5, 4, {16});
    const auto j = to_json(spec);
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(circuit_from_json(j), spec);
    EXPECT_EQ(circuit_from_json(nlohmann::json::parse(j.dump())), spec);
}

TEST(CircuitJson, RejectsMalformedDocuments) {
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"modes": 2})")), ConfigurationError);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(
                     R"({"modes": 2, "elements": [{"type": "mirror", "mode": 0, "binding": {"kind": "fixed", "value": 0}}]})")),
                 ConfigurationError);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(
                     R"({"modes": 2, "elements": [{"type": "phase_shifter", "mode": 0, "binding": {"kind": "magic"}}]})")),
                 ConfigurationError);
}
