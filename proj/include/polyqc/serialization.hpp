#pragma once

// JSON conversions for the documents the library reads and writes.
//
// Circuit specs:
//
//   {
//     "schema_version": 1,
//     "modes": 5,
//     "feature_dim": 4,
//     "trainable": [20, 20],
//     "elements": [
//       {"type": "phase_shifter", "mode": 0, "binding": {"kind": "trainable", "block": 1, "slot": 0}},
//       {"type": "beam_splitter", "mode": 0, "binding": {"kind": "fixed", "value": 0.785398}},
//       {"type": "phase_shifter", "mode": 4, "binding": {"kind": "data", "feature": 3}}
//     ]
//   }
//
// Beam splitters act on (mode, mode + 1). Noise models, distributions,
// dictionaries ({"characters": {"#": 0, ...}}), standardizers, confusion
// matrices and per-repeat training results have flat object forms below.

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "polyqc/errors.hpp"
#include "polyqc/featurize.hpp"
#include "polyqc/interferometer.hpp"
#include "polyqc/metrics.hpp"
#include "polyqc/qml/seesaw.hpp"
#include "polyqc/simulator.hpp"

namespace polyqc {

inline constexpr int kCircuitSchemaVersion = 1;

inline nlohmann::json binding_to_json(const ParameterBinding& binding) {
    return std::visit(
        [](const auto& b) -> nlohmann::json {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Trainable>)
                return {{"kind", "trainable"}, {"block", b.block}, {"slot", b.slot}};
            else if constexpr (std::is_same_v<T, DataBound>)
                return {{"kind", "data"}, {"feature", b.feature}};
            else
                return {{"kind", "fixed"}, {"value", b.value}};
        },
        binding);
}

inline ParameterBinding binding_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "trainable") return Trainable{j.at("block").get<int>(), j.at("slot").get<int>()};
    if (kind == "data") return DataBound{j.at("feature").get<int>()};
    if (kind == "fixed") return Fixed{j.at("value").get<double>()};
    throw ConfigurationError("unknown parameter binding kind '" + kind + "'");
}

inline nlohmann::json to_json(const CircuitSpec& spec) {
    nlohmann::json elements = nlohmann::json::array();
    for (const auto& e : spec.elements()) {
        elements.push_back({{"type", e.kind == ElementKind::phase_shifter ? "phase_shifter" : "beam_splitter"},
                            {"mode", e.mode},
                            {"binding", binding_to_json(e.binding)}});
    }
    return {{"schema_version", kCircuitSchemaVersion},
            {"modes", spec.modes()},
            {"feature_dim", spec.feature_dim()},
            {"trainable", {spec.theta1_size(), spec.theta2_size()}},
            {"elements", elements}};
}

inline CircuitSpec circuit_from_json(const nlohmann::json& j) {
    try {
        if (j.value("schema_version", kCircuitSchemaVersion) != kCircuitSchemaVersion)
            throw ConfigurationError("unsupported circuit schema_version");
        std::vector<CircuitElement> elements;
        for (const auto& e : j.at("elements")) {
            const std::string type = e.at("type").get<std::string>();
            ElementKind kind;
            if (type == "phase_shifter")
                kind = ElementKind::phase_shifter;
            else if (type == "beam_splitter")
                kind = ElementKind::beam_splitter;
            else
                throw ConfigurationError("unknown circuit element type '" + type + "'");
            elements.push_back({kind, e.at("mode").get<int>(), binding_from_json(e.at("binding"))});
        }
        const auto trainable = j.value("trainable", std::vector<int>{0, 0});
        if (trainable.size() != 2) throw ConfigurationError("'trainable' must list two block sizes");
        return CircuitSpec(j.at("modes").get<int>(), std::move(elements), trainable[0], trainable[1],
                           j.value("feature_dim", 0));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed circuit JSON: ") + e.what());
    }
}

inline nlohmann::json to_json(const NoiseModel& noise) {
    return {{"source_loss", noise.source_loss}, {"indistinguishability", noise.indistinguishability}};
}

inline NoiseModel noise_from_json(const nlohmann::json& j) {
    NoiseModel noise;
    noise.source_loss = j.value("source_loss", 0.0);
    noise.indistinguishability = j.value("indistinguishability", 1.0);
    noise.validate();
    return noise;
}

inline const char* to_string(Detector d) { return d == Detector::pnr ? "pnr" : "threshold"; }

inline Detector detector_from_string(const std::string& s) {
    if (s == "pnr") return Detector::pnr;
    if (s == "threshold") return Detector::threshold;
    throw ConfigurationError("detector must be 'pnr' or 'threshold', got '" + s + "'");
}

inline nlohmann::json to_json(const OutputDistribution& dist) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : *dist.basis) states.push_back(s.occupations());
    return {{"photons", dist.basis->photons()},
            {"modes", dist.basis->modes()},
            {"states", states},
            {"probabilities", dist.probabilities}};
}

// Outcome probabilities under a detector, labelled by Fock state or click pattern.
inline nlohmann::json outcomes_to_json(const OutcomeSpace& space, const std::vector<double>& probabilities) {
    return {{"detector", to_string(space.detector())},
            {"photons", space.basis().photons()},
            {"modes", space.basis().modes()},
            {"outcomes", space.labels()},
            {"probabilities", probabilities}};
}

// Dictionary fixture: {"characters": {"#": 0, ...}, "inferred": ["(", ...]}.
inline nlohmann::json to_json(const TokenDictionary& dict) {
    nlohmann::json map = nlohmann::json::object();
    for (const auto& [c, i] : dict.entries()) map[std::string(1, c)] = i;
    return {{"characters", map}};
}

inline TokenDictionary dictionary_from_json(const nlohmann::json& j) {
    const auto& map = j.contains("characters") ? j.at("characters") : j;
    std::set<char> chars;
    std::vector<std::pair<int, char>> listed;
    for (const auto& [key, value] : map.items()) {
        if (key.size() != 1) throw ConfigurationError("dictionary keys must be single characters, got '" + key + "'");
        chars.insert(key[0]);
        listed.emplace_back(value.get<int>(), key[0]);
    }
    TokenDictionary dict(chars);
    for (const auto& [index, c] : listed)
        if (dict.index_of(c) != index)
            throw ConfigurationError(std::string("dictionary index of '") + c + "' is not its sorted position");
    return dict;
}

inline nlohmann::json to_json(const Standardizer& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"constant", s.constant}};
}

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std = j.at("std").get<std::vector<double>>();
    s.constant = j.at("constant").get<std::vector<bool>>();
    if (s.std.size() != s.mean.size() || s.constant.size() != s.mean.size())
        throw ConfigurationError("standardizer arrays differ in length");
    return s;
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
    return {{"tp", cm.tp},
            {"fp", cm.fp},
            {"fn", cm.fn},
            {"tn", cm.tn},
            {"total", cm.total()},
            {"poisson_error",
             {{"tp", ConfusionMatrix::poisson_error(cm.tp)},
              {"fp", ConfusionMatrix::poisson_error(cm.fp)},
              {"fn", ConfusionMatrix::poisson_error(cm.fn)},
              {"tn", ConfusionMatrix::poisson_error(cm.tn)}}}};
}

inline nlohmann::json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

inline const char* to_string(LambdaOptimizer o) {
    return o == LambdaOptimizer::nelder_mead ? "nelder_mead" : "ridge_closed_form";
}

inline LambdaOptimizer lambda_optimizer_from_string(const std::string& s) {
    if (s == "nelder_mead") return LambdaOptimizer::nelder_mead;
    if (s == "ridge_closed_form") return LambdaOptimizer::ridge_closed_form;
    throw ConfigurationError("lambda_optimizer must be 'nelder_mead' or 'ridge_closed_form', got '" + s + "'");
}

inline const char* to_string(ShotConvention c) {
    return c == ShotConvention::post_selected ? "post_selected" : "pre_loss";
}

inline ShotConvention shot_convention_from_string(const std::string& s) {
    if (s == "post_selected") return ShotConvention::post_selected;
    if (s == "pre_loss") return ShotConvention::pre_loss;
    throw ConfigurationError("shot_convention must be 'post_selected' or 'pre_loss', got '" + s + "'");
}

inline nlohmann::json to_json(const RepeatResult& r) {
    return {{"seed", r.seed},
            {"theta1", r.theta1},
            {"theta2", r.theta2},
            {"lambda", r.lambda},
            {"loss_trace", r.loss_trace},
            {"best_loss_trace", r.best_loss_trace},
            {"best_iteration", r.best_iteration},
            {"best_loss", r.best_loss},
            {"train_accuracy", r.train_accuracy},
            {"test_accuracy", r.test_accuracy}};
}

inline RepeatResult repeat_from_json(const nlohmann::json& j) {
    RepeatResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.theta1 = j.at("theta1").get<std::vector<double>>();
    r.theta2 = j.at("theta2").get<std::vector<double>>();
    r.lambda = j.at("lambda").get<std::vector<double>>();
    r.loss_trace = j.value("loss_trace", std::vector<double>{});
    r.best_loss_trace = j.value("best_loss_trace", std::vector<double>{});
    r.best_iteration = j.value("best_iteration", 0);
    r.best_loss = j.value("best_loss", 0.0);
    r.train_accuracy = j.value("train_accuracy", 0.0);
    r.test_accuracy = j.value("test_accuracy", 0.0);
    return r;
}

}  // namespace polyqc
