#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"
#include "polyqc/featurize.hpp"
#include "polyqc/interferometer.hpp"
#include "polyqc/metrics.hpp"
#include "polyqc/pipeline/config.hpp"
#include "polyqc/pipeline/csv.hpp"
#include "polyqc/qml/seesaw.hpp"
#include "polyqc/qml/vqc.hpp"
#include "polyqc/serialization.hpp"

namespace polyqc {

inline constexpr int kReportSchemaVersion = 1;

// Runs `body`, prefixing any library error with the stage name while
// keeping the validation/runtime distinction.
template <class Body>
auto with_stage(const char* stage, Body&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(stage) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(std::string(stage) + ": " + e.what());
    }
}

struct PreparedData {
    DatasetSplit split;
    std::optional<Standardizer> standardizer;
    int feature_dim = 0;
    std::vector<std::string> warnings;
};

// Model-side transformation of raw vectors: standardize, then augment
// 2-d vectors for the k2 modes.
inline Dataset transform_features(std::span<const FeatureVector> raw, const Standardizer& standardizer, FeatureMode mode) {
    Dataset out = standardizer.apply(raw);
    if (mode != FeatureMode::precomputed_k4) out = augment(out);
    return out;
}

inline PreparedData prepare_data(const RunConfig& config) {
    PreparedData data;
    Dataset raw;
    if (config.feature_mode == FeatureMode::synthetic) {
        raw = synthetic_blobs(config.synthetic.samples, config.synthetic.separation, config.synthetic_seed());
    } else {
        auto csv = read_features_csv(config.features_path);
        data.warnings = csv.warnings;
        if (static_cast<int>(csv.dim) != raw_feature_dim(config.feature_mode))
            throw DimensionError("feature mode " + std::string(to_string(config.feature_mode)) + " expects " +
                                 std::to_string(raw_feature_dim(config.feature_mode)) + "-d vectors, file has " +
                                 std::to_string(csv.dim));
        raw = std::move(csv.vectors);
    }
    if (config.subsample > 0) raw = balanced_subsample(raw, config.subsample, config.subsample_seed());

    DatasetSplit split = stratified_split(raw, config.test_fraction, config.split_seed());
    const Standardizer standardizer = Standardizer::fit(split.train);
    if (standardizer.any_constant()) data.warnings.push_back("zero-variance feature dimension left unscaled");
    split.train = transform_features(split.train, standardizer, config.feature_mode);
    split.test = transform_features(split.test, standardizer, config.feature_mode);

    data.feature_dim = static_cast<int>(split.train.front().dim());
    data.split = std::move(split);
    data.standardizer = standardizer;
    return data;
}

inline VqcModel model_template(const RunConfig& config, int feature_dim) {
    const CircuitSpec spec = default_ansatz(config.modes, feature_dim, AnsatzOptions{config.phases_per_block});
    return VqcModel(spec, alternating_input(config.modes, config.photons), config.noise, config.detector);
}

inline nlohmann::json split_metrics(std::span<const int> predictions, std::span<const int> labels) {
    const ConfusionMatrix cm = confusion(predictions, labels);
    return {{"accuracy", accuracy(predictions, labels)}, {"samples", labels.size()}, {"confusion", to_json(cm)}};
}

struct ExperimentOutput {
    TrainedResult result;
    nlohmann::json report;
    nlohmann::json model;
};

inline nlohmann::json build_report(const RunConfig& config, const PreparedData& data, const TrainedResult& result) {
    const auto train_labels = labels_of(data.split.train);
    const auto test_labels = labels_of(data.split.test);
    nlohmann::json repeats = nlohmann::json::array();
    nlohmann::json repeat_seeds = nlohmann::json::array();
    for (const auto& r : result.repeats) {
        repeat_seeds.push_back(r.seed);
        repeats.push_back({{"seed", r.seed},
                           {"best_loss", r.best_loss},
                           {"best_iteration", r.best_iteration},
                           {"loss_trace", r.loss_trace},
                           {"best_loss_trace", r.best_loss_trace},
                           {"train", split_metrics(r.train_predictions, train_labels)},
                           {"test", split_metrics(r.test_predictions, test_labels)}});
    }
    return {{"schema_version", kReportSchemaVersion},
            {"kind", "polyqc.metrics_report"},
            {"config", config.source},
            {"effective_config", effective_json(config)},
            {"seeds",
             {{"master", config.seed},
              {"split", config.split_seed()},
              {"synthetic", config.synthetic_seed()},
              {"subsample", config.subsample_seed()},
              {"train", config.train_seed()},
              {"repeats", repeat_seeds}}},
            {"dataset",
             {{"train", data.split.train.size()},
              {"test", data.split.test.size()},
              {"feature_dim", data.feature_dim},
              {"warnings", data.warnings}}},
            {"summary",
             {{"train_accuracy", to_json(result.train_accuracy)},
              {"test_accuracy", to_json(result.test_accuracy)},
              {"best_repeat", result.best_repeat}}},
            {"best",
             {{"train", split_metrics(result.best().train_predictions, train_labels)},
              {"test", split_metrics(result.best().test_predictions, test_labels)}}},
            {"repeats", repeats}};
}

inline nlohmann::json build_model_document(const RunConfig& config, const VqcModel& model, const PreparedData& data,
                                           const TrainedResult& result) {
    nlohmann::json repeats = nlohmann::json::array();
    for (const auto& r : result.repeats) repeats.push_back(to_json(r));
    const auto& best = result.best();
    return {{"schema_version", kReportSchemaVersion},
            {"kind", "polyqc.trained_model"},
            {"circuit", to_json(model.spec())},
            {"input_state", model.input_state().occupations()},
            {"noise", to_json(model.noise())},
            {"detector", to_string(model.outcomes().detector())},
            {"feature_mode", to_string(config.feature_mode)},
            {"standardizer", to_json(*data.standardizer)},
            {"theta1", best.theta1},
            {"theta2", best.theta2},
            {"lambda", best.lambda},
            {"repeats", repeats},
            {"wall_clock_seconds", result.wall_clock_seconds}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

// Featurize -> split -> seesaw training -> metrics. Writes report.json and
// model.json to config.output_dir when `write` is set; nothing is left
// behind if a stage fails. Results are a function of (config, seed) only.
inline ExperimentOutput run_experiment(const RunConfig& config, std::size_t threads = 1, bool write = true) {
    with_stage("config", [&] { config.validate(); });
    const PreparedData data = with_stage("featurize", [&] { return prepare_data(config); });
    const VqcModel model = with_stage("model", [&] { return model_template(config, data.feature_dim); });

    TrainConfig train = config.train;
    train.seed = config.train_seed();
    train.threads = threads;
    ExperimentOutput out;
    out.result = with_stage("train", [&] { return seesaw_train(model, data.split.train, data.split.test, train); });
    out.report = build_report(config, data, out.result);
    out.model = build_model_document(config, model, data, out.result);

    if (write) {
        with_stage("write", [&] {
            const bool created = !std::filesystem::exists(config.output_dir);
            const auto report_path = config.output_dir / "report.json";
            const auto model_path = config.output_dir / "model.json";
            try {
                std::filesystem::create_directories(config.output_dir);
                write_json(report_path, out.report);
                write_json(model_path, out.model);
            } catch (...) {
                std::error_code ec;
                std::filesystem::remove(report_path, ec);
                std::filesystem::remove(model_path, ec);
                if (created) std::filesystem::remove(config.output_dir, ec);
                throw;
            }
        });
    }
    return out;
}

struct LoadedModel {
    VqcModel model;
    FeatureMode feature_mode;
    Standardizer standardizer;
};

inline LoadedModel load_model_document(const nlohmann::json& j) {
    try {
        if (j.value("kind", std::string()) != "polyqc.trained_model")
            throw ConfigurationError("document is not a trained model");
        VqcModel model(circuit_from_json(j.at("circuit")), FockState(j.at("input_state").get<std::vector<int>>()),
                       noise_from_json(j.at("noise")), detector_from_string(j.at("detector").get<std::string>()));
        model.set_theta(j.at("theta1").get<std::vector<double>>(), j.at("theta2").get<std::vector<double>>());
        model.set_lambda(j.at("lambda").get<std::vector<double>>());
        return {std::move(model), feature_mode_from_string(j.at("feature_mode").get<std::string>()),
                standardizer_from_json(j.at("standardizer"))};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed model document: ") + e.what());
    }
}

// Scores a trained model on raw feature vectors (same form as training input).
inline nlohmann::json evaluate_model(const LoadedModel& loaded, std::span<const FeatureVector> raw,
                                     const Backend& backend = ExactBackend{}, std::size_t threads = 1) {
    if (raw.empty()) throw InvalidDatasetError("no feature vectors to evaluate");
    const Dataset features = transform_features(raw, loaded.standardizer, loaded.feature_mode);
    const Eigen::MatrixXd p = outcome_matrix(loaded.model, features, backend, threads);
    const auto predictions = predictions_from(p, loaded.model.lambda());
    nlohmann::json j = split_metrics(predictions, labels_of(features));
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "polyqc.evaluation";
    return j;
}

}  // namespace polyqc
