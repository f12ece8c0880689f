#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polyqc/errors.hpp"
#include "polyqc/featurize.hpp"
#include "polyqc/pipeline/config.hpp"
#include "polyqc/pipeline/csv.hpp"
#include "polyqc/pipeline/experiment.hpp"
#include "polyqc/serialization.hpp"
#include "polyqc/simulator.hpp"

namespace polyqc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ValidationError("file '" + path.string() + "' does not exist");
    std::ifstream in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline void emit_json(const nlohmann::json& j, const std::optional<std::filesystem::path>& out_dir, const char* file,
                      std::ostream& out) {
    if (!out_dir) {
        out << j.dump(2) << '\n';
        return;
    }
    std::filesystem::create_directories(*out_dir);
    write_json(*out_dir / file, j);
    out << "wrote " << (*out_dir / file).string() << '\n';
}

inline Backend backend_from_flags(const std::string& name, std::uint64_t shots, std::uint64_t seed) {
    if (name == "exact") return ExactBackend{};
    return ShotBackend{shots, seed, ShotConvention::post_selected};
}

// Circuit document: a circuit spec, optionally carrying "input_state",
// "theta1", "theta2", "features", "noise" and "detector".
inline nlohmann::json simulate_document(const nlohmann::json& doc, const Backend& backend) {
    try {
        const CircuitSpec spec = circuit_from_json(doc);
        if (!doc.contains("input_state")) throw ConfigurationError("circuit document needs an 'input_state'");
        const FockState input(doc.at("input_state").get<std::vector<int>>());
        if (static_cast<int>(input.modes()) != spec.modes())
            throw ConfigurationError("input_state length does not match the circuit modes");
        auto vec = [&](const char* key, int size) {
            auto v = doc.value(key, std::vector<double>(static_cast<std::size_t>(size), 0.0));
            if (static_cast<int>(v.size()) != size) throw ConfigurationError(std::string("'") + key + "' has the wrong length");
            return v;
        };
        const auto theta1 = vec("theta1", spec.theta1_size());
        const auto theta2 = vec("theta2", spec.theta2_size());
        const auto features = vec("features", spec.feature_dim());
        const NoiseModel noise = doc.contains("noise") ? noise_from_json(doc.at("noise")) : NoiseModel{};
        const Detector detector = detector_from_string(doc.value("detector", std::string("pnr")));

        const UnitaryMatrix u = build_unitary(spec, theta1, theta2, features);
        const auto basis = make_basis(input.photons(), spec.modes());
        const OutputDistribution dist = noise.indistinguishability >= 1.0 ? ideal_distribution(u, input, basis)
                                                                          : noisy_distribution(u, input, basis, noise);
        const OutcomeSpace space(basis, detector);
        nlohmann::json result = {{"schema_version", kReportSchemaVersion},
                                 {"kind", "polyqc.distribution"},
                                 {"input_state", input.occupations()},
                                 {"noise", to_json(noise)},
                                 {"distribution", to_json(dist)},
                                 {"outcomes", outcomes_to_json(space, space.collapse(dist.probabilities))}};
        if (const auto* shots = std::get_if<ShotBackend>(&backend)) {
            result["shots"] = shots->shots;
            result["seed"] = shots->seed;
            result["counts"] = sample_counts(space.collapse(dist.probabilities), shots->shots, shots->seed);
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed circuit document: ") + e.what());
    }
}

}  // namespace detail

// Entry point of the polyqc command-line tool.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Photonic variational classifier for polymer band-gap classes"};
    app.require_subcommand(1);

    // featurize
    auto* featurize = app.add_subcommand("featurize", "Clean, label and encode a SMILES CSV (id,smiles,gap_ev)");
    std::string featurize_input, featurize_dictionary;
    std::string out_dir_flag;
    featurize->add_option("--input", featurize_input, "Polymer CSV")->required();
    featurize->add_option("--dictionary", featurize_dictionary, "Dictionary JSON; built from the corpus if omitted");
    featurize->add_option("--out", out_dir_flag, "Output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "Train the classifier from a JSON run config");
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::string backend_flag;
    std::size_t threads = 1;
    train->add_option("--config", config_path, "Run config (JSON)")->required();
    train->add_option("--seed", seed_flag, "Override the master seed");
    train->add_option("--out", out_dir_flag, "Override the output directory");
    train->add_option("--backend", backend_flag, "exact | shots")->check(CLI::IsMember({"exact", "shots"}));
    train->add_option("--threads", threads, "Worker threads for per-point simulation (0 = all cores)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score a trained model on a features CSV");
    std::string model_path, features_path;
    std::uint64_t shots = 50'000;
    std::uint64_t eval_seed = 0;
    eval->add_option("--model", model_path, "model.json written by train")->required();
    eval->add_option("--features", features_path, "Features CSV (id,x1..xk,label)")->required();
    eval->add_option("--out", out_dir_flag, "Output directory (stdout if omitted)");
    eval->add_option("--backend", backend_flag, "exact | shots")->check(CLI::IsMember({"exact", "shots"}));
    eval->add_option("--shots", shots, "Shots per point for the shots backend");
    eval->add_option("--seed", eval_seed, "Sampling seed");
    eval->add_option("--threads", threads, "Worker threads");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Output distribution of a circuit JSON document");
    std::string circuit_path;
    simulate->add_option("--circuit", circuit_path, "Circuit JSON document")->required();
    simulate->add_option("--out", out_dir_flag, "Output directory (stdout if omitted)");
    simulate->add_option("--backend", backend_flag, "exact | shots")->check(CLI::IsMember({"exact", "shots"}));
    simulate->add_option("--shots", shots, "Shots for the shots backend");
    simulate->add_option("--seed", eval_seed, "Sampling seed");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic two-blob 2-d features CSV");
    std::uint64_t synth_seed = 0;
    std::size_t samples = 134;
    double separation = 4.0;
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", out_dir_flag, "Output directory")->required();
    synth->add_option("--samples", samples, "Number of samples (classes alternate)");
    synth->add_option("--separation", separation, "Distance between blob centres");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    const std::optional<std::filesystem::path> out_dir =
        out_dir_flag.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir_flag);

    try {
        if (featurize->parsed()) {
            const auto records = read_polymer_csv(featurize_input);
            PreprocessReport report;
            const auto kept = preprocess_dataset(records, &report);
            std::vector<std::string> corpus;
            for (const auto& r : kept) corpus.push_back(r.smiles);
            const TokenDictionary dict = featurize_dictionary.empty()
                                             ? (corpus.empty() ? reference_dictionary() : build_dictionary(corpus))
                                             : dictionary_from_json(detail::read_json_file(featurize_dictionary));
            std::filesystem::create_directories(*out_dir);
            write_encoded_csv(*out_dir / "encoded.csv", kept, dict);
            write_json(*out_dir / "dictionary.json", to_json(dict));
            write_json(*out_dir / "preprocess.json", {{"input", report.input},
                                                      {"duplicates", report.duplicates},
                                                      {"overlong", report.overlong},
                                                      {"out_of_range", report.out_of_range},
                                                      {"mir", report.mir},
                                                      {"outliers", report.outliers},
                                                      {"kept", report.kept}});
            if (report.kept == 0) err << "warning: no records survived preprocessing\n";
            out << "kept " << report.kept << " of " << report.input << " records\n";
        } else if (train->parsed()) {
            RunConfig config = load_config(config_path);
            if (seed_flag) config.seed = *seed_flag;
            if (out_dir) config.output_dir = *out_dir;
            if (!backend_flag.empty()) config.train.exact = backend_flag == "exact";
            const auto result = run_experiment(config, threads);
            out << "train accuracy " << result.result.train_accuracy.mean << " +/- " << result.result.train_accuracy.std
                << ", test accuracy " << result.result.test_accuracy.mean << " +/- " << result.result.test_accuracy.std
                << "\nwrote " << (config.output_dir / "report.json").string() << '\n';
        } else if (eval->parsed()) {
            const LoadedModel loaded = load_model_document(detail::read_json_file(model_path));
            const auto csv = read_features_csv(features_path);
            for (const auto& w : csv.warnings) err << "warning: " << w << '\n';
            const auto backend = detail::backend_from_flags(backend_flag.empty() ? "exact" : backend_flag, shots, eval_seed);
            detail::emit_json(evaluate_model(loaded, csv.vectors, backend, threads), out_dir, "evaluation.json", out);
        } else if (simulate->parsed()) {
            const auto backend = detail::backend_from_flags(backend_flag.empty() ? "exact" : backend_flag, shots, eval_seed);
            detail::emit_json(detail::simulate_document(detail::read_json_file(circuit_path), backend), out_dir,
                              "distribution.json", out);
        } else if (synth->parsed()) {
            if (samples < 4) throw ValidationError("--samples must be >= 4");
            std::filesystem::create_directories(*out_dir);
            write_features_csv(*out_dir / "features.csv", synthetic_blobs(samples, separation, synth_seed));
            out << "wrote " << (*out_dir / "features.csv").string() << '\n';
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace polyqc
