#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "polyqc/errors.hpp"
#include "polyqc/qml/seesaw.hpp"
#include "polyqc/serialization.hpp"
#include "polyqc/simulator.hpp"

namespace polyqc {

enum class FeatureMode { precomputed_k2_augment, precomputed_k4, synthetic };

inline const char* to_string(FeatureMode m) {
    switch (m) {
        case FeatureMode::precomputed_k2_augment: return "precomputed_k2_augment";
        case FeatureMode::precomputed_k4: return "precomputed_k4";
        case FeatureMode::synthetic: return "synthetic";
    }
    return "?";
}

inline FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "precomputed_k2_augment") return FeatureMode::precomputed_k2_augment;
    if (s == "precomputed_k4") return FeatureMode::precomputed_k4;
    if (s == "synthetic") return FeatureMode::synthetic;
    throw ConfigurationError("unknown feature mode '" + s + "'");
}

// Input dimension expected from the features file / generator.
inline int raw_feature_dim(FeatureMode m) { return m == FeatureMode::precomputed_k4 ? 4 : 2; }

struct SyntheticConfig {
    std::size_t samples = 134;
    double separation = 4.0;
};

// Everything a run needs. Read from a JSON file:
//
//   {
//     "seed": 7,
//     "features": {"mode": "synthetic" | "precomputed_k2_augment" | "precomputed_k4",
//                  "path": "features.csv", "subsample": 557},
//     "synthetic": {"samples": 134, "separation": 4.0},
//     "split": {"test_fraction": 0.25},
//     "circuit": {"modes": 5, "photons": 3, "phases_per_block": 0, "detector": "pnr"},
//     "noise": {"source_loss": 0.0, "indistinguishability": 1.0},
//     "backend": "exact" | "shots",
//     "train": {"iterations": 15, "batches": 10, "shots": 50000, "alpha": 0.01,
//               "repeats": 5, "lambda_optimizer": "nelder_mead",
//               "shot_convention": "post_selected",
//               "gp": {"initial_points": 5, "candidates": 256, "length_scale": 1.0, "jitter": 1e-6},
//               "nelder_mead": {"tolerance": 1e-12, "max_iterations": 200000,
//                               "initial_step": 0.5, "restarts": 8}},
//     "output_dir": "out"
//   }
//
// Every key is optional; relative paths resolve against the config file.
struct RunConfig {
    std::uint64_t seed = 0;
    FeatureMode feature_mode = FeatureMode::synthetic;
    std::filesystem::path features_path;
    std::size_t subsample = 0;  // 0 = use every vector
    SyntheticConfig synthetic;
    double test_fraction = 0.25;
    int modes = 5;
    int photons = 3;
    int phases_per_block = 0;
    Detector detector = Detector::pnr;
    NoiseModel noise;
    TrainConfig train;
    std::filesystem::path output_dir = "out";
    nlohmann::json source = nlohmann::json::object();  // config document as given

    // Seeds of the individual stages, all derived from `seed`.
    std::uint64_t split_seed() const { return mix_seed(seed, 1); }
    std::uint64_t synthetic_seed() const { return mix_seed(seed, 2); }
    std::uint64_t subsample_seed() const { return mix_seed(seed, 3); }
    std::uint64_t train_seed() const { return mix_seed(seed, 4); }

    void validate() const {
        if (feature_mode != FeatureMode::synthetic) {
            if (features_path.empty()) throw ConfigurationError("features.path is required for precomputed features");
            if (!std::filesystem::is_regular_file(features_path))
                throw ConfigurationError("features file '" + features_path.string() + "' does not exist");
        }
        if (feature_mode == FeatureMode::synthetic && synthetic.samples < 4)
            throw ConfigurationError("synthetic.samples must be >= 4");
        if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigurationError("split.test_fraction must lie in (0, 1)");
        if (photons < 1 || modes < 2) throw ConfigurationError("circuit needs >= 1 photon and >= 2 modes");
        noise.validate();
        train.validate();
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigurationError(where + " must be a JSON object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!keys.count(key)) throw ConfigurationError("unknown key '" + key + "' in " + where);
}

}  // namespace detail

inline nlohmann::json effective_json(const RunConfig& c) {
    const auto& t = c.train;
    return {{"seed", c.seed},
            {"features",
             {{"mode", to_string(c.feature_mode)}, {"path", c.features_path.string()}, {"subsample", c.subsample}}},
            {"synthetic", {{"samples", c.synthetic.samples}, {"separation", c.synthetic.separation}}},
            {"split", {{"test_fraction", c.test_fraction}}},
            {"circuit",
             {{"modes", c.modes},
              {"photons", c.photons},
              {"phases_per_block", c.phases_per_block},
              {"detector", to_string(c.detector)}}},
            {"noise", to_json(c.noise)},
            {"backend", t.exact ? "exact" : "shots"},
            {"train",
             {{"iterations", t.iterations},
              {"batches", t.batches},
              {"shots", t.shots},
              {"alpha", t.alpha},
              {"repeats", t.repeats},
              {"lambda_optimizer", to_string(t.lambda_optimizer)},
              {"shot_convention", to_string(t.shot_convention)},
              {"gp",
               {{"initial_points", t.gp.initial_points},
                {"candidates", t.gp.candidates},
                {"length_scale", t.gp.length_scale},
                {"jitter", t.gp.jitter}}},
              {"nelder_mead",
               {{"tolerance", t.nelder_mead.tolerance},
                {"max_iterations", t.nelder_mead.max_iterations},
                {"initial_step", t.nelder_mead.initial_step},
                {"restarts", t.nelder_mead.restarts}}}}},
            {"output_dir", c.output_dir.string()}};
}

inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    RunConfig c;
    c.source = j;
    try {
        detail::reject_unknown(j, {"seed", "features", "synthetic", "split", "circuit", "noise", "backend", "train", "output_dir"},
                               "config");
        c.seed = j.value("seed", c.seed);
        auto resolve_path = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        };
        if (j.contains("features")) {
            const auto& f = j.at("features");
            detail::reject_unknown(f, {"mode", "path", "subsample"}, "features");
            c.feature_mode = feature_mode_from_string(f.value("mode", std::string("synthetic")));
            if (f.contains("path")) c.features_path = resolve_path(f.at("path").get<std::string>());
            c.subsample = f.value("subsample", c.subsample);
        }
        if (j.contains("synthetic")) {
            const auto& s = j.at("synthetic");
            detail::reject_unknown(s, {"samples", "separation"}, "synthetic");
            c.synthetic.samples = s.value("samples", c.synthetic.samples);
            c.synthetic.separation = s.value("separation", c.synthetic.separation);
        }
        if (j.contains("split")) {
            detail::reject_unknown(j.at("split"), {"test_fraction"}, "split");
            c.test_fraction = j.at("split").value("test_fraction", c.test_fraction);
        }
        if (j.contains("circuit")) {
            const auto& s = j.at("circuit");
            detail::reject_unknown(s, {"modes", "photons", "phases_per_block", "detector"}, "circuit");
            c.modes = s.value("modes", c.modes);
            c.photons = s.value("photons", c.photons);
            c.phases_per_block = s.value("phases_per_block", c.phases_per_block);
            c.detector = detector_from_string(s.value("detector", std::string("pnr")));
        }
        if (j.contains("noise")) {
            detail::reject_unknown(j.at("noise"), {"source_loss", "indistinguishability"}, "noise");
            c.noise = noise_from_json(j.at("noise"));
        }
        if (j.contains("backend")) {
            const auto b = j.at("backend").get<std::string>();
            if (b != "exact" && b != "shots") throw ConfigurationError("backend must be 'exact' or 'shots'");
            c.train.exact = b == "exact";
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            detail::reject_unknown(t, {"iterations", "batches", "shots", "alpha", "repeats", "lambda_optimizer",
                                       "shot_convention", "gp", "nelder_mead"},
                                   "train");
            c.train.iterations = t.value("iterations", c.train.iterations);
            c.train.batches = t.value("batches", c.train.batches);
            c.train.shots = t.value("shots", c.train.shots);
            c.train.alpha = t.value("alpha", c.train.alpha);
            c.train.repeats = t.value("repeats", c.train.repeats);
            if (t.contains("lambda_optimizer"))
                c.train.lambda_optimizer = lambda_optimizer_from_string(t.at("lambda_optimizer").get<std::string>());
            if (t.contains("shot_convention"))
                c.train.shot_convention = shot_convention_from_string(t.at("shot_convention").get<std::string>());
            if (t.contains("gp")) {
                const auto& g = t.at("gp");
                detail::reject_unknown(g, {"initial_points", "candidates", "length_scale", "jitter"}, "train.gp");
                c.train.gp.initial_points = g.value("initial_points", c.train.gp.initial_points);
                c.train.gp.candidates = g.value("candidates", c.train.gp.candidates);
                c.train.gp.length_scale = g.value("length_scale", c.train.gp.length_scale);
                c.train.gp.jitter = g.value("jitter", c.train.gp.jitter);
            }
            if (t.contains("nelder_mead")) {
                const auto& n = t.at("nelder_mead");
                detail::reject_unknown(n, {"tolerance", "max_iterations", "initial_step", "restarts"}, "train.nelder_mead");
                c.train.nelder_mead.tolerance = n.value("tolerance", c.train.nelder_mead.tolerance);
                c.train.nelder_mead.max_iterations = n.value("max_iterations", c.train.nelder_mead.max_iterations);
                c.train.nelder_mead.initial_step = n.value("initial_step", c.train.nelder_mead.initial_step);
                c.train.nelder_mead.restarts = n.value("restarts", c.train.nelder_mead.restarts);
            }
        }
        if (j.contains("output_dir")) c.output_dir = resolve_path(j.at("output_dir").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigurationError("config file '" + path.string() + "' does not exist");
    std::ifstream in(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigurationError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

}  // namespace polyqc
