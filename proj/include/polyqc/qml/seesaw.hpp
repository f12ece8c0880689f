#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"
#include "polyqc/metrics.hpp"
#include "polyqc/parallel.hpp"
#include "polyqc/qml/gaussian_process.hpp"
#include "polyqc/qml/nelder_mead.hpp"
#include "polyqc/qml/vqc.hpp"

namespace polyqc {

enum class LambdaOptimizer { nelder_mead, ridge_closed_form };

struct TrainConfig {
    int iterations = 15;
    int batches = 10;                  // training-set executions per iteration (shot accounting)
    std::uint64_t shots = 50'000;      // shots per execution
    bool exact = true;                 // exact probabilities instead of shots
    ShotConvention shot_convention = ShotConvention::post_selected;
    double alpha = 0.01;
    int repeats = 5;
    std::uint64_t seed = 0;
    LambdaOptimizer lambda_optimizer = LambdaOptimizer::nelder_mead;
    std::size_t threads = 1;
    GpOptions gp;
    NelderMeadOptions nelder_mead;

    void validate() const {
        if (iterations < 1) throw ConfigurationError("iterations must be >= 1");
        if (batches < 1) throw ConfigurationError("batches must be >= 1");
        if (repeats < 1) throw ConfigurationError("repeats must be >= 1");
        if (!exact && shots == 0) throw ConfigurationError("shots must be >= 1");
        if (!(alpha >= 0.0)) throw ConfigurationError("alpha must be >= 0");
        if (gp.candidates < 1) throw ConfigurationError("gp candidates must be >= 1");
    }
};

struct RepeatResult {
    std::uint64_t seed = 0;
    std::vector<double> theta1, theta2, lambda;
    std::vector<double> loss_trace;       // loss at the optimized lambda, per iteration
    std::vector<double> best_loss_trace;  // running minimum of loss_trace
    int best_iteration = 0;
    double best_loss = 0.0;
    std::vector<int> train_predictions, test_predictions;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct TrainedResult {
    std::vector<RepeatResult> repeats;
    std::size_t best_repeat = 0;  // lowest training loss
    MeanStd train_accuracy;
    MeanStd test_accuracy;
    double wall_clock_seconds = 0.0;

    const RepeatResult& best() const { return repeats.at(best_repeat); }
};

// Outcome matrix of `points` as the hardware would gather it: the points
// are split into `config.batches` contiguous batches, each one execution of
// `config.shots` shots shared evenly among its points.
inline Eigen::MatrixXd batched_outcome_matrix(const VqcModel& model, std::span<const FeatureVector> points,
                                              const TrainConfig& config, std::uint64_t seed) {
    if (config.exact) return outcome_matrix(model, points, ExactBackend{}, config.threads);
    const std::size_t batches = std::min<std::size_t>(static_cast<std::size_t>(config.batches), points.size());
    Eigen::MatrixXd p(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(model.outcomes().size()));
    std::size_t begin = 0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t size = points.size() / batches + (b < points.size() % batches ? 1 : 0);
        const std::uint64_t per_point = std::max<std::uint64_t>(1, config.shots / size);
        const ShotBackend backend{per_point, mix_seed(seed, b), config.shot_convention};
        p.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(size)) =
            outcome_matrix(model, points.subspan(begin, size), backend, config.threads);
        begin += size;
    }
    return p;
}

inline std::vector<int> predictions_from(const Eigen::MatrixXd& p, std::span<const double> lambda) {
    const Eigen::Map<const Eigen::VectorXd> l(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
    const Eigen::VectorXd f = p * l;
    std::vector<int> out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(f(i));
    return out;
}

inline std::vector<int> labels_of(std::span<const FeatureVector> points) {
    std::vector<int> y;
    y.reserve(points.size());
    for (const auto& p : points) y.push_back(p.label);
    return y;
}

// lambda step for fixed theta.
inline Eigen::VectorXd optimize_lambda(const Eigen::MatrixXd& p, const Eigen::VectorXd& y, double alpha,
                                       const Eigen::VectorXd& warm_start, const TrainConfig& config) {
    if (config.lambda_optimizer == LambdaOptimizer::ridge_closed_form) return ridge_lambda(p, y, alpha);
    const auto objective = [&](std::span<const double> l) {
        const Eigen::Map<const Eigen::VectorXd> lambda(l.data(), static_cast<Eigen::Index>(l.size()));
        return lambda_loss(p, y, lambda, alpha);
    };
    const auto result = nelder_mead(objective, {warm_start.data(), warm_start.data() + warm_start.size()},
                                    config.nelder_mead);
    return Eigen::Map<const Eigen::VectorXd>(result.x.data(), static_cast<Eigen::Index>(result.x.size()));
}

namespace detail {

inline void check_training_data(std::span<const FeatureVector> train, std::span<const FeatureVector> test, int dim) {
    if (train.empty() || test.empty()) throw InvalidDatasetError("train and test splits must be non-empty");
    bool has_pos = false, has_neg = false;
    for (const auto* split : {&train, &test}) {
        for (const auto& v : *split) {
            if (v.label != kVisLabel && v.label != kNirLabel)
                throw InvalidDatasetError("labels must be +1 or -1 (point '" + v.id + "')");
            if (static_cast<int>(v.dim()) != dim)
                throw InvalidDatasetError("point '" + v.id + "' has dimension " + std::to_string(v.dim()) +
                                          ", circuit expects " + std::to_string(dim));
        }
    }
    for (const auto& v : train) (v.label == kVisLabel ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw InvalidDatasetError("training set contains a single class");
}

}  // namespace detail

// Alternating optimization: theta is proposed by Bayesian optimization, and
// for each proposal lambda is fitted on the full training set (warm-started
// from the previous lambda). The GP history records the loss at the fitted
// lambda. Repeated config.repeats times with seeds derived from config.seed.
inline TrainedResult seesaw_train(const VqcModel& model_template, std::span<const FeatureVector> train,
                                  std::span<const FeatureVector> test, const TrainConfig& config) {
    config.validate();
    detail::check_training_data(train, test, model_template.spec().feature_dim());
    const auto start = std::chrono::steady_clock::now();

    const Eigen::VectorXd y = label_vector(train);
    const std::vector<int> train_labels = labels_of(train), test_labels = labels_of(test);
    const std::size_t dims = static_cast<std::size_t>(model_template.spec().trainable_size());
    const auto lambda_size = static_cast<Eigen::Index>(model_template.outcomes().size());

    TrainedResult result;
    for (int r = 0; r < config.repeats; ++r) {
        VqcModel model = model_template;
        RepeatResult run;
        run.seed = mix_seed(config.seed, static_cast<std::uint64_t>(r));

        std::vector<Observation> history;
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(lambda_size);
        std::vector<double> best_theta;
        Eigen::VectorXd best_lambda = lambda;
        double best = std::numeric_limits<double>::infinity();

        for (int it = 0; it < config.iterations; ++it) {
            const Proposal proposal = gp_propose(history, dims, run.seed, config.gp);
            model.set_theta(proposal.theta);
            const Eigen::MatrixXd p = batched_outcome_matrix(model, train, config, mix_seed(run.seed, 1000 + it));
            lambda = optimize_lambda(p, y, config.alpha, lambda, config);
            const double value = lambda_loss(p, y, lambda, config.alpha);
            history.push_back({model.theta(), value});
            run.loss_trace.push_back(value);
            if (value < best) {
                best = value;
                best_theta = model.theta();
                best_lambda = lambda;
                run.best_iteration = it;
            }
            run.best_loss_trace.push_back(best);
        }

        model.set_theta(best_theta);
        model.set_lambda({best_lambda.data(), best_lambda.data() + best_lambda.size()});
        run.theta1 = model.theta1();
        run.theta2 = model.theta2();
        run.lambda = model.lambda();
        run.best_loss = best;

        run.train_predictions =
            predictions_from(batched_outcome_matrix(model, train, config, mix_seed(run.seed, 1)), run.lambda);
        run.test_predictions =
            predictions_from(batched_outcome_matrix(model, test, config, mix_seed(run.seed, 2)), run.lambda);
        run.train_accuracy = accuracy(run.train_predictions, train_labels);
        run.test_accuracy = accuracy(run.test_predictions, test_labels);
        result.repeats.push_back(std::move(run));
    }

    std::vector<double> train_acc, test_acc;
    for (std::size_t i = 0; i < result.repeats.size(); ++i) {
        train_acc.push_back(result.repeats[i].train_accuracy);
        test_acc.push_back(result.repeats[i].test_accuracy);
        if (result.repeats[i].best_loss < result.repeats[result.best_repeat].best_loss) result.best_repeat = i;
    }
    result.train_accuracy = mean_std(train_acc);
    result.test_accuracy = mean_std(test_acc);
    result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// Model carrying the best (theta, lambda) of a training result.
inline VqcModel trained_model(const VqcModel& model_template, const RepeatResult& run) {
    VqcModel model = model_template;
    model.set_theta(run.theta1, run.theta2);
    model.set_lambda(run.lambda);
    return model;
}

}  // namespace polyqc
