#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"
#include "polyqc/fock.hpp"
#include "polyqc/interferometer.hpp"
#include "polyqc/parallel.hpp"
#include "polyqc/simulator.hpp"

namespace polyqc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_phase(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

// Exact probabilities, or a finite number of shots drawn with `seed`.
struct ExactBackend {};
struct ShotBackend {
    std::uint64_t shots = 50'000;
    std::uint64_t seed = 0;
    ShotConvention convention = ShotConvention::post_selected;
};
using Backend = std::variant<ExactBackend, ShotBackend>;

// f(x) = sum_s lambda_s P(s | U(theta, x) |n_in>), with P the (noisy)
// outcome distribution under the chosen detector.
class VqcModel {
public:
    VqcModel(CircuitSpec spec, FockState input_state, NoiseModel noise = {}, Detector detector = Detector::pnr)
        : spec_(std::move(spec)),
          input_(std::move(input_state)),
          noise_(noise),
          outcomes_(make_basis(input_.photons(), spec_.modes()), detector),
          theta1_(static_cast<std::size_t>(spec_.theta1_size()), 0.0),
          theta2_(static_cast<std::size_t>(spec_.theta2_size()), 0.0),
          lambda_(outcomes_.size(), 0.0) {
        noise_.validate();
        if (static_cast<int>(input_.modes()) != spec_.modes())
            throw ConfigurationError("input state has " + std::to_string(input_.modes()) +
                                     " modes, circuit has " + std::to_string(spec_.modes()));
        if (noise_.indistinguishability < 1.0 && !input_.is_single_photon())
            throw UnsupportedInputError("noisy source needs a single-photon input state");
    }

    const CircuitSpec& spec() const noexcept { return spec_; }
    const FockState& input_state() const noexcept { return input_; }
    const NoiseModel& noise() const noexcept { return noise_; }
    const OutcomeSpace& outcomes() const noexcept { return outcomes_; }
    const std::vector<double>& theta1() const noexcept { return theta1_; }
    const std::vector<double>& theta2() const noexcept { return theta2_; }
    const std::vector<double>& lambda() const noexcept { return lambda_; }

    // Stored wrapped into [0, 2pi).
    void set_theta(std::span<const double> theta1, std::span<const double> theta2) {
        if (theta1.size() != theta1_.size() || theta2.size() != theta2_.size())
            throw ConfigurationError("theta sizes do not match the circuit");
        for (std::size_t i = 0; i < theta1.size(); ++i) theta1_[i] = wrap_phase(theta1[i]);
        for (std::size_t i = 0; i < theta2.size(); ++i) theta2_[i] = wrap_phase(theta2[i]);
    }

    // Concatenated (theta1, theta2).
    void set_theta(std::span<const double> theta) {
        const auto n1 = theta1_.size();
        if (theta.size() != n1 + theta2_.size()) throw ConfigurationError("theta size does not match the circuit");
        set_theta(theta.first(n1), theta.subspan(n1));
    }

    std::vector<double> theta() const {
        std::vector<double> all(theta1_);
        all.insert(all.end(), theta2_.begin(), theta2_.end());
        return all;
    }

    void set_lambda(std::vector<double> lambda) {
        if (lambda.size() != outcomes_.size())
            throw ConfigurationError("lambda has " + std::to_string(lambda.size()) + " entries, outcome space has " +
                                     std::to_string(outcomes_.size()));
        lambda_ = std::move(lambda);
    }

    UnitaryMatrix unitary(std::span<const double> x) const { return build_unitary(spec_, theta1_, theta2_, x); }

    // Exact outcome probabilities for one data point.
    std::vector<double> outcome_probabilities(std::span<const double> x) const {
        const UnitaryMatrix u = unitary(x);
        const auto& basis = outcomes_.basis_ptr();
        OutputDistribution dist = noise_.indistinguishability >= 1.0 ? ideal_distribution(u, input_, basis)
                                                                     : noisy_distribution(u, input_, basis, noise_);
        return outcomes_.collapse(dist.probabilities);
    }

    // Outcome probabilities under a backend: exact, or empirical frequencies.
    std::vector<double> outcome_estimate(std::span<const double> x, const Backend& backend) const {
        auto p = outcome_probabilities(x);
        if (std::holds_alternative<ExactBackend>(backend)) return p;
        const auto& shots = std::get<ShotBackend>(backend);
        const std::uint64_t events = effective_shots(shots.shots, noise_, input_.photons(), shots.convention);
        if (events == 0) throw SamplingError("no post-selected events survive source loss");
        const auto counts = sample_counts(p, events, shots.seed);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(events);
        return p;
    }

private:
    CircuitSpec spec_;
    FockState input_;
    NoiseModel noise_;
    OutcomeSpace outcomes_;
    std::vector<double> theta1_;
    std::vector<double> theta2_;
    std::vector<double> lambda_;
};

// Photons in modes 0, 2, 4, ... of an m-mode circuit.
inline FockState alternating_input(int modes, int photons) {
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    if (2 * (photons - 1) >= modes) throw ConfigurationError("not enough modes for alternating input");
    for (int k = 0; k < photons; ++k) occ[static_cast<std::size_t>(2 * k)] = 1;
    return FockState(std::move(occ));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double model_eval(const VqcModel& model, std::span<const double> x, const Backend& backend = ExactBackend{}) {
    if (x.size() != static_cast<std::size_t>(model.spec().feature_dim()))
        throw ConfigurationError("feature vector dimension does not match the circuit");
    if (model.lambda().size() != model.outcomes().size())
        throw ConfigurationError("lambda length does not match the outcome space");
    return dot(model.lambda(), model.outcome_estimate(x, backend));
}

// sign(f), with sign(0) = +1.
inline int sign_label(double f) noexcept { return f >= 0.0 ? kVisLabel : kNirLabel; }

inline int predict(const VqcModel& model, std::span<const double> x, const Backend& backend = ExactBackend{}) {
    return sign_label(model_eval(model, x, backend));
}

// One row of outcome probabilities per point. For shot backends the seed of
// point i is derived from (backend seed, i).
inline Eigen::MatrixXd outcome_matrix(const VqcModel& model, std::span<const FeatureVector> points,
                                      const Backend& backend = ExactBackend{}, std::size_t threads = 1) {
    Eigen::MatrixXd p(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(model.outcomes().size()));
    parallel_for(points.size(), threads, [&](std::size_t i) {
        Backend b = backend;
        if (auto* s = std::get_if<ShotBackend>(&b)) s->seed = mix_seed(s->seed, i);
        const auto row = model.outcome_estimate(points[i].values, b);
        for (std::size_t j = 0; j < row.size(); ++j)
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    });
    return p;
}

inline Eigen::VectorXd label_vector(std::span<const FeatureVector> points) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) y(static_cast<Eigen::Index>(i)) = points[i].label;
    return y;
}

// (1/2N) |y - P lambda|^2 + alpha |lambda|^2.
inline double lambda_loss(const Eigen::MatrixXd& p, const Eigen::VectorXd& y, const Eigen::VectorXd& lambda,
                          double alpha) {
    if (p.rows() == 0) throw InvalidArgumentError("loss over an empty dataset");
    const double n = static_cast<double>(p.rows());
    return (y - p * lambda).squaredNorm() / (2.0 * n) + alpha * lambda.squaredNorm();
}

inline double loss(const VqcModel& model, std::span<const FeatureVector> dataset, double alpha,
                   const Backend& backend = ExactBackend{}, std::size_t threads = 1) {
    if (dataset.empty()) throw InvalidArgumentError("loss over an empty dataset");
    const Eigen::Map<const Eigen::VectorXd> lambda(model.lambda().data(),
                                                   static_cast<Eigen::Index>(model.lambda().size()));
    return lambda_loss(outcome_matrix(model, dataset, backend, threads), label_vector(dataset), lambda, alpha);
}

// Closed-form minimizer of the loss in lambda for fixed outcome matrix:
// (P^T P / N + 2 alpha I) lambda = P^T y / N.
inline Eigen::VectorXd ridge_lambda(const Eigen::MatrixXd& p, const Eigen::VectorXd& y, double alpha) {
    if (p.rows() == 0) throw InvalidArgumentError("ridge solve over an empty dataset");
    if (alpha < 0.0) throw InvalidArgumentError("alpha must be non-negative");
    const double n = static_cast<double>(p.rows());
    Eigen::MatrixXd a = p.transpose() * p / n;
    a.diagonal().array() += 2.0 * alpha;
    const Eigen::VectorXd rhs = p.transpose() * y / n;
    if (alpha == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() < a.cols())
            throw SolverError("normal equations are singular (rank " + std::to_string(qr.rank()) + " < " +
                              std::to_string(a.cols()) + "); use alpha > 0");
        return qr.solve(rhs);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw SolverError("regularized normal equations are not positive definite");
    return llt.solve(rhs);
}

inline std::vector<double> ridge_lambda(const VqcModel& model, std::span<const FeatureVector> dataset, double alpha,
                                        std::size_t threads = 1) {
    const Eigen::VectorXd l = ridge_lambda(outcome_matrix(model, dataset, ExactBackend{}, threads),
                                           label_vector(dataset), alpha);
    return {l.data(), l.data() + l.size()};
}

}  // namespace polyqc
