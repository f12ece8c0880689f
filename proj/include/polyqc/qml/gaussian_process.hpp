#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polyqc/errors.hpp"
#include "polyqc/parallel.hpp"

namespace polyqc {

// Bayesian optimization of the loss landscape over theta in [0, 2pi)^d.
struct GpOptions {
    int initial_points = 5;    // quasi-random proposals before the surrogate is used
    int candidates = 256;      // random candidates scored by expected improvement
    double length_scale = 1.0; // on theta / 2pi coordinates
    double jitter = 1e-6;
};

struct Observation {
    std::vector<double> theta;
    double loss = 0.0;
};

struct Proposal {
    std::vector<double> theta;
    double expected_improvement = 0.0;  // 0 for quasi-random proposals
    bool from_surrogate = false;
};

namespace detail {

inline std::vector<int> first_primes(std::size_t count) {
    std::vector<int> primes;
    for (int candidate = 2; primes.size() < count; ++candidate) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > candidate) break;
            if (candidate % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(candidate);
    }
    return primes;
}

inline double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
        index /= static_cast<std::uint64_t>(base);
        f /= base;
    }
    return result;
}

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detail

// Point `index` of a Halton sequence with a seeded random shift per
// dimension, scaled to [0, 2pi).
inline std::vector<double> quasi_random_point(std::size_t dims, std::uint64_t index, std::uint64_t seed) {
    const auto primes = detail::first_primes(dims);
    std::mt19937_64 rng(mix_seed(seed, 0x4A17));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> point(dims);
    for (std::size_t k = 0; k < dims; ++k) {
        const double u = detail::radical_inverse(index + 1, primes[k]) + unit(rng);
        point[k] = 2.0 * std::numbers::pi * (u - std::floor(u));
    }
    return point;
}

// Uniform candidates in [0, 2pi)^dims.
inline std::vector<std::vector<double>> candidate_points(std::size_t dims, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<std::vector<double>> points(count, std::vector<double>(dims));
    for (auto& p : points)
        for (auto& v : p) v = angle(rng);
    return points;
}

// Expected improvement below `best` for a Gaussian prediction.
inline double expected_improvement(double mean, double sd, double best) {
    const double gain = best - mean;
    if (sd <= 0.0) return std::max(gain, 0.0);
    const double z = gain / sd;
    return gain * detail::normal_cdf(z) + sd * detail::normal_pdf(z);
}

// Zero-mean GP with a unit-variance squared-exponential kernel on
// theta / 2pi coordinates, fitted to standardized losses.
class GaussianProcess {
public:
    GaussianProcess(std::span<const Observation> history, double length_scale, double jitter)
        : length_scale_(length_scale) {
        if (history.empty()) throw InvalidHistoryError("cannot fit a surrogate to an empty history");
        const std::size_t dims = history.front().theta.size();
        const auto n = static_cast<Eigen::Index>(history.size());
        x_.resize(n, static_cast<Eigen::Index>(dims));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& obs = history[static_cast<std::size_t>(i)];
            if (obs.theta.size() != dims) throw InvalidHistoryError("history entries have inconsistent theta dimensions");
            if (!std::isfinite(obs.loss)) throw InvalidHistoryError("history contains a non-finite loss");
            for (std::size_t k = 0; k < dims; ++k) x_(i, static_cast<Eigen::Index>(k)) = obs.theta[k] / (2.0 * std::numbers::pi);
            y(i) = obs.loss;
        }
        mean_ = y.mean();
        const double var = (y.array() - mean_).square().mean();
        scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
        y_std_ = (y.array() - mean_) / scale_;

        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kernel(x_.row(i), x_.row(j));
        k.diagonal().array() += jitter;
        llt_.compute(k);
        if (llt_.info() != Eigen::Success) throw SolverError("surrogate kernel matrix is not positive definite");
        alpha_ = llt_.solve(y_std_);
    }

    std::size_t dims() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    // Standardized best observed loss.
    double best() const { return y_std_.minCoeff(); }

    // Posterior mean and standard deviation in standardized units.
    std::pair<double, double> predict(std::span<const double> theta) const {
        if (theta.size() != dims()) throw InvalidHistoryError("query dimension differs from the history");
        Eigen::RowVectorXd q(x_.cols());
        for (Eigen::Index k = 0; k < x_.cols(); ++k) q(k) = theta[static_cast<std::size_t>(k)] / (2.0 * std::numbers::pi);
        Eigen::VectorXd ks(x_.rows());
        for (Eigen::Index i = 0; i < x_.rows(); ++i) ks(i) = kernel(x_.row(i), q);
        const double mean = ks.dot(alpha_);
        const Eigen::VectorXd v = llt_.matrixL().solve(ks);
        const double var = 1.0 - v.squaredNorm();
        return {mean, std::sqrt(std::max(var, 0.0))};
    }

    double expected_improvement(std::span<const double> theta) const {
        const auto [mean, sd] = predict(theta);
        return polyqc::expected_improvement(mean, sd, best());
    }

    // Maps a standardized value back to loss units.
    double to_loss(double standardized) const { return mean_ + scale_ * standardized; }

private:
    template <class A, class B>
    double kernel(const A& a, const B& b) const {
        return std::exp(-0.5 * (a - b).squaredNorm() / (length_scale_ * length_scale_));
    }

    double length_scale_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_std_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double mean_ = 0.0;
    double scale_ = 1.0;
};

// Candidate set scored by gp_propose for a history of the given size.
inline std::vector<std::vector<double>> surrogate_candidates(std::size_t dims, std::size_t history_size,
                                                             std::uint64_t seed, const GpOptions& options = {}) {
    return candidate_points(dims, static_cast<std::size_t>(options.candidates), mix_seed(seed, history_size));
}

// Next theta to try: quasi-random while the history is short, otherwise
// the expected-improvement maximizer over seeded random candidates.
inline Proposal gp_propose(std::span<const Observation> history, std::size_t dims, std::uint64_t seed,
                           const GpOptions& options = {}) {
    if (dims == 0) throw InvalidArgumentError("theta must have at least one dimension");
    for (const auto& obs : history)
        if (obs.theta.size() != dims) throw InvalidHistoryError("history entries have inconsistent theta dimensions");

    if (history.size() < static_cast<std::size_t>(options.initial_points))
        return {quasi_random_point(dims, history.size(), seed), 0.0, false};

    const GaussianProcess gp(history, options.length_scale, options.jitter);
    const auto candidates = surrogate_candidates(dims, history.size(), seed, options);
    Proposal best{candidates.front(), -1.0, true};
    for (const auto& c : candidates) {
        const double ei = gp.expected_improvement(c);
        if (ei > best.expected_improvement) best = {c, ei, true};
    }
    return best;
}

}  // namespace polyqc
