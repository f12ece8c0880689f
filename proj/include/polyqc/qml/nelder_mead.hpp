#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "polyqc/errors.hpp"

namespace polyqc {

struct NelderMeadOptions {
    double tolerance = 1e-12;   // stop when max f - min f over the simplex drops below this
    int max_iterations = 200'000;
    double initial_step = 0.5;  // edge length of the axis-aligned starting simplex
    int restarts = 8;           // rebuild the simplex at the incumbent up to this many times
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

// One simplex run with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
inline NelderMeadResult nelder_mead_once(const Objective& f, std::vector<double> x0, double step,
                                         double tolerance, int max_iterations, int& evaluations) {
    const std::size_t d = x0.size();
    auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = f(x);
        if (!std::isfinite(v)) throw DivergedError("Nelder-Mead objective returned a non-finite value");
        return v;
    };

    std::vector<std::vector<double>> simplex(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += step;
    std::vector<double> values(d + 1);
    for (std::size_t i = 0; i <= d; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    auto along = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
        // out = centroid + t * (centroid - from)
        for (std::size_t k = 0; k < d; ++k) out[k] = centroid[k] + t * (centroid[k] - from[k]);
    };

    int iteration = 0;
    bool converged = false;
    for (; iteration < max_iterations; ++iteration) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
        if (values[worst] - values[best] < tolerance) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[order[i]][k];
        for (auto& c : centroid) c /= static_cast<double>(d);

        along(1.0, simplex[worst], trial);
        const double reflected = eval(trial);
        if (reflected < values[best]) {
            along(2.0, simplex[worst], trial2);
            const double expanded = eval(trial2);
            if (expanded < reflected) {
                simplex[worst] = trial2;
                values[worst] = expanded;
            } else {
                simplex[worst] = trial;
                values[worst] = reflected;
            }
            continue;
        }
        if (reflected < values[second]) {
            simplex[worst] = trial;
            values[worst] = reflected;
            continue;
        }
        if (reflected < values[worst]) {
            along(0.5, simplex[worst], trial2);  // outside contraction
            const double contracted = eval(trial2);
            if (contracted <= reflected) {
                simplex[worst] = trial2;
                values[worst] = contracted;
                continue;
            }
        } else {
            along(-0.5, simplex[worst], trial2);  // inside contraction
            const double contracted = eval(trial2);
            if (contracted < values[worst]) {
                simplex[worst] = trial2;
                values[worst] = contracted;
                continue;
            }
        }
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], iteration, 0, converged};
}

}  // namespace detail

// Derivative-free simplex minimization. After a run converges the simplex
// is rebuilt around the incumbent with a smaller step; this stops once a
// restart no longer improves the value by more than the tolerance.
inline NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {}) {
    if (x0.empty()) throw InvalidArgumentError("Nelder-Mead needs at least one dimension");
    int evaluations = 0;
    int iterations = 0;
    double step = options.initial_step;
    NelderMeadResult result =
        detail::nelder_mead_once(f, std::move(x0), step, options.tolerance, options.max_iterations, evaluations);
    iterations += result.iterations;
    for (int r = 0; r < options.restarts && iterations < options.max_iterations; ++r) {
        step *= 0.5;
        auto next = detail::nelder_mead_once(f, result.x, step, options.tolerance, options.max_iterations - iterations,
                                             evaluations);
        iterations += next.iterations;
        const bool improved = next.value < result.value - options.tolerance;
        if (next.value < result.value) result = std::move(next);
        if (!improved) break;
    }
    result.iterations = iterations;
    result.evaluations = evaluations;
    return result;
}

}  // namespace polyqc
