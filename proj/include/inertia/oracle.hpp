#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inertia/integrator.hpp"
#include "inertia/problems.hpp"

// Reference implementations used to certify the main code paths. Nothing here
// shares internals with integrator.hpp or solver.hpp: the integrator below is
// a fixed-step classical RK4, the solver a plain proximal-gradient loop, and
// the trajectories come straight from the closed-form formulas.

namespace inertia::oracle {

enum class ReferenceKind { closed_form, long_solve, tiny_step };

struct ReferenceMinimum {
    double min_value = 0.0;
    Vec minimizer;
    double certificate = 0.0;  // prox-gradient-mapping norm at the minimizer
    bool certified = false;
    long iterations_used = 0;
};

/// Exact (x(t), xdot(t)) for the closed-form families.
/// Families: exp-decay {alpha}, inverse-power {theta, alpha},
/// power-gamma {gamma, alpha}, free-decay {alpha, t0, x0, v0}.
inline std::pair<Vec, Vec> closed_form_trajectory(const std::string& family,
                                                  const std::map<std::string, double>& params,
                                                  double t) {
    auto need = [&](const std::string& key) {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("closed_form_trajectory: missing param '" + key + "'");
        return it->second;
    };
    if (!(t > 0.0)) throw std::invalid_argument("closed_form_trajectory: t must be > 0");

    if (family == "exp-decay") {
        const double alpha = need("alpha");
        if (!(alpha >= 1.0)) throw std::invalid_argument("exp-decay: requires alpha >= 1");
        return {Vec{std::log(t)}, Vec{1.0 / t}};
    }
    if (family == "inverse-power") {
        const double theta = need("theta");
        const double alpha = need("alpha");
        if (!(theta > 0.0)) throw std::invalid_argument("inverse-power: requires theta > 0");
        if (!(alpha >= theta / (2.0 + theta)))
            throw std::invalid_argument("inverse-power: requires alpha >= theta/(2+theta)");
        const double e = 2.0 / (2.0 + theta);
        return {Vec{std::pow(t, e)}, Vec{e * std::pow(t, e - 1.0)}};
    }
    if (family == "power-gamma") {
        const double g = need("gamma");
        const double alpha = need("alpha");
        if (!(g > 2.0)) throw std::invalid_argument("power-gamma: requires gamma > 2");
        if (!(alpha > g / (g - 2.0)))
            throw std::invalid_argument("power-gamma: requires alpha > gamma/(gamma-2)");
        const double theta = 2.0 / (g - 2.0);
        return {Vec{std::pow(t, -theta)}, Vec{-theta * std::pow(t, -theta - 1.0)}};
    }
    if (family == "free-decay") {
        const double alpha = need("alpha");
        const double t0 = need("t0");
        const double x0 = need("x0");
        const double v0 = need("v0");
        if (!(alpha > 1.0)) throw std::invalid_argument("free-decay: requires alpha > 1");
        if (!(t0 > 0.0) || !(t >= t0)) throw std::invalid_argument("free-decay: requires t >= t0 > 0");
        const double x = x0 + v0 * std::pow(t0, alpha) *
                                  (std::pow(t0, 1.0 - alpha) - std::pow(t, 1.0 - alpha)) /
                                  (alpha - 1.0);
        return {Vec{x}, Vec{v0 * std::pow(t0 / t, alpha)}};
    }
    throw std::invalid_argument("closed_form_trajectory: unknown family '" + family + "'");
}

/// High-budget plain proximal-gradient solve at gamma = 1/(2L). The result is
/// certified when the prox-gradient mapping norm drops below 1e-10.
inline ReferenceMinimum reference_minimum(const CompositeProblem& problem, long budget) {
    const auto L = problem.smooth.lipschitz_constant;
    if (!L || *L < 0.0)
        throw std::invalid_argument("reference_minimum: " + problem.id +
                                    " carries no Lipschitz constant");
    ReferenceMinimum res;
    if (*L == 0.0) {  // objective is flat in the smooth part
        Vec x = problem.suggested_x0.empty() ? Vec(problem.dim(), 0.0) : problem.suggested_x0;
        if (problem.nonsmooth) x = problem.nonsmooth->prox_at(1.0, x);
        res.minimizer = x;
        const ExtReal fv = value(problem, x);
        res.min_value = fv.value;
        res.certified = true;
        return res;
    }
    const double gamma = 1.0 / (2.0 * *L);
    Vec x(problem.dim(), 0.0);
    auto forward_backward = [&](const Vec& z) {
        Vec g = problem.smooth.gradient_at(z);
        Vec inner(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) inner[i] = z[i] - gamma * g[i];
        return problem.nonsmooth ? problem.nonsmooth->prox_at(gamma, inner) : inner;
    };
    const double target = 1e-10;
    double mapping_norm = std::numeric_limits<double>::infinity();
    long it = 0;
    for (; it < budget; ++it) {
        Vec xn = forward_backward(x);
        mapping_norm = norm2(sub(x, xn)) / gamma;
        x = std::move(xn);
        if (mapping_norm <= target) {
            ++it;
            break;
        }
    }
    res.minimizer = x;
    const ExtReal fv = value(problem, x);
    res.min_value = fv.value;
    res.certificate = mapping_norm;
    res.certified = mapping_norm <= target;
    res.iterations_used = it;
    return res;
}

/// Memoized reference minima, keyed by problem id (which encodes family,
/// params and seed). Long solves are expensive and instances are immutable.
inline const ReferenceMinimum& reference_minimum_cached(const CompositeProblem& problem,
                                                        long budget = 1000000) {
    static std::map<std::string, ReferenceMinimum> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(problem.id);
    if (it != cache.end()) return it->second;
    return cache.emplace(problem.id, reference_minimum(problem, budget)).first->second;
}

/// Fixed-step classical RK4 cross-check for the adaptive integrator. The
/// nominal resolution is (t_end - t0)/1e6; steps are re-aligned so every
/// requested sample time is hit exactly. Meant for short horizons only.
inline std::vector<State> tiny_step_integrate(const CompositeProblem& problem, double alpha,
                                              double t0, const Vec& x0, const Vec& v0, double t_end,
                                              const std::vector<double>& sample_times,
                                              long nominal_steps = 1000000) {
    if (problem.nonsmooth)
        throw std::invalid_argument("tiny_step_integrate: smooth problems only");
    if (!(t0 > 0.0) || !(t_end > t0))
        throw std::invalid_argument("tiny_step_integrate: requires t_end > t0 > 0");
    const std::size_t d = problem.dim();
    check_dim(x0, d, "tiny_step_integrate x0");
    check_dim(v0, d, "tiny_step_integrate v0");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw std::invalid_argument("tiny_step_integrate: sample times must increase");
    if (!sample_times.empty() &&
        (sample_times.front() < t0 || sample_times.back() > t_end))
        throw std::invalid_argument("tiny_step_integrate: sample times outside [t0, t_end]");

    const double h_nominal = (t_end - t0) / static_cast<double>(nominal_steps);
    long total_steps = 0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double lo = i == 0 ? t0 : sample_times[i - 1];
        total_steps += static_cast<long>(std::ceil((sample_times[i] - lo) / h_nominal));
    }
    if (total_steps > 2 * nominal_steps)
        throw std::invalid_argument(
            "tiny_step_integrate: step budget exceeded; shorten the horizon");

    Vec x = x0, v = v0;
    auto deriv = [&](double t, const Vec& xx, const Vec& vv, Vec& dx, Vec& dv) {
        Vec g = problem.smooth.gradient_at(xx);
        const double damping = alpha / t;
        dx = vv;
        for (std::size_t i = 0; i < d; ++i) dv[i] = -damping * vv[i] - g[i];
    };
    Vec k1x(d), k1v(d), k2x(d), k2v(d), k3x(d), k3v(d), k4x(d), k4v(d), tx(d), tv(d);

    std::vector<State> out;
    out.reserve(sample_times.size());
    double t = t0;
    for (double ts : sample_times) {
        if (ts == t) {
            out.push_back({t, x, v});
            continue;
        }
        const long steps = static_cast<long>(std::ceil((ts - t) / h_nominal));
        const double h = (ts - t) / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            deriv(t, x, v, k1x, k1v);
            for (std::size_t i = 0; i < d; ++i) tx[i] = x[i] + 0.5 * h * k1x[i], tv[i] = v[i] + 0.5 * h * k1v[i];
            deriv(t + 0.5 * h, tx, tv, k2x, k2v);
            for (std::size_t i = 0; i < d; ++i) tx[i] = x[i] + 0.5 * h * k2x[i], tv[i] = v[i] + 0.5 * h * k2v[i];
            deriv(t + 0.5 * h, tx, tv, k3x, k3v);
            for (std::size_t i = 0; i < d; ++i) tx[i] = x[i] + h * k3x[i], tv[i] = v[i] + h * k3v[i];
            deriv(t + h, tx, tv, k4x, k4v);
            for (std::size_t i = 0; i < d; ++i) {
                x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            t += h;
        }
        t = ts;
        out.push_back({t, x, v});
    }
    return out;
}

}  // namespace inertia::oracle
