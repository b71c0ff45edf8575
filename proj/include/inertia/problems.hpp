#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "inertia/linalg.hpp"

namespace inertia {

/// Extended real for nonsmooth terms (indicator functions). Infinity is an
/// explicit marker, never a sentinel double.
struct ExtReal {
    double value = 0.0;
    bool infinite = false;

    static ExtReal finite(double v) { return {v, false}; }
    static ExtReal infinity() { return {0.0, true}; }
};

struct SmoothTerm {
    std::size_t dimension = 0;
    std::function<double(const Vec&)> value_at;
    std::function<Vec(const Vec&)> gradient_at;
    std::optional<double> lipschitz_constant;
    std::optional<double> strong_convexity_modulus;
};

struct ProxTerm {
    std::function<ExtReal(const Vec&)> value_at;
    std::function<Vec(double, const Vec&)> prox_at;  // (step gamma, point)
};

/// Exact solution of the damped flow, valid for one specific damping alpha.
struct ClosedFormTrajectory {
    double alpha = 0.0;
    std::function<std::pair<Vec, Vec>(double)> at;  // t -> (x, xdot)
};

struct CompositeProblem {
    std::string id;
    SmoothTerm smooth;
    std::optional<ProxTerm> nonsmooth;
    std::optional<double> known_min_value;
    std::optional<Vec> known_minimizer;
    bool argmin_known_empty = false;  // inf is approached but never attained
    std::optional<ClosedFormTrajectory> closed_form;
    Vec suggested_x0;

    // metadata for the smooth part alone, filled by the catalog when the
    // nonsmooth term hides a computable smooth minimum
    std::optional<double> smooth_min_value;
    std::optional<Vec> smooth_minimizer;

    std::size_t dim() const { return smooth.dimension; }
};

inline double soft_threshold(double threshold, double x) {
    if (x > threshold) return x - threshold;
    if (x < -threshold) return x + threshold;
    return 0.0;
}

inline Vec soft_threshold(double threshold, const Vec& x) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
    Vec p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = soft_threshold(threshold, x[i]);
    return p;
}

inline ExtReal value(const CompositeProblem& p, const Vec& x) {
    check_dim(x, p.dim(), "value");
    const double f = p.smooth.value_at(x);
    if (!p.nonsmooth) return ExtReal::finite(f);
    const ExtReal g = p.nonsmooth->value_at(x);
    if (g.infinite) return ExtReal::infinity();
    return ExtReal::finite(f + g.value);
}

/// Objective gap F(x) - min F. Tiny negative values (within -1e-12) are
/// rounded up to zero; anything lower means the reference minimum is wrong.
inline double gap(const CompositeProblem& p, const Vec& x,
                  std::optional<double> reference_min = std::nullopt) {
    double fmin;
    if (reference_min)
        fmin = *reference_min;
    else if (p.known_min_value)
        fmin = *p.known_min_value;
    else
        throw std::invalid_argument("gap: no reference minimum available for problem " + p.id);
    const ExtReal fx = value(p, x);
    if (fx.infinite) return std::numeric_limits<double>::infinity();
    const double raw = fx.value - fmin;
    if (raw < -1e-12)
        throw std::domain_error("gap: value undercuts the reference minimum by " +
                                std::to_string(-raw) + " on problem " + p.id);
    return raw < 0.0 ? 0.0 : raw;
}

/// Drops the nonsmooth term; the continuous-time dynamics only see this part.
inline CompositeProblem smooth_surrogate(const CompositeProblem& p) {
    if (!p.nonsmooth) return p;
    CompositeProblem s;
    s.id = p.id + "/smooth";
    s.smooth = p.smooth;
    s.known_min_value = p.smooth_min_value;
    s.known_minimizer = p.smooth_minimizer;
    s.suggested_x0 = p.suggested_x0;
    return s;
}

namespace detail {

inline double param_or(const std::map<std::string, double>& params, const std::string& key,
                       double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

inline std::string format_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

struct LassoData {
    Matrix A;
    Vec b;
    double lambda = 0.0;
};

}  // namespace detail

/// Benchmark catalog. Families: zero, quadratic, power-gamma, exp-decay,
/// inverse-power, lasso, box-qp. Closed-form metadata is filled where the
/// analysis provides it.
inline CompositeProblem catalog(const std::string& name,
                                const std::map<std::string, double>& params = {}) {
    using detail::param_or;
    CompositeProblem p;

    if (name == "zero") {
        const auto dim = static_cast<std::size_t>(param_or(params, "dim", 3));
        if (dim == 0) throw std::invalid_argument("zero: dim must be >= 1");
        p.id = "zero(dim=" + std::to_string(dim) + ")";
        p.smooth.dimension = dim;
        p.smooth.value_at = [](const Vec&) { return 0.0; };
        p.smooth.gradient_at = [dim](const Vec&) { return Vec(dim, 0.0); };
        p.smooth.lipschitz_constant = 0.0;
        p.known_min_value = 0.0;
        p.known_minimizer = Vec(dim, 0.0);
        p.suggested_x0 = Vec(dim, 1.0);
        return p;
    }

    if (name == "quadratic") {
        const auto dim = static_cast<std::size_t>(param_or(params, "dim", 1));
        const double mu = param_or(params, "mu", 1.0);
        const double spread = param_or(params, "spread", 1.0);
        if (dim == 0) throw std::invalid_argument("quadratic: dim must be >= 1");
        if (!(mu > 0.0)) throw std::invalid_argument("quadratic: mu must be > 0");
        if (!(spread >= 1.0)) throw std::invalid_argument("quadratic: spread must be >= 1");
        auto diag = std::make_shared<Vec>(dim);
        for (std::size_t i = 0; i < dim; ++i)
            (*diag)[i] = dim == 1 ? mu
                                  : mu * std::pow(spread, static_cast<double>(i) /
                                                              static_cast<double>(dim - 1));
        p.id = "quadratic(dim=" + std::to_string(dim) + ",mu=" + detail::format_num(mu) +
               ",spread=" + detail::format_num(spread) + ")";
        p.smooth.dimension = dim;
        p.smooth.value_at = [diag](const Vec& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += (*diag)[i] * x[i] * x[i];
            return 0.5 * s;
        };
        p.smooth.gradient_at = [diag](const Vec& x) {
            Vec g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = (*diag)[i] * x[i];
            return g;
        };
        p.smooth.lipschitz_constant = mu * spread;
        p.smooth.strong_convexity_modulus = mu;
        p.known_min_value = 0.0;
        p.known_minimizer = Vec(dim, 0.0);
        p.suggested_x0 = Vec(dim, 1.0);
        return p;
    }

    if (name == "power-gamma") {
        // f(x) = c|x|^g with c chosen so that x(t) = t^(-theta) solves the
        // damped flow: theta = 2/(g-2), c = (2/(g(g-2)))(alpha - g/(g-2)).
        const double g = param_or(params, "gamma", 4.0);
        const double alpha = param_or(params, "alpha", 5.0);
        if (!(g > 2.0))
            throw std::invalid_argument("power-gamma: requires gamma > 2 (got " +
                                        detail::format_num(g) + ")");
        const double alpha_min = g / (g - 2.0);
        if (!(alpha > alpha_min))
            throw std::invalid_argument("power-gamma: requires alpha > gamma/(gamma-2) = " +
                                        detail::format_num(alpha_min) + " (got " +
                                        detail::format_num(alpha) + ")");
        const double theta = 2.0 / (g - 2.0);
        const double c = 2.0 / (g * (g - 2.0)) * (alpha - alpha_min);
        p.id = "power-gamma(gamma=" + detail::format_num(g) + ",alpha=" + detail::format_num(alpha) + ")";
        p.smooth.dimension = 1;
        p.smooth.value_at = [c, g](const Vec& x) { return c * std::pow(std::abs(x[0]), g); };
        p.smooth.gradient_at = [c, g](const Vec& x) {
            return Vec{c * g * std::pow(std::abs(x[0]), g - 2.0) * x[0]};
        };
        p.known_min_value = 0.0;
        p.known_minimizer = Vec{0.0};
        p.closed_form = ClosedFormTrajectory{
            alpha, [theta](double t) {
                return std::make_pair(Vec{std::pow(t, -theta)}, Vec{-theta * std::pow(t, -theta - 1.0)});
            }};
        p.suggested_x0 = Vec{1.0};
        return p;
    }

    if (name == "exp-decay") {
        // f(x) = ((alpha-1)/2) e^(-2x); x(t) = ln t solves the flow. The
        // infimum 0 is never attained.
        const double alpha = param_or(params, "alpha", 3.0);
        if (!(alpha >= 1.0))
            throw std::invalid_argument("exp-decay: requires alpha >= 1 (got " +
                                        detail::format_num(alpha) + ")");
        const double c = 0.5 * (alpha - 1.0);
        p.id = "exp-decay(alpha=" + detail::format_num(alpha) + ")";
        p.smooth.dimension = 1;
        p.smooth.value_at = [c](const Vec& x) { return c * std::exp(-2.0 * x[0]); };
        p.smooth.gradient_at = [c](const Vec& x) { return Vec{-2.0 * c * std::exp(-2.0 * x[0])}; };
        p.known_min_value = 0.0;
        p.argmin_known_empty = true;
        p.closed_form = ClosedFormTrajectory{
            alpha, [](double t) { return std::make_pair(Vec{std::log(t)}, Vec{1.0 / t}); }};
        p.suggested_x0 = Vec{0.0};
        return p;
    }

    if (name == "inverse-power") {
        // f(x) = c x^(-theta) on x > 0; x(t) = t^(2/(2+theta)) solves the
        // flow with c = 2(2 alpha + theta(alpha-1)) / (theta (2+theta)^2).
        const double theta = param_or(params, "theta", 2.0);
        const double alpha = param_or(params, "alpha", 3.0);
        if (!(theta > 0.0))
            throw std::invalid_argument("inverse-power: requires theta > 0 (got " +
                                        detail::format_num(theta) + ")");
        const double alpha_min = theta / (2.0 + theta);
        if (!(alpha >= alpha_min))
            throw std::invalid_argument("inverse-power: requires alpha >= theta/(2+theta) = " +
                                        detail::format_num(alpha_min) + " (got " +
                                        detail::format_num(alpha) + ")");
        const double c =
            2.0 * (2.0 * alpha + theta * (alpha - 1.0)) / (theta * (2.0 + theta) * (2.0 + theta));
        p.id = "inverse-power(theta=" + detail::format_num(theta) +
               ",alpha=" + detail::format_num(alpha) + ")";
        p.smooth.dimension = 1;
        p.smooth.value_at = [c, theta](const Vec& x) {
            if (x[0] <= 0.0) return std::numeric_limits<double>::infinity();
            return c * std::pow(x[0], -theta);
        };
        p.smooth.gradient_at = [c, theta](const Vec& x) {
            if (x[0] <= 0.0) throw std::domain_error("inverse-power: gradient requested at x <= 0");
            return Vec{-c * theta * std::pow(x[0], -theta - 1.0)};
        };
        p.known_min_value = 0.0;
        p.argmin_known_empty = true;
        const double e = 2.0 / (2.0 + theta);
        p.closed_form = ClosedFormTrajectory{
            alpha, [e](double t) {
                return std::make_pair(Vec{std::pow(t, e)}, Vec{e * std::pow(t, e - 1.0)});
            }};
        p.suggested_x0 = Vec{1.0};
        return p;
    }

    if (name == "lasso") {
        const auto m = static_cast<std::size_t>(param_or(params, "m", 20));
        const auto n = static_cast<std::size_t>(param_or(params, "n", 50));
        const auto seed = static_cast<std::uint64_t>(param_or(params, "seed", 0));
        if (m == 0 || n == 0) throw std::invalid_argument("lasso: m and n must be >= 1");
        auto d = std::make_shared<detail::LassoData>();
        Rng rng(seed);
        d->A = Matrix(m, n);
        for (auto& a : d->A.data) a = rng.normal();
        Vec xhat(n, 0.0);
        const std::size_t support = std::max<std::size_t>(1, std::min(m, n) / 4);
        for (std::size_t placed = 0; placed < support;) {
            const auto idx = static_cast<std::size_t>(rng.next_index(n));
            if (xhat[idx] != 0.0) continue;
            xhat[idx] = rng.uniform() < 0.5 ? 1.0 : -1.0;
            ++placed;
        }
        d->b = matvec(d->A, xhat);
        for (auto& bi : d->b) bi += 0.01 * rng.normal();
        const double lambda_given = param_or(params, "lambda", -1.0);
        d->lambda = lambda_given > 0.0 ? lambda_given : 0.1 * norm_inf(matvec_t(d->A, d->b));

        p.id = "lasso(m=" + std::to_string(m) + ",n=" + std::to_string(n) +
               ",seed=" + std::to_string(seed) + ")";
        p.smooth.dimension = n;
        p.smooth.value_at = [d](const Vec& x) {
            const Vec r = sub(matvec(d->A, x), d->b);
            return 0.5 * dot(r, r);
        };
        p.smooth.gradient_at = [d](const Vec& x) {
            return matvec_t(d->A, sub(matvec(d->A, x), d->b));
        };
        p.smooth.lipschitz_constant = power_iteration(
            n, [d](const Vec& v) { return matvec_t(d->A, matvec(d->A, v)); }, 50, 1e-10);
        p.nonsmooth = ProxTerm{
            [d](const Vec& x) {
                double s = 0.0;
                for (double xi : x) s += std::abs(xi);
                return ExtReal::finite(d->lambda * s);
            },
            [d](double gamma, const Vec& x) { return soft_threshold(gamma * d->lambda, x); }};
        p.suggested_x0 = Vec(n, 0.0);

        // The smooth part alone is an underdetermined least-squares problem:
        // min value 0, attained at the least-norm solution A'(AA')^{-1} b.
        if (m < n) {
            Matrix S(m, m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < n; ++k) s += d->A(i, k) * d->A(j, k);
                    S(i, j) = s;
                }
            const Vec y = cholesky_solve(S, d->b);
            p.smooth_minimizer = matvec_t(d->A, y);
            p.smooth_min_value = 0.0;
        }
        return p;
    }

    if (name == "box-qp") {
        const auto dim = static_cast<std::size_t>(param_or(params, "dim", 8));
        const auto seed = static_cast<std::uint64_t>(param_or(params, "seed", 0));
        const double lo = param_or(params, "lo", -1.0);
        const double hi = param_or(params, "hi", 1.0);
        if (dim == 0) throw std::invalid_argument("box-qp: dim must be >= 1");
        if (!(lo < hi)) throw std::invalid_argument("box-qp: requires lo < hi");
        Rng rng(seed);
        Matrix B(dim, dim);
        for (auto& v : B.data) v = rng.normal();
        auto Q = std::make_shared<Matrix>(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) s += B(k, i) * B(k, j);
                (*Q)(i, j) = s / static_cast<double>(dim) + (i == j ? 0.1 : 0.0);
            }
        auto q = std::make_shared<Vec>(rng.normal_vec(dim));

        p.id = "box-qp(dim=" + std::to_string(dim) + ",seed=" + std::to_string(seed) + ")";
        p.smooth.dimension = dim;
        p.smooth.value_at = [Q, q](const Vec& x) {
            return 0.5 * dot(x, matvec(*Q, x)) + dot(*q, x);
        };
        p.smooth.gradient_at = [Q, q](const Vec& x) { return add(matvec(*Q, x), *q); };
        p.smooth.lipschitz_constant =
            power_iteration(dim, [Q](const Vec& v) { return matvec(*Q, v); }, 50, 1e-10);
        p.smooth.strong_convexity_modulus = 0.1;
        p.nonsmooth = ProxTerm{
            [lo, hi](const Vec& x) {
                for (double xi : x)
                    if (xi < lo || xi > hi) return ExtReal::infinity();
                return ExtReal::finite(0.0);
            },
            [lo, hi](double, const Vec& x) {
                Vec pr(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) pr[i] = std::clamp(x[i], lo, hi);
                return pr;
            }};
        p.suggested_x0 = Vec(dim, 0.0);
        p.smooth_minimizer = scale(-1.0, cholesky_solve(*Q, *q));
        p.smooth_min_value = 0.5 * dot(*q, *p.smooth_minimizer);
        return p;
    }

    throw std::invalid_argument("catalog: unknown problem family '" + name + "'");
}

}  // namespace inertia
