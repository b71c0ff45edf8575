#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inertia/problems.hpp"

namespace inertia {

struct State {
    double t = 0.0;
    Vec x;
    Vec v;
};

struct IntegratorConfig {
    double alpha = 3.0;
    double t0 = 1.0;
    double t_end = 100.0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    long max_steps = 2000000;
    int sample_count = 200;  // geometric in t

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("integrator: alpha must be > 0");
        if (!(t0 > 0.0))
            throw std::invalid_argument("integrator: t0 must be > 0 (damping is singular at t = 0)");
        if (!(t_end > t0)) throw std::invalid_argument("integrator: t_end must exceed t0");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("integrator: tolerances must be positive");
        if (sample_count < 2) throw std::invalid_argument("integrator: sample_count must be >= 2");
        if (max_steps < 1) throw std::invalid_argument("integrator: max_steps must be >= 1");
    }
};

enum class IntegrationStatus { ok, max_steps_exceeded, step_underflow };

inline const char* to_string(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::ok: return "ok";
        case IntegrationStatus::max_steps_exceeded: return "max-steps exceeded";
        case IntegrationStatus::step_underflow: return "step size underflow";
    }
    return "unknown";
}

struct Trajectory {
    std::vector<State> states;
    IntegratorConfig config;
    std::string problem_id;
    IntegrationStatus status = IntegrationStatus::ok;
    std::string message;
    State last_good;  // final internal state, past the last emitted sample on failure
};

/// Right-hand side of the first-order system: dx = v, dv = -(alpha/t) v - grad f(x).
inline std::pair<Vec, Vec> rhs(const State& s, double alpha, const CompositeProblem& problem) {
    if (problem.nonsmooth)
        throw std::invalid_argument(
            "rhs: nonsmooth term present; the continuous dynamics handle smooth objectives only "
            "(use smooth_surrogate)");
    if (!(s.t > 0.0)) throw std::invalid_argument("rhs: t must be > 0");
    check_dim(s.x, problem.dim(), "rhs x");
    check_dim(s.v, problem.dim(), "rhs v");
    Vec g = problem.smooth.gradient_at(s.x);
    Vec dv(g.size());
    const double damping = alpha / s.t;
    for (std::size_t i = 0; i < g.size(); ++i) dv[i] = -damping * s.v[i] - g[i];
    return {s.v, dv};
}

/// Exact solution of the force-free system xdd + (alpha/t) xd = 0, alpha > 1:
/// v(t) = v0 (t0/t)^alpha, x(t) = x0 + v0 t0^alpha (t0^(1-alpha) - t^(1-alpha)) / (alpha-1).
inline State free_decay(const Vec& x0, const Vec& v0, double alpha, double t0, double t) {
    if (!(alpha > 1.0)) throw std::invalid_argument("free_decay: requires alpha > 1");
    if (!(t0 > 0.0) || !(t >= t0)) throw std::invalid_argument("free_decay: requires t >= t0 > 0");
    if (x0.size() != v0.size()) throw std::invalid_argument("free_decay: dim(x0) != dim(v0)");
    const double vfac = std::pow(t0 / t, alpha);
    const double xfac =
        std::pow(t0, alpha) * (std::pow(t0, 1.0 - alpha) - std::pow(t, 1.0 - alpha)) / (alpha - 1.0);
    State s;
    s.t = t;
    s.x = axpy(x0, xfac, v0);
    s.v = scale(vfac, v0);
    return s;
}

inline std::vector<double> geometric_grid(double t0, double t_end, int n) {
    std::vector<double> ts(n);
    const double step = std::log(t_end / t0) / (n - 1);
    ts[0] = t0;
    for (int i = 1; i + 1 < n; ++i) {
        double t = t0 * std::exp(step * i);
        ts[i] = std::max(t, std::nextafter(ts[i - 1], t_end));  // keep strictly increasing
    }
    ts[n - 1] = t_end;
    return ts;
}

enum class VelocityInit { zero, gradient, prox_dir, explicit_vector };

/// Initial-velocity strategies. Direction comes from the strategy, magnitude
/// is pinned to (alpha-1)/t0 on the unit-normalized direction.
inline Vec initial_velocity(const CompositeProblem& problem, const Vec& x0, double alpha, double t0,
                            VelocityInit mode, double prox_gamma = 1e3) {
    check_dim(x0, problem.dim(), "initial_velocity");
    if (mode == VelocityInit::zero) return Vec(x0.size(), 0.0);
    Vec dir;
    if (mode == VelocityInit::gradient) {
        dir = scale(-1.0, problem.smooth.gradient_at(x0));
    } else {  // prox_dir; falls back to the gradient direction on smooth-only problems
        if (problem.nonsmooth)
            dir = sub(problem.nonsmooth->prox_at(prox_gamma, x0), x0);
        else
            dir = scale(-1.0, problem.smooth.gradient_at(x0));
    }
    const double n = norm2(dir);
    if (n < 1e-15) return Vec(x0.size(), 0.0);
    return scale((alpha - 1.0) / (t0 * n), dir);
}

namespace detail {

// Dormand-Prince 5(4) pair, FSAL, with the order-4 continuous extension.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

using Ode = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct DenseStep {
    double t = 0.0, h = 0.0;
    std::vector<double> c1, c2, c3, c4, c5;

    void eval(double ts, std::vector<double>& out) const {
        const double theta = (ts - t) / h;
        const double omt = 1.0 - theta;
        out.resize(c1.size());
        for (std::size_t i = 0; i < c1.size(); ++i)
            out[i] = c1[i] + theta * (c2[i] + omt * (c3[i] + theta * (c4[i] + omt * c5[i])));
    }
};

struct StepperResult {
    IntegrationStatus status = IntegrationStatus::ok;
    std::string message;
    double t = 0.0;
    std::vector<double> y;
};

// Integrates y' = f(t, y) from t0 to t_end, invoking on_sample(ts, y(ts)) for
// every requested sample time (strictly increasing, first == t0, last == t_end).
template <typename OnSample>
StepperResult dopri5_integrate(const Ode& f, double t0, double t_end, std::vector<double> y,
                               double rel_tol, double abs_tol, long max_steps,
                               const std::vector<double>& sample_times, OnSample&& on_sample) {
    using D = Dopri5;
    const std::size_t n = y.size();
    const double uround = 2.3e-16;
    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    const double facc1 = 5.0, facc2 = 0.1;  // h_new/h within [1/5, 10]

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    DenseStep dense;
    dense.c1.resize(n), dense.c2.resize(n), dense.c3.resize(n), dense.c4.resize(n), dense.c5.resize(n);

    std::size_t next_sample = 0;
    if (!sample_times.empty() && sample_times[0] == t0) {
        on_sample(t0, y);
        next_sample = 1;
    }

    double t = t0;
    f(t, y, k1);

    // initial step size: standard two-stage heuristic
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = abs_tol + rel_tol * std::abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (k1[i] / sk) * (k1[i] / sk);
        }
        d0 = std::sqrt(d0 / n), d1 = std::sqrt(d1 / n);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_end - t0);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
        f(t0 + h0, ytmp, k2);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = abs_tol + rel_tol * std::abs(y[i]);
            d2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        d2 = std::sqrt(d2 / n) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, t_end - t0});
    }

    double facold = 1e-4;
    bool reject = false;
    long steps = 0;

    while (t < t_end) {
        if (steps >= max_steps) {
            return {IntegrationStatus::max_steps_exceeded,
                    "max-steps (" + std::to_string(max_steps) + ") exceeded at t = " +
                        std::to_string(t),
                    t, y};
        }
        if (0.1 * h <= std::abs(t) * uround) {
            return {IntegrationStatus::step_underflow,
                    "step size underflow (h = " + std::to_string(h) + ") at t = " + std::to_string(t),
                    t, y};
        }
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }
        ++steps;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * D::a21 * k1[i];
        f(t + D::c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
        f(t + D::c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        f(t + D::c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
        f(t + D::c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                  D::a64 * k4[i] + D::a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (D::a71 * k1[i] + D::a73 * k3[i] + D::a74 * k4[i] +
                                  D::a75 * k5[i] + D::a76 * k6[i]);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                                   D::e6 * k6[i] + D::e7 * k7[i]);
            const double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / n);

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // accept
            const double tnew = last ? t_end : t + h;
            if (next_sample < sample_times.size() && sample_times[next_sample] <= tnew) {
                dense.t = t;
                dense.h = h;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    dense.c1[i] = y[i];
                    dense.c2[i] = ydiff;
                    dense.c3[i] = bspl;
                    dense.c4[i] = ydiff - h * k7[i] - bspl;
                    dense.c5[i] = h * (D::d1 * k1[i] + D::d3 * k3[i] + D::d4 * k4[i] +
                                       D::d5 * k5[i] + D::d6 * k6[i] + D::d7 * k7[i]);
                }
                while (next_sample < sample_times.size() && sample_times[next_sample] <= tnew) {
                    const double ts = sample_times[next_sample];
                    if (ts == tnew) {
                        on_sample(ts, ynew);
                    } else {
                        dense.eval(ts, ytmp);
                        on_sample(ts, ytmp);
                    }
                    ++next_sample;
                }
            }
            facold = std::max(err, 1e-4);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = h / fac;
            if (reject) hnew = std::min(hnew, h);
            reject = false;
            t = tnew;
            std::swap(y, ynew);
            std::swap(k1, k7);  // FSAL
            h = hnew;
        } else {
            h = h / std::min(facc1, fac11 / safe);
            reject = true;
        }
    }
    return {IntegrationStatus::ok, "", t, y};
}

}  // namespace detail

/// Integrates the damped flow for a smooth problem from (x0, v0) at t0,
/// sampling on a geometric time grid. Deterministic: identical inputs give
/// bit-identical samples. Runtime failures (max-steps, step underflow) are
/// reported on the trajectory together with the last good state.
inline Trajectory integrate(const CompositeProblem& problem, const IntegratorConfig& config,
                            const Vec& x0, const Vec& v0) {
    config.validate();
    if (problem.nonsmooth)
        throw std::invalid_argument(
            "integrate: nonsmooth term present; the continuous dynamics handle smooth objectives "
            "only (use smooth_surrogate)");
    const std::size_t d = problem.dim();
    check_dim(x0, d, "integrate x0");
    check_dim(v0, d, "integrate v0");

    const auto grad = problem.smooth.gradient_at;
    const double alpha = config.alpha;
    detail::Ode f = [&grad, alpha, d](double t, const std::vector<double>& y,
                                      std::vector<double>& dy) {
        dy.resize(2 * d);
        Vec x(y.begin(), y.begin() + d);
        Vec g = grad(x);
        const double damping = alpha / t;
        for (std::size_t i = 0; i < d; ++i) {
            dy[i] = y[d + i];
            dy[d + i] = -damping * y[d + i] - g[i];
        }
    };

    std::vector<double> y0(2 * d);
    std::copy(x0.begin(), x0.end(), y0.begin());
    std::copy(v0.begin(), v0.end(), y0.begin() + d);

    Trajectory traj;
    traj.config = config;
    traj.problem_id = problem.id;
    traj.states.reserve(config.sample_count);
    const auto ts = geometric_grid(config.t0, config.t_end, config.sample_count);

    auto res = detail::dopri5_integrate(
        f, config.t0, config.t_end, std::move(y0), config.rel_tol, config.abs_tol, config.max_steps,
        ts, [&](double t, const std::vector<double>& y) {
            State s;
            s.t = t;
            s.x.assign(y.begin(), y.begin() + d);
            s.v.assign(y.begin() + d, y.end());
            traj.states.push_back(std::move(s));
        });

    traj.status = res.status;
    traj.message = res.message;
    traj.last_good.t = res.t;
    traj.last_good.x.assign(res.y.begin(), res.y.begin() + d);
    traj.last_good.v.assign(res.y.begin() + d, res.y.end());
    return traj;
}

}  // namespace inertia
