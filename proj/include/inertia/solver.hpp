#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "inertia/problems.hpp"

namespace inertia {

struct SolverConfig {
    double alpha = 3.0;
    double gamma = 0.0;  // step; <= 0 selects 1/L from problem metadata
    long max_iters = 1000;
    Vec x0;
    std::optional<Vec> x_minus_1;  // defaults to x0 (zero initial momentum)
    std::optional<double> stop_gap;
    std::optional<double> stop_step;
};

/// Momentum weight (k-1)/(k+alpha-1); the alpha = 3 instance is FISTA's (k-1)/(k+2).
inline double inertial_coefficient(long k, double alpha) {
    if (k < 1) throw std::invalid_argument("inertial_coefficient: k must be >= 1");
    return static_cast<double>(k - 1) / (static_cast<double>(k - 1) + alpha);
}

/// One inertial forward-backward step:
///   y_k    = x_k + ((k-1)/(k+alpha-1)) (x_k - x_{k-1})
///   x_next = prox_{gamma g}( y_k - gamma grad f(y_k) )   (identity prox if g absent)
inline std::pair<Vec, Vec> step(const Vec& x_k, const Vec& x_prev, long k, double alpha,
                                double gamma, const CompositeProblem& problem) {
    check_dim(x_k, problem.dim(), "step x_k");
    check_dim(x_prev, problem.dim(), "step x_prev");
    if (!(gamma > 0.0)) throw std::invalid_argument("step: gamma must be > 0");
    const double beta = inertial_coefficient(k, alpha);
    Vec y(x_k.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x_k[i] + beta * (x_k[i] - x_prev[i]);
    Vec g = problem.smooth.gradient_at(y);
    Vec inner(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) inner[i] = y[i] - gamma * g[i];
    Vec x_next = problem.nonsmooth ? problem.nonsmooth->prox_at(gamma, inner) : std::move(inner);
    if (!all_finite(x_next))
        throw std::runtime_error("step: non-finite iterate at k = " + std::to_string(k) +
                                 " (divergence)");
    return {std::move(y), std::move(x_next)};
}

enum class SolveStatus { ok, stopped_gap, stopped_step, diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::ok: return "ok";
        case SolveStatus::stopped_gap: return "stopped: gap target reached";
        case SolveStatus::stopped_step: return "stopped: step target reached";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

struct IterateRecord {
    long k = 0;
    Vec x;
    Vec y;
    double f_value = 0.0;
    std::optional<double> gap;
    double step_norm = 0.0;            // |x_k - x_{k-1}|
    double sum_k_gap = 0.0;            // sum over j<=k of j gap_j
    double sum_k_step2 = 0.0;          // sum over j<=k of j |x_j - x_{j-1}|^2
    std::optional<double> discrete_energy;  // experimental Lyapunov bookkeeping
};

struct IterateHistory {
    std::vector<IterateRecord> records;
    SolverConfig config;
    double gamma_used = 0.0;
    std::string problem_id;
    SolveStatus status = SolveStatus::ok;
    std::string message;
    long iterations = 0;  // index of the last iterate produced
    std::vector<std::string> warnings;
    std::optional<double> reference_min;
};

namespace detail {

inline bool record_due(long k) {
    const long stride = (k + 499) / 500;
    return k % stride == 0;
}

}  // namespace detail

/// Runs the solver for config.max_iters iterates (or until a stopping rule
/// fires), recording rows on a decimated schedule: every ceil(k/500)-th
/// iterate plus the last. Deterministic given (problem, config).
inline IterateHistory run(const CompositeProblem& problem, const SolverConfig& config,
                          std::optional<double> reference_min = std::nullopt) {
    if (config.max_iters < 1) throw std::invalid_argument("run: max_iters must be >= 1");
    if (!(config.alpha > 0.0)) throw std::invalid_argument("run: alpha must be > 0");
    check_dim(config.x0, problem.dim(), "run x0");

    IterateHistory hist;
    hist.config = config;
    hist.problem_id = problem.id;
    hist.reference_min = reference_min ? reference_min : problem.known_min_value;

    double gamma = config.gamma;
    const auto L = problem.smooth.lipschitz_constant;
    if (gamma <= 0.0) {
        if (!L || *L <= 0.0)
            throw std::invalid_argument(
                "run: gamma = auto needs a Lipschitz constant on the smooth term of " + problem.id);
        gamma = 1.0 / *L;
    } else if (L && *L > 0.0 && gamma > 1.0 / *L * (1.0 + 1e-12)) {
        hist.warnings.push_back("gamma = " + std::to_string(gamma) + " exceeds 1/L = " +
                                std::to_string(1.0 / *L) + "; proceeding as requested");
    }
    hist.gamma_used = gamma;

    const bool have_gap = hist.reference_min.has_value();
    const bool have_energy = config.alpha > 1.0 && have_gap && problem.known_minimizer.has_value();
    const Vec* xstar = have_energy ? &*problem.known_minimizer : nullptr;
    const double alpha = config.alpha;

    auto objective = [&](const Vec& x) {
        const ExtReal fv = value(problem, x);
        return fv.infinite ? std::numeric_limits<double>::infinity() : fv.value;
    };
    auto gap_of = [&](const Vec& x) -> std::optional<double> {
        if (!have_gap) return std::nullopt;
        return gap(problem, x, hist.reference_min);
    };

    // E(k) = 2 gamma (k+a-2)^2/(a-1) gap(x_k) + 1/(a-1) |(k+a-1) y_{k+1} - k x_k - (a-1) x*|^2
    auto discrete_energy = [&](long k, const Vec& xk, double gap_k, const Vec& y_next) {
        const double ka = static_cast<double>(k) + alpha;
        double q = 0.0;
        for (std::size_t i = 0; i < xk.size(); ++i) {
            const double z = (ka - 1.0) * y_next[i] - static_cast<double>(k) * xk[i] -
                             (alpha - 1.0) * (*xstar)[i];
            q += z * z;
        }
        return 2.0 * gamma * (ka - 2.0) * (ka - 2.0) / (alpha - 1.0) * gap_k + q / (alpha - 1.0);
    };

    Vec x_prev = config.x_minus_1 ? *config.x_minus_1 : config.x0;
    check_dim(x_prev, problem.dim(), "run x_minus_1");
    Vec x_cur = config.x0;
    long k = 1;
    double step_cur = norm2(sub(x_cur, x_prev));
    std::optional<double> gap_cur = gap_of(x_cur);
    double sum_k_gap = gap_cur ? *gap_cur : 0.0;
    double sum_k_step2 = step_cur * step_cur;

    auto push_record = [&](long kk, const Vec& x, const Vec& y) {
        IterateRecord r;
        r.k = kk;
        r.x = x;
        r.y = y;
        r.f_value = objective(x);
        r.gap = gap_cur;
        r.step_norm = step_cur;
        r.sum_k_gap = sum_k_gap;
        r.sum_k_step2 = sum_k_step2;
        hist.records.push_back(std::move(r));
    };

    // y_1 = x_1 (the k = 1 momentum weight vanishes)
    push_record(1, x_cur, x_cur);

    while (k < config.max_iters) {
        Vec y, x_next;
        try {
            auto [yy, xn] = step(x_cur, x_prev, k, alpha, gamma, problem);
            y = std::move(yy);
            x_next = std::move(xn);
        } catch (const std::runtime_error& e) {
            hist.status = SolveStatus::diverged;
            hist.message = e.what();
            if (hist.records.back().k != k) {  // keep the last finite iterate
                const double beta = inertial_coefficient(k, alpha);
                Vec yk(x_cur.size());
                for (std::size_t i = 0; i < yk.size(); ++i)
                    yk[i] = x_cur[i] + beta * (x_cur[i] - x_prev[i]);
                push_record(k, x_cur, yk);
            }
            break;
        }
        // y here is y_k; with x_{k+1} known we can also form y_{k+1} and
        // finalize the experimental energy of the pending record k.
        if (have_energy && !hist.records.empty() && hist.records.back().k == k) {
            const double beta_next = inertial_coefficient(k + 1, alpha);
            Vec y_next(x_next.size());
            for (std::size_t i = 0; i < y_next.size(); ++i)
                y_next[i] = x_next[i] + beta_next * (x_next[i] - x_cur[i]);
            hist.records.back().discrete_energy =
                discrete_energy(k, x_cur, gap_cur ? *gap_cur : 0.0, y_next);
            hist.records.back().y = y;  // replace the provisional extrapolation
        }

        step_cur = norm2(sub(x_next, x_cur));
        x_prev = std::move(x_cur);
        x_cur = std::move(x_next);
        ++k;
        gap_cur = gap_of(x_cur);
        if (gap_cur) sum_k_gap += static_cast<double>(k) * *gap_cur;
        sum_k_step2 += static_cast<double>(k) * step_cur * step_cur;

        bool stop = false;
        if (config.stop_gap && gap_cur && *gap_cur <= *config.stop_gap) {
            hist.status = SolveStatus::stopped_gap;
            stop = true;
        } else if (config.stop_step && step_cur <= *config.stop_step) {
            hist.status = SolveStatus::stopped_step;
            stop = true;
        }
        if (detail::record_due(k) || k == config.max_iters || stop) {
            const double beta = inertial_coefficient(k, alpha);
            Vec yk(x_cur.size());
            for (std::size_t i = 0; i < yk.size(); ++i)
                yk[i] = x_cur[i] + beta * (x_cur[i] - x_prev[i]);
            push_record(k, x_cur, yk);
        }
        if (stop) break;
    }
    hist.iterations = k;
    if (hist.message.empty() && hist.status != SolveStatus::ok)
        hist.message = to_string(hist.status);
    return hist;
}

struct TailVerdict {
    bool asserted = false;
    bool ok = true;
    double tail_fraction = 0.0;  // increment over the trailing half, relative to the total
};

struct DiscreteDiagnostics {
    std::vector<long> k;
    std::vector<double> k2gap;
    std::vector<double> k_step;  // k |x_k - x_{k-1}|
    std::vector<double> sum_k_gap;
    std::vector<double> sum_k_step2;
    std::vector<double> cummax_k2gap;
    std::vector<double> discrete_energy;  // NaN where unavailable
    double k2gap_final_decade_increase = 0.0;
    bool k2gap_envelope_stable = true;
    TailVerdict gap_sum_tail;
    TailVerdict step_sum_tail;
    double energy_monotone_fraction = std::numeric_limits<double>::quiet_NaN();
};

/// Post-processes a history into the discrete rate series and
/// tail-convergence verdicts (asserted only for alpha > 3).
inline DiscreteDiagnostics discrete_diagnostics(const IterateHistory& hist) {
    DiscreteDiagnostics d;
    const auto& rec = hist.records;
    double cm = 0.0;
    for (const auto& r : rec) {
        const double kk = static_cast<double>(r.k);
        d.k.push_back(r.k);
        d.k2gap.push_back(r.gap ? kk * kk * *r.gap : std::numeric_limits<double>::quiet_NaN());
        d.k_step.push_back(kk * r.step_norm);
        d.sum_k_gap.push_back(r.sum_k_gap);
        d.sum_k_step2.push_back(r.sum_k_step2);
        if (r.gap) cm = std::max(cm, kk * kk * *r.gap);
        d.cummax_k2gap.push_back(cm);
        d.discrete_energy.push_back(
            r.discrete_energy ? *r.discrete_energy : std::numeric_limits<double>::quiet_NaN());
    }
    if (rec.empty()) return d;

    const long k_end = rec.back().k;
    auto value_at_or_before = [&](const std::vector<double>& series, long kq) {
        double v = series.front();
        for (std::size_t i = 0; i < rec.size(); ++i)
            if (rec[i].k <= kq) v = series[i];
        return v;
    };

    if (rec.back().gap) {
        const double cm_early = value_at_or_before(d.cummax_k2gap, k_end / 10);
        const double cm_final = d.cummax_k2gap.back();
        d.k2gap_final_decade_increase =
            cm_early > 0.0 ? (cm_final - cm_early) / cm_early : (cm_final > 0.0 ? 1.0 : 0.0);
        d.k2gap_envelope_stable = d.k2gap_final_decade_increase < 0.05;
    }

    const bool asserted = hist.config.alpha > 3.0;
    auto tail = [&](const std::vector<double>& sums) {
        TailVerdict t;
        t.asserted = asserted;
        const double total = sums.back();
        const double half = value_at_or_before(sums, k_end / 2);
        t.tail_fraction = total > 0.0 ? (total - half) / total : 0.0;
        t.ok = t.tail_fraction < 0.10;
        return t;
    };
    d.gap_sum_tail = tail(d.sum_k_gap);
    d.step_sum_tail = tail(d.sum_k_step2);

    std::size_t pairs = 0, mono = 0;
    for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
        if (!rec[i].discrete_energy || !rec[i + 1].discrete_energy) continue;
        ++pairs;
        if (*rec[i + 1].discrete_energy <=
            *rec[i].discrete_energy * (1.0 + 1e-8) + 1e-12)
            ++mono;
    }
    if (pairs > 0)
        d.energy_monotone_fraction = static_cast<double>(mono) / static_cast<double>(pairs);
    return d;
}

}  // namespace inertia
