#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "inertia/integrator.hpp"
#include "inertia/problems.hpp"

namespace inertia {

struct EnergyParams {
    double lambda = 0.0;
    double xi = 0.0;
    double p = 0.0;
    Vec anchor;  // a minimizer x*
};

/// Global energy W = 1/2 |v|^2 + f(x); nonincreasing along the flow.
inline double global_energy(const State& s, const CompositeProblem& problem) {
    if (problem.nonsmooth)
        throw std::invalid_argument("global_energy: smooth problems only (use smooth_surrogate)");
    check_dim(s.x, problem.dim(), "global_energy");
    return 0.5 * dot(s.v, s.v) + problem.smooth.value_at(s.x);
}

/// Anchor function h = 1/2 |x - z|^2 and its time derivative <x - z, v>.
inline std::pair<double, double> anchor_function(const State& s, const Vec& anchor) {
    if (s.x.size() != anchor.size())
        throw std::invalid_argument("anchor_function: anchor dimension mismatch");
    const Vec d = sub(s.x, anchor);
    return {0.5 * dot(d, d), dot(d, s.v)};
}

/// Anchored energies
///   E_{lambda,xi} = t^2 gap + 1/2 |lambda (x - x*) + t v|^2 + (xi/2) |x - x*|^2
///   E_lambda^p    = t^p (t^2 gap + 1/2 |lambda (x - x*) + t v|^2)
/// Requires a problem whose minimum is attained; the anchor must lie in argmin.
inline std::pair<double, double> anchored_energy(const State& s, const CompositeProblem& problem,
                                                 const EnergyParams& params) {
    if (problem.argmin_known_empty)
        throw std::invalid_argument(
            "anchored_energy: problem " + problem.id +
            " has empty argmin; anchored quantities need an attained minimum");
    if (!problem.known_min_value)
        throw std::invalid_argument("anchored_energy: no reference minimum on problem " + problem.id);
    check_dim(params.anchor, problem.dim(), "anchored_energy anchor");
    const double gp = gap(problem, s.x);
    const Vec d = sub(s.x, params.anchor);
    const Vec m = axpy(scale(params.lambda, d), s.t, s.v);
    const double base = s.t * s.t * gp + 0.5 * dot(m, m);
    const double e_lx = base + 0.5 * params.xi * dot(d, d);
    const double e_lp = std::pow(s.t, params.p) * base;
    return {e_lx, e_lp};
}

struct MonotoneVerdict {
    bool asserted = false;   // whether theory guarantees the decrease
    bool ok = true;          // violations within tolerance
    double max_violation = 0.0;  // max relative per-step increase
};

struct EnergySample {
    double t = 0.0;
    double w = 0.0;
    double h = std::numeric_limits<double>::quiet_NaN();
    double hdot = std::numeric_limits<double>::quiet_NaN();
    double e_lx = std::numeric_limits<double>::quiet_NaN();
    double e_lp = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double tsq_gap = std::numeric_limits<double>::quiet_NaN();
    double norm_v = 0.0;
};

struct EnergyReport {
    std::vector<EnergySample> samples;
    MonotoneVerdict w_verdict;
    MonotoneVerdict e_lx_verdict;  // E_{2, 2(alpha-3)}
    MonotoneVerdict e_lp_verdict;  // E_{alpha-1, 0}
    double lambda_lx = 0.0, xi_lx = 0.0;
    double lambda_lp = 0.0, p_lp = 0.0;
    bool anchored = false;
    bool gap_known = false;
    double sup_tsq_gap = std::numeric_limits<double>::quiet_NaN();
    double value_rate_bound = std::numeric_limits<double>::quiet_NaN();  // E_{alpha-1,0}(t0)
    bool value_rate_bound_asserted = false;
    bool value_rate_bound_ok = true;
    std::map<std::string, double> integrals;
};

inline MonotoneVerdict monotone_verdict(const std::vector<double>& q, bool asserted,
                                        double tol = 1e-8) {
    MonotoneVerdict v;
    v.asserted = asserted;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        const double viol = (q[i + 1] - q[i]) / (1.0 + std::abs(q[i]));
        v.max_violation = std::max(v.max_violation, viol);
    }
    v.ok = v.max_violation <= tol;
    return v;
}

struct WeightedIntegrals {
    double t_gap = 0.0;       // integral of t (f(x)-min f)
    double gap_over_t = 0.0;  // integral of (f(x)-min f) / t
    double t_speed2 = 0.0;    // integral of t |v|^2
    std::vector<double> t_gap_partials;
    std::vector<double> gap_over_t_partials;
    std::vector<double> t_speed2_partials;
};

/// Trapezoid quadratures of the theory's weighted integrands over the sample
/// grid, with running partial sums for tail-convergence checks.
inline WeightedIntegrals weighted_integrals(const Trajectory& traj, const CompositeProblem& problem) {
    if (!problem.known_min_value)
        throw std::invalid_argument("weighted_integrals: gap not computable on " + problem.id);
    const auto& st = traj.states;
    WeightedIntegrals w;
    w.t_gap_partials.resize(st.size(), 0.0);
    w.gap_over_t_partials.resize(st.size(), 0.0);
    w.t_speed2_partials.resize(st.size(), 0.0);
    double prev_tg = 0.0, prev_gt = 0.0, prev_tv = 0.0, prev_t = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
        const double g = gap(problem, st[i].x);
        const double v2 = dot(st[i].v, st[i].v);
        const double tg = st[i].t * g;
        const double gt = g / st[i].t;
        const double tv = st[i].t * v2;
        if (i > 0) {
            const double dt = st[i].t - prev_t;
            w.t_gap += 0.5 * dt * (tg + prev_tg);
            w.gap_over_t += 0.5 * dt * (gt + prev_gt);
            w.t_speed2 += 0.5 * dt * (tv + prev_tv);
        }
        w.t_gap_partials[i] = w.t_gap;
        w.gap_over_t_partials[i] = w.gap_over_t;
        w.t_speed2_partials[i] = w.t_speed2;
        prev_tg = tg, prev_gt = gt, prev_tv = tv, prev_t = st[i].t;
    }
    return w;
}

/// Evaluates every diagnostic that the problem's metadata allows: W and |v|
/// always, gap-based columns when the infimum is known, anchored energies
/// when a minimizer is certified. Used by the CLI; check_special_energies
/// enforces the anchored preconditions on top of this.
inline EnergyReport energy_report(const Trajectory& traj, const CompositeProblem& problem,
                                  double alpha) {
    EnergyReport rep;
    rep.gap_known = problem.known_min_value.has_value();
    rep.anchored = problem.known_minimizer.has_value() && !problem.argmin_known_empty;
    rep.lambda_lx = 2.0;
    rep.xi_lx = 2.0 * (alpha - 3.0);
    rep.lambda_lp = alpha - 1.0;
    rep.p_lp = 0.0;

    EnergyParams plx{rep.lambda_lx, rep.xi_lx, 0.0, {}};
    EnergyParams plp{rep.lambda_lp, 0.0, 0.0, {}};
    if (rep.anchored) plx.anchor = plp.anchor = *problem.known_minimizer;

    std::vector<double> ws, elxs, elps;
    rep.samples.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        EnergySample row;
        row.t = s.t;
        row.w = global_energy(s, problem);
        row.norm_v = norm2(s.v);
        if (rep.gap_known) {
            row.gap = gap(problem, s.x);
            row.tsq_gap = s.t * s.t * row.gap;
        }
        if (rep.anchored) {
            auto [h, hdot] = anchor_function(s, *problem.known_minimizer);
            row.h = h;
            row.hdot = hdot;
            auto [elx, unused] = anchored_energy(s, problem, plx);
            auto [elp0, unused2] = anchored_energy(s, problem, plp);
            (void)unused, (void)unused2;
            row.e_lx = elx;
            row.e_lp = elp0;
            elxs.push_back(elx);
            elps.push_back(elp0);
        }
        ws.push_back(row.w);
        rep.samples.push_back(row);
    }

    const bool bounded_below = problem.known_min_value.has_value();
    rep.w_verdict = monotone_verdict(ws, bounded_below);
    rep.e_lx_verdict = monotone_verdict(elxs, rep.anchored && alpha >= 3.0);
    rep.e_lp_verdict = monotone_verdict(elps, rep.anchored && alpha >= 3.0);

    if (rep.gap_known) {
        rep.sup_tsq_gap = 0.0;
        for (const auto& row : rep.samples) rep.sup_tsq_gap = std::max(rep.sup_tsq_gap, row.tsq_gap);
    }
    if (rep.anchored && !elps.empty()) {
        rep.value_rate_bound = elps.front();
        rep.value_rate_bound_asserted = alpha >= 3.0;
        rep.value_rate_bound_ok = rep.sup_tsq_gap <= rep.value_rate_bound * (1.0 + 1e-6);
    }
    if (rep.gap_known) {
        const auto wi = weighted_integrals(traj, problem);
        rep.integrals["t_gap"] = wi.t_gap;
        rep.integrals["gap_over_t"] = wi.gap_over_t;
        rep.integrals["t_speed2"] = wi.t_speed2;
    }
    return rep;
}

/// Special energies of the decay analysis: E_{2, 2(alpha-3)} and E_{alpha-1, 0}
/// along the trajectory, with monotonicity verdicts (asserted for alpha >= 3;
/// for alpha < 3 the energies are still computed, verdicts are not asserted)
/// and the sup_t t^2 gap <= E_{alpha-1,0}(t0) bound report.
inline EnergyReport check_special_energies(const Trajectory& traj, const CompositeProblem& problem,
                                           double alpha) {
    if (problem.argmin_known_empty)
        throw std::invalid_argument("check_special_energies: problem " + problem.id +
                                    " has empty argmin; anchored energies are unavailable");
    if (!problem.known_minimizer)
        throw std::invalid_argument("check_special_energies: problem " + problem.id +
                                    " carries no certified minimizer");
    return energy_report(traj, problem, alpha);
}

struct ErgodicSeries {
    std::vector<double> t;
    std::vector<double> g;  // g(t) = t^-alpha * integral of s^alpha |xdd|^2
    bool decayed = false;   // g at t_end below g at the geometric midpoint
};

/// Ergodic acceleration metric; the acceleration is recovered from the
/// dynamics, xdd = -(alpha/t) v - grad f(x).
inline ErgodicSeries ergodic_acceleration(const Trajectory& traj, const CompositeProblem& problem,
                                          double alpha) {
    ErgodicSeries es;
    const auto& st = traj.states;
    if (st.empty()) return es;
    es.t.reserve(st.size());
    es.g.reserve(st.size());
    double acc = 0.0;
    double prev_t = st[0].t, prev_integrand = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
        auto [dx, dv] = rhs(st[i], alpha, problem);
        (void)dx;
        const double integrand = std::pow(st[i].t, alpha) * dot(dv, dv);
        if (i > 0) acc += 0.5 * (st[i].t - prev_t) * (integrand + prev_integrand);
        es.t.push_back(st[i].t);
        es.g.push_back(acc * std::pow(st[i].t, -alpha));
        prev_t = st[i].t;
        prev_integrand = integrand;
    }
    const double tmid = std::sqrt(st.front().t * st.back().t);
    std::size_t imid = 0;
    for (std::size_t i = 0; i < es.t.size(); ++i)
        if (std::abs(es.t[i] - tmid) < std::abs(es.t[imid] - tmid)) imid = i;
    es.decayed = es.g.back() < es.g[imid];
    return es;
}

struct RateFit {
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double window_lo = std::numeric_limits<double>::quiet_NaN();
    double window_hi = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    bool envelope_used = false;
    bool defined = false;
    std::string note;
};

/// Log-log slope of y against s over the trailing window_fraction of the
/// log-range. With envelope on, y is first replaced by its upper envelope
/// (cumulative max scanned from the end backwards) to tame oscillation; the
/// O-bounds of the theory constrain that envelope, not pointwise values.
inline RateFit fit_rate(const std::vector<double>& s, const std::vector<double>& y,
                        double window_fraction = 0.5, bool envelope = false) {
    if (s.size() != y.size()) throw std::invalid_argument("fit_rate: series length mismatch");
    if (!(window_fraction > 0.0) || window_fraction > 1.0)
        throw std::invalid_argument("fit_rate: window_fraction must lie in (0, 1]");
    RateFit fit;
    fit.envelope_used = envelope;

    std::vector<double> fs, fy;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
            fs.push_back(s[i]);
            fy.push_back(y[i]);
        }
    }
    if (fs.empty()) {
        fit.note = "converged, rate undefined";
        return fit;
    }
    if (envelope) {
        for (std::size_t i = fy.size() - 1; i-- > 0;) fy[i] = std::max(fy[i], fy[i + 1]);
    }
    const double log_lo = std::log(fs.front()), log_hi = std::log(fs.back());
    const double edge = log_hi - window_fraction * (log_hi - log_lo);

    double su = 0.0, sw = 0.0, suu = 0.0, suw = 0.0;
    std::size_t count = 0;
    double win_lo = 0.0, win_hi = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double u = std::log(fs[i]);
        if (u < edge) continue;
        if (count == 0) win_lo = fs[i];
        win_hi = fs[i];
        const double w = std::log(fy[i]);
        su += u, sw += w, suu += u * u, suw += u * w;
        ++count;
    }
    if (count < 10) {
        fit.note = "too few positive points in fit window (" + std::to_string(count) + ")";
        return fit;
    }
    const double nc = static_cast<double>(count);
    const double denom = nc * suu - su * su;
    if (denom <= 0.0) {
        fit.note = "degenerate abscissae";
        return fit;
    }
    fit.exponent = (nc * suw - su * sw) / denom;
    fit.intercept = (sw - fit.exponent * su) / nc;
    fit.window_lo = win_lo;
    fit.window_hi = win_hi;
    double rss = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double u = std::log(fs[i]);
        if (u < edge) continue;
        const double r = std::log(fy[i]) - (fit.exponent * u + fit.intercept);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / nc);
    fit.defined = true;
    return fit;
}

/// (t, gap) series of a trajectory, for rate fitting.
inline std::pair<std::vector<double>, std::vector<double>> gap_series(
    const Trajectory& traj, const CompositeProblem& problem,
    std::optional<double> reference_min = std::nullopt) {
    std::vector<double> ts, gs;
    ts.reserve(traj.states.size());
    gs.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        ts.push_back(s.t);
        gs.push_back(gap(problem, s.x, reference_min));
    }
    return {std::move(ts), std::move(gs)};
}

}  // namespace inertia
