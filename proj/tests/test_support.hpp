#pragma once

#include <cmath>
#include <functional>

#include "inertia/problems.hpp"

// Shared helpers for the test suites. These are independent re-derivations
// (finite differences, direct formula evaluation) used to certify the
// library code paths; they deliberately avoid calling back into them.

namespace testsupport {

using inertia::CompositeProblem;
using inertia::Vec;

// central finite-difference gradient with step 1e-6 (1 + |x|)
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
    const double h = 1e-6 * (1.0 + inertia::norm2(x));
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

// residual of xdd + (alpha/t) xd + grad f(x) along a closed-form trajectory,
// with xdd recovered by central differences of the provided velocity
inline double ode_residual(const CompositeProblem& p, double alpha, double t) {
    const auto& cf = *p.closed_form;
    const double h = 1e-6 * t;
    const auto [x, v] = cf.at(t);
    const auto [xp, vp] = cf.at(t + h);
    const auto [xm, vm] = cf.at(t - h);
    (void)xp;
    (void)xm;
    const Vec g = p.smooth.gradient_at(x);
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xdd = (vp[i] - vm[i]) / (2.0 * h);
        const double r = xdd + (alpha / t) * v[i] + g[i];
        r2 += r * r;
    }
    return std::sqrt(r2);
}

}  // namespace testsupport
