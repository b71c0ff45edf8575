#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace inertia {

using Vec = std::vector<double>;

inline void check_dim(const Vec& x, std::size_t dim, const char* what) {
    if (x.size() != dim)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                    std::to_string(x.size()) + ", expected " + std::to_string(dim) + ")");
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// r = a + c*b
inline Vec axpy(const Vec& a, double c, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
    return r;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Dense row-major matrix, just enough for the problem catalog.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline Vec matvec(const Matrix& A, const Vec& x) {
    check_dim(x, A.cols, "matvec");
    Vec y(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        const double* row = &A.data[i * A.cols];
        for (std::size_t j = 0; j < A.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec matvec_t(const Matrix& A, const Vec& y) {
    check_dim(y, A.rows, "matvec_t");
    Vec x(A.cols, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* row = &A.data[i * A.cols];
        for (std::size_t j = 0; j < A.cols; ++j) x[j] += row[j] * y[i];
    }
    return x;
}

/// Solves S y = b for symmetric positive definite S by Cholesky, with one
/// refinement pass. S is copied; throws if a pivot degenerates.
inline Vec cholesky_solve(const Matrix& S, const Vec& b) {
    if (S.rows != S.cols) throw std::invalid_argument("cholesky_solve: matrix not square");
    check_dim(b, S.rows, "cholesky_solve");
    const std::size_t n = S.rows;
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = S(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0)) throw std::runtime_error("cholesky_solve: matrix not positive definite");
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = S(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    auto solve_once = [&](const Vec& rhs) {
        Vec z(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = rhs[i];
            for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * z[k];
            z[i] = s / L(i, i);
        }
        Vec y(n);
        for (std::size_t ii = n; ii-- > 0;) {
            double s = z[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * y[k];
            y[ii] = s / L(ii, ii);
        }
        return y;
    };
    Vec y = solve_once(b);
    Vec r = sub(b, matvec(S, y));
    Vec dy = solve_once(r);
    return add(y, dy);
}

/// Largest eigenvalue of the symmetric PSD operator x -> op(x) by power
/// iteration (fixed iteration budget, relative tolerance stop).
template <typename Op>
double power_iteration(std::size_t dim, Op&& op, int iters = 50, double tol = 1e-10) {
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    double nv = norm2(v);
    for (auto& c : v) c /= nv;
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vec w = op(v);
        double next = dot(v, w);
        double nw = norm2(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

/// Deterministic random source. The raw bit stream of mt19937_64 is pinned by
/// the standard; normals come from an explicit Box-Muller transform so values
/// do not depend on the library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next_index(std::uint64_t n) { return engine_() % n; }

    Vec normal_vec(std::size_t n) {
        Vec v(n);
        for (auto& c : v) c = normal();
        return v;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace inertia
