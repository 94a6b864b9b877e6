#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <kpeig/potential.hpp>
#include <kpeig/series.hpp>

namespace kpeig {

struct no_root_in_window : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct multiple_roots : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Branch-safe propagation kernels for y'' = -z y on an interval of length t:
/// s(z,t) = sin(sqrt(z) t)/sqrt(z) (z > 0), t (z = 0), sinh(sqrt(-z) t)/sqrt(-z)
/// (z < 0), and the matching cosine kernel.  A short series takes over for
/// |z| t^2 < 1e-8 so both kernels stay smooth through the branch point.
struct Kernels {
    double s;
    double c;
};

inline Kernels branch_kernels(double z, double t) {
    const double w = z * t * t;
    if (std::abs(w) < 1e-8) {
        return {t * (1.0 - w / 6.0 + w * w / 120.0), 1.0 - w / 2.0 + w * w / 24.0};
    }
    if (z > 0.0) {
        const double r = std::sqrt(z);
        return {std::sin(r * t) / r, std::cos(r * t)};
    }
    const double r = std::sqrt(-z);
    return {std::sinh(r * t) / r, std::cosh(r * t)};
}

/// 2x2 propagator of (y, y') across one constant piece; determinant is 1.
inline std::array<double, 4> propagator(double z, double t) {
    const Kernels k = branch_kernels(z, t);
    return {k.c, k.s, -z * k.s, k.c};
}

}  // namespace detail

/// Characteristic function f(lambda) = y(pi; lambda) where y solves
/// -y'' + q y = lambda y with y(0) = 0, y'(0) = 1, evaluated as the product
/// of per-piece propagators.  f is entire in lambda and its zeros are exactly
/// the Dirichlet eigenvalues.
inline double characteristic(const StepPotential& q, double lambda) {
    double y = 0.0, yp = 1.0;
    const auto& xs = q.breakpoints();
    const auto& vs = q.values();
    for (std::size_t j = 0; j < vs.size(); ++j) {
        const auto m = detail::propagator(lambda - vs[j], xs[j + 1] - xs[j]);
        const double y2 = m[0] * y + m[1] * yp;
        yp = m[2] * y + m[3] * yp;
        y = y2;
    }
    return y;
}

struct OracleResult {
    int n = 0;
    double value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;  // |f(value)|
    int bisection_steps = 0;
};

/// Ground-truth eigenvalue in the window I_n = [n^2 - M, n^2 + M] by
/// bracketed bisection of the characteristic function.
///
/// The window is inflated by 1e-9 at both ends (so the zero potential, whose
/// window degenerates to a point, still brackets its root).  Exactly one sign
/// change must appear among 64 equispaced samples; zero or several are
/// surfaced as errors, never repaired.  Bisection stops at |hi - lo| <= tol
/// or when the midpoint is no longer representable strictly inside the
/// bracket.
inline OracleResult find_eigenvalue(const StepPotential& q, int n, double tol = 1e-13) {
    if (!condition_holds(q.max_abs(), n))
        throw condition_error("find_eigenvalue: condition fails for n = " + std::to_string(n));
    const double nn = double(n) * n;
    const double M = q.max_abs();
    const double lo0 = nn - M - 1e-9;
    const double hi0 = nn + M + 1e-9;

    constexpr int kSamples = 64;
    std::array<double, kSamples> fs{};
    for (int i = 0; i < kSamples; ++i) {
        const double x = lo0 + (hi0 - lo0) * double(i) / (kSamples - 1);
        fs[std::size_t(i)] = characteristic(q, x);
    }
    int found = -1;
    for (int i = 0; i + 1 < kSamples; ++i) {
        if (fs[std::size_t(i)] * fs[std::size_t(i + 1)] < 0.0) {
            if (found >= 0)
                throw multiple_roots("find_eigenvalue: several sign changes in I_" + std::to_string(n));
            found = i;
        }
    }
    if (found < 0)
        throw no_root_in_window("find_eigenvalue: no sign change in I_" + std::to_string(n));

    double lo = lo0 + (hi0 - lo0) * double(found) / (kSamples - 1);
    double hi = lo0 + (hi0 - lo0) * double(found + 1) / (kSamples - 1);
    OracleResult res;
    res.n = n;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    double flo = characteristic(q, lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // bracket narrower than one ulp
        const double fm = characteristic(q, mid);
        ++res.bisection_steps;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    res.value = 0.5 * (lo + hi);
    res.residual = std::abs(characteristic(q, res.value));
    return res;
}

/// One eigenvalue per admissible window n = smallest_admissible_n(M), ..., N,
/// strictly increasing.  Windows are disjoint under the admissibility
/// condition; that and monotonicity are verified on the way out.
inline std::vector<OracleResult> spectrum_up_to(const StepPotential& q, int N, double tol = 1e-13) {
    std::vector<OracleResult> out;
    const int n0 = smallest_admissible_n(q.max_abs());
    const double M = q.max_abs();
    for (int n = n0; n <= N; ++n) {
        if (n > n0) {
            const double prev_hi = double(n - 1) * (n - 1) + M;
            const double cur_lo = double(n) * n - M;
            if (!(prev_hi < cur_lo))
                throw std::logic_error("spectrum_up_to: windows overlap");
        }
        out.push_back(find_eigenvalue(q, n, tol));
        if (out.size() >= 2 && !(out[out.size() - 2].value < out.back().value))
            throw std::logic_error("spectrum_up_to: eigenvalues not increasing");
    }
    return out;
}

}  // namespace kpeig
