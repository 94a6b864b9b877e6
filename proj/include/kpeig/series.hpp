#pragma once

#include <cassert>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <kpeig/kahan.hpp>
#include <kpeig/potential.hpp>

namespace kpeig {

struct condition_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Admissibility gate for spectral index n: M < (2n-1)/2 for n > 1 and
/// M <= 1/2 for n = 1.  Guarantees every denominator in the series stays
/// at least 2n-1-M away from zero on the window I_n.
inline bool condition_holds(double M, int n) {
    if (n < 1) return false;
    if (n == 1) return M <= 0.5;
    return M < (2.0 * n - 1.0) / 2.0;
}

/// Smallest n for which condition_holds(M, n) is true.
inline int smallest_admissible_n(double M) {
    if (M <= 0.5) return 1;
    int n = 2;
    while (!condition_holds(M, n)) ++n;
    return n;
}

/// Truncation orders and iteration controls for the series solver.
/// r bounds each summation index to [-r, r]; s is the series depth.
struct SeriesConfig {
    int n = 1;
    int r = 5;
    int s = 5;
    double tol = 1e-15;
    int max_iter = 50;

    void validate() const {
        if (n < 1) throw std::invalid_argument("SeriesConfig: n must be >= 1");
        if (r < 1 || s < 1) throw std::invalid_argument("SeriesConfig: r and s must be >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("SeriesConfig: tol must be positive");
        if (max_iter < 1) throw std::invalid_argument("SeriesConfig: max_iter must be >= 1");
    }
};

namespace detail {

/// Cosine coefficients for all indices |k| <= span, indexed by k + span.
struct CoeffTable {
    explicit CoeffTable(const StepPotential& q, long span) : offset(span) {
        table.resize(2 * span + 1);
        for (long k = -span; k <= span; ++k) table[std::size_t(k + span)] = cosine_coeff(q, k);
    }
    [[nodiscard]] double at(long k) const { return table[std::size_t(k + offset)]; }
    long offset;
    std::vector<double> table;
};

inline void check_gate(const StepPotential& q, const SeriesConfig& cfg, double lambda) {
    if (!condition_holds(q.max_abs(), cfg.n))
        throw condition_error("series: condition M < (2n-1)/2 fails for n = " + std::to_string(cfg.n) +
                              " (M = " + std::to_string(q.max_abs()) + ")");
    const double M = q.max_abs();
    const double nn = double(cfg.n) * cfg.n;
    // Allow a sliver beyond I_n so converged iterates sitting on the edge of
    // the window never trip the gate.
    const double slack = 1e-9 * (1.0 + nn + M);
    if (lambda < nn - M - slack || lambda > nn + M + slack)
        throw std::domain_error("series: lambda outside the window I_n");
}

}  // namespace detail

/// Truncated series term a_{r,k,n}(lambda): the sum over index tuples
/// (n_1,...,n_k), each in [-r, r], of
///
///   C_{n_1}...C_{n_k} (C_S - C_{S+2n}) / prod_j (lambda - (n + S_j)^2),
///
/// where S_j = n_1+...+n_j and S = S_k.  Tuples whose partial sums hit
/// 0 or -2n are excluded; the enumeration prunes such prefixes outright and
/// accumulates in lexicographic order with compensated summation.
inline double a_trunc(const StepPotential& q, double lambda, const SeriesConfig& cfg, int k) {
    cfg.validate();
    if (k < 1 || k > cfg.s) throw std::invalid_argument("a_trunc: k must lie in [1, s]");
    detail::check_gate(q, cfg, lambda);

    const int n = cfg.n, r = cfg.r;
    const long span = long(r) * k + 2 * n;
    const detail::CoeffTable coeffs(q, span);
    const double min_denom = (2.0 * n - 1.0) - q.max_abs();

    KahanAccumulator<> acc;
    // prefix product C_{n_1}.../denominators, extended one index at a time
    struct Frame {
        long sum;
        double prod;
    };
    std::vector<Frame> stack;
    stack.reserve(std::size_t(k));

    auto recurse = [&](auto&& self, int depth, long sum, double prod) -> void {
        if (depth == k) {
            acc.add(prod * (coeffs.at(sum) - coeffs.at(sum + 2 * n)));
            return;
        }
        for (int d = -r; d <= r; ++d) {
            if (d == 0) continue;  // C_0 = 0, whole subtree contributes nothing
            const long s2 = sum + d;
            if (s2 == 0 || s2 == -2 * n) continue;  // excluded partial sum
            const double denom = lambda - double(n + s2) * double(n + s2);
            assert(std::abs(denom) >= min_denom - 1e-9);
            self(self, depth + 1, s2, prod * coeffs.at(d) / denom);
        }
    };
    (void)min_denom;
    recurse(recurse, 0, 0, 1.0);
    return acc.value();
}

/// Value of the fixed-point map g_n and of K_n(lambda) = lambda - n^2 - g_n.
struct GValue {
    double g;
    double k_n;
};

inline GValue g_eval(const StepPotential& q, double lambda, const SeriesConfig& cfg) {
    KahanAccumulator<> acc;
    acc.add(-cosine_coeff(q, 2 * cfg.n));
    for (int k = 1; k <= cfg.s; ++k) acc.add(a_trunc(q, lambda, cfg, k));
    const double g = acc.value();
    return {g, lambda - double(cfg.n) * cfg.n - g};
}

inline double g_n(const StepPotential& q, double lambda, const SeriesConfig& cfg) {
    return g_eval(q, lambda, cfg).g;
}

/// A-priori error budget of the truncated fixed-point scheme.
///
/// lipschitz is the contraction constant L_n; truncation_bound bounds
/// |lambda_n - rho_n| (distance of the true eigenvalue to the fixed point of
/// the truncated map) and is absent when its denominator
/// (r+1)|r+1-2n| - M is nonpositive; iteration_bound(i) bounds
/// |x_{n,i} - rho_n| after i iterations started at x_{n,0} = n^2.
struct ErrorBudget {
    double lipschitz = 0.0;
    std::optional<double> truncation_bound;
    double iteration_base = 0.0;  // iteration_bound(i) = L^i * iteration_base

    [[nodiscard]] double iteration_bound(int i) const {
        return std::pow(lipschitz, double(i)) * iteration_base;
    }
    [[nodiscard]] std::optional<double> total_bound(int i) const {
        if (!truncation_bound) return std::nullopt;
        return *truncation_bound + iteration_bound(i);
    }
};

/// Evaluates the budget formulas for the two-piece (Kronig-Penney) case with
/// a < 0 < b; the zero potential yields an all-zero budget.
inline ErrorBudget error_budget(const StepPotential& q, const SeriesConfig& cfg) {
    cfg.validate();
    if (q.is_zero()) return ErrorBudget{0.0, 0.0, 0.0};
    if (!q.is_two_piece() || !(q.a() < 0.0 && q.b() > 0.0))
        throw std::domain_error("error_budget: defined for two-piece potentials with a < 0 < b");
    if (!condition_holds(q.max_abs(), cfg.n))
        throw condition_error("error_budget: condition fails for n = " + std::to_string(cfg.n));

    const double ba = q.jump();
    const double M = q.max_abs();
    const int n = cfg.n, r = cfg.r, s = cfg.s;
    const double d = (2.0 * n - 1.0) - M;

    ErrorBudget out;
    out.lipschitz = 9.0 * ba * ba / (4.0 * kPi * d * (4.0 * kPi * d - 3.0 * ba));

    const double gate = double(r + 1) * std::abs(double(r + 1 - 2 * n)) - M;
    if (gate > 0.0) {
        const double depth_term =
            std::pow(ba, s + 2) /
            (2.0 * M * std::pow(std::sqrt(2.0), s) * std::pow(kPi, s + 1) * std::pow(d, s) *
             (std::sqrt(2.0) * kPi * d - ba) * (1.0 - out.lipschitz));
        const double radius_term =
            8.0 * ba * ba /
            (kPi * kPi * double(r + 1) * double(r + 1) * gate * (1.0 - out.lipschitz));
        out.truncation_bound = depth_term + radius_term;
    }

    const double tn = 2.0 * n - 1.0;
    out.iteration_base =
        (ba / (2.0 * kPi * n) + ba * ba / (M * kPi * kPi * tn) +
         std::pow(ba, 3) / (2.0 * std::sqrt(2.0) * M * kPi * kPi * tn * (std::sqrt(2.0) * kPi * tn - ba))) /
        (1.0 - out.lipschitz);
    return out;
}

}  // namespace kpeig
