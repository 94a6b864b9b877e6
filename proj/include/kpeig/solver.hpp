#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <kpeig/series.hpp>

namespace kpeig {

struct no_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditionCheck {
    bool ok;
    int smallest_admissible;
    std::string message;
};

/// Checks the admissibility condition for (q, n) and reports the smallest
/// index that would be admissible for this potential.
inline ConditionCheck check_condition(const StepPotential& q, int n) {
    const double M = q.max_abs();
    const bool ok = condition_holds(M, n);
    const int least = smallest_admissible_n(M);
    std::string msg;
    if (!ok)
        msg = "condition M < (2n-1)/2 fails for n = " + std::to_string(n) +
              " (M = " + std::to_string(M) + "); smallest admissible n = " + std::to_string(least);
    return {ok, least, msg};
}

struct EigenvalueEstimate {
    int n = 0;
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;       // |K_n(value)|
    double window_lo = 0.0;      // I_n = [n^2 - M, n^2 + M]
    double window_hi = 0.0;
    ErrorBudget budget;
    std::vector<double> history;  // x_0 = n^2, x_1, ..., final iterate
};

/// Fixed-point iteration x_{i+1} = n^2 + g_n(x_i) from x_0 = n^2.
///
/// Stops when |x_{i+1} - x_i| <= max(tol, 4 eps |x|); the quoted tolerances
/// below double precision are capped at what the arithmetic supports.  Every
/// iterate is checked against (a slight enlargement of) the window I_n, where
/// the series gate guarantees g is defined; leaving it raises a domain error
/// rather than clamping.
inline EigenvalueEstimate solve(const StepPotential& q, const SeriesConfig& cfg) {
    cfg.validate();
    const ConditionCheck gate = check_condition(q, cfg.n);
    if (!gate.ok) throw condition_error("solve: " + gate.message);
    if (!q.is_zero() && (!q.is_two_piece() || !(q.a() < 0.0 && q.b() > 0.0)))
        throw std::domain_error("solve: error budget requires a two-piece potential with a < 0 < b");

    EigenvalueEstimate est;
    est.n = cfg.n;
    est.budget = error_budget(q, cfg);
    const double nn = double(cfg.n) * cfg.n;
    const double M = q.max_abs();
    est.window_lo = nn - M;
    est.window_hi = nn + M;

    double x = nn;
    est.history.push_back(x);
    for (int i = 0; i < cfg.max_iter; ++i) {
        const double next = nn + g_eval(q, x, cfg).g;
        est.history.push_back(next);
        const double step = std::abs(next - x);
        x = next;
        if (step <= std::max(cfg.tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x))) {
            est.iterations = i + 1;
            est.value = x;
            est.residual = std::abs(g_eval(q, x, cfg).k_n);
            return est;
        }
    }
    throw no_convergence("solve: no convergence within " + std::to_string(cfg.max_iter) +
                         " iterations (tol may be below achievable precision)");
}

}  // namespace kpeig
