#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <kpeig/potential.hpp>

namespace kpeig {

/// Gauss-Legendre rule on [-1, 1].  Nodes are the Legendre roots, located by
/// Newton iteration from the Chebyshev initial guess; weights follow from the
/// derivative.  Accurate to a few ulps for the orders used here.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int m) {
        nodes.resize(std::size_t(m));
        weights.resize(std::size_t(m));
        for (int i = 0; i < m; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= m; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                pp = m * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[std::size_t(m - 1 - i)] = x;
            weights[std::size_t(m - 1 - i)] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

inline const GaussLegendre& gauss64() {
    static const GaussLegendre rule(64);
    return rule;
}

/// Integrates a complex-valued integrand over [lo, hi] with 64-node panels no
/// wider than max_width (panels resolve the e^{-i2nx} oscillation).
template <typename F>
std::complex<double> panel_integrate(F&& f, double lo, double hi, double max_width) {
    const auto& rule = gauss64();
    const int panels = std::max(1, int(std::ceil((hi - lo) / max_width)));
    std::complex<double> total{0.0, 0.0};
    for (int p = 0; p < panels; ++p) {
        const double a = lo + (hi - lo) * double(p) / panels;
        const double b = lo + (hi - lo) * double(p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += half * acc;
    }
    return total;
}

}  // namespace kpeig
