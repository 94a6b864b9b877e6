#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kpeig {

inline constexpr double kPi = std::numbers::pi;

/// Mean-zero piecewise-constant potential on [0, pi].
///
/// Stored as breakpoints 0 = x_0 < x_1 < ... < x_m = pi and values v_1..v_m
/// (value v_j on piece (x_{j-1}, x_j]).  The two-piece instance with
/// v_1 = a < 0 < b = v_2 and jump location c = x_1 is the Kronig-Penney case.
/// Instances are immutable after construction and safe to share across
/// threads.
class StepPotential {
public:
    StepPotential(std::vector<double> breakpoints, std::vector<double> values)
        : breaks_(std::move(breakpoints)), values_(std::move(values)) {
        validate();
        max_abs_ = 0.0;
        for (double v : values_) max_abs_ = std::max(max_abs_, std::abs(v));
    }

    [[nodiscard]] const std::vector<double>& breakpoints() const { return breaks_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t piece_count() const { return values_.size(); }

    /// M = max_j |v_j|, the sup norm that drives the window I_n and the
    /// admissibility condition.
    [[nodiscard]] double max_abs() const { return max_abs_; }

    [[nodiscard]] bool is_zero() const { return max_abs_ == 0.0; }
    [[nodiscard]] bool is_two_piece() const { return values_.size() == 2; }

    /// Two-piece accessors (a = low value, b = high value, c = jump point).
    [[nodiscard]] double a() const { return two_piece_value(0); }
    [[nodiscard]] double b() const { return two_piece_value(1); }
    [[nodiscard]] double c() const {
        require_two_piece();
        return breaks_[1];
    }
    /// Jump J = v_2 - v_1 of the two-piece case.
    [[nodiscard]] double jump() const { return b() - a(); }

    [[nodiscard]] double value_at(double x) const {
        for (std::size_t j = 0; j + 1 < values_.size(); ++j)
            if (x <= breaks_[j + 1]) return values_[j];
        return values_.back();
    }

private:
    void validate() const {
        if (values_.empty() || breaks_.size() != values_.size() + 1)
            throw std::invalid_argument("StepPotential: need m values and m+1 breakpoints");
        if (breaks_.front() != 0.0)
            throw std::invalid_argument("StepPotential: first breakpoint must be 0");
        if (std::abs(breaks_.back() - kPi) > 1e-12)
            throw std::invalid_argument("StepPotential: last breakpoint must be pi");
        for (std::size_t j = 0; j + 1 < breaks_.size(); ++j)
            if (!(breaks_[j] < breaks_[j + 1]))
                throw std::invalid_argument("StepPotential: breakpoints must increase strictly");
        double mean = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j)
            mean += values_[j] * (breaks_[j + 1] - breaks_[j]);
        // The downstream bounds assume C_0 = 0 exactly; reject rather than shift.
        if (std::abs(mean) > 1e-12)
            throw std::invalid_argument("StepPotential: potential is not mean-zero (|integral| = " +
                                        std::to_string(std::abs(mean)) + ")");
    }

    void require_two_piece() const {
        if (!is_two_piece())
            throw std::domain_error("StepPotential: operation requires a two-piece potential");
    }

    double two_piece_value(std::size_t j) const {
        require_two_piece();
        return values_[j];
    }

    std::vector<double> breaks_;
    std::vector<double> values_;
    double max_abs_ = 0.0;
};

/// Builds the two-piece Kronig-Penney potential with the given jump b - a > 0
/// and jump location c in (0, pi).  The mean-zero constraint
/// a c + b (pi - c) = 0 fixes a = -jump (pi - c)/pi and b = jump c/pi.
inline StepPotential make_kronig_penney(double jump, double c) {
    if (!(jump > 0.0)) throw std::domain_error("make_kronig_penney: jump must be positive");
    if (!(c > 0.0 && c < kPi)) throw std::domain_error("make_kronig_penney: c must lie in (0, pi)");
    const double a = -jump * (kPi - c) / kPi;
    const double b = jump * c / kPi;
    return StepPotential({0.0, c, kPi}, {a, b});
}

/// The zero potential as a single piece; every eigenvalue is exactly n^2.
inline StepPotential make_zero_potential() { return StepPotential({0.0, kPi}, {0.0}); }

/// Cosine Fourier coefficient C_k = (1/pi) int_0^pi q(x) cos(kx) dx, exact
/// per-piece closed form.  C_0 = 0 by the mean-zero invariant and C_{-k} = C_k.
inline double cosine_coeff(const StepPotential& q, long k) {
    if (k == 0) return 0.0;
    double s = 0.0;
    const auto& xs = q.breakpoints();
    const auto& vs = q.values();
    for (std::size_t j = 0; j < vs.size(); ++j)
        s += vs[j] * (std::sin(double(k) * xs[j + 1]) - std::sin(double(k) * xs[j]));
    return s / (kPi * double(k));
}

/// Exponential Fourier coefficient q_k = (1/pi) int_0^pi q(x) e^{-ikx} dx.
/// q_0 = 0; q_{-k} is the conjugate of q_k for real potentials.
inline std::complex<double> exp_coeff(const StepPotential& q, long k) {
    if (k == 0) return {0.0, 0.0};
    std::complex<double> s{0.0, 0.0};
    const auto& xs = q.breakpoints();
    const auto& vs = q.values();
    const std::complex<double> ik{0.0, double(k)};
    for (std::size_t j = 0; j < vs.size(); ++j)
        s += vs[j] * (std::exp(-ik * xs[j + 1]) - std::exp(-ik * xs[j]));
    return s / (-ik * kPi);
}

/// Antiderivative Q(x) = int_0^x q, piecewise linear with Q(0) = Q(pi) = 0.
inline double primitive(const StepPotential& q, double x) {
    if (x < -1e-12 || x > kPi + 1e-12)
        throw std::domain_error("primitive: x outside [0, pi]");
    x = std::clamp(x, 0.0, kPi);
    double s = 0.0;
    const auto& xs = q.breakpoints();
    const auto& vs = q.values();
    for (std::size_t j = 0; j < vs.size(); ++j) {
        if (x <= xs[j]) break;
        s += vs[j] * (std::min(x, xs[j + 1]) - xs[j]);
    }
    return s;
}

/// Mirror about pi (the pi-periodic realization of x -> q(-x)): breakpoints
/// map to pi - x in reverse order and values reverse.  An involution.
/// Fourier coefficients obey reflect(q)_k = (-1)^k q_{-k}.
inline StepPotential reflect(const StepPotential& q) {
    const auto& xs = q.breakpoints();
    const auto& vs = q.values();
    std::vector<double> rb;
    rb.reserve(xs.size());
    rb.push_back(0.0);
    for (std::size_t j = xs.size() - 2; j >= 1; --j) rb.push_back(kPi - xs[j]);
    rb.push_back(kPi);
    std::vector<double> rv(vs.rbegin(), vs.rend());
    return StepPotential(std::move(rb), std::move(rv));
}

}  // namespace kpeig
