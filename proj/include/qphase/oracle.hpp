// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file oracle.hpp
 * @brief Reference quadrature and series engines.
 *
 * These are the slow, simple engines used to produce expected values and to
 * cross-check the fast evaluators. They depend on nothing else in the
 * library, so they can never silently share a bug with what they validate.
 *
 * Quadrature is fixed-order Gauss-Legendre on equal panels; the panel count
 * doubles until two successive estimates agree to the requested tolerance.
 * The schedule is deterministic, so repeated calls are bit-identical.
 */

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "qphase/error.hpp"

namespace qphase::oracle {

using Complex = std::complex<double>;

struct QuadratureResult {
    Complex value;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

inline constexpr int kRuleOrder = 20;
inline constexpr int kMaxDoublings = 20;
inline constexpr double kMinTolerance = 1e-13;

struct GaussLegendreRule {
    std::array<double, kRuleOrder> nodes{};
    std::array<double, kRuleOrder> weights{};
};

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
inline const GaussLegendreRule& gauss_legendre_rule() {
    static const GaussLegendreRule rule = [] {
        GaussLegendreRule r;
        constexpr int n = kRuleOrder;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            // recompute the derivative at the converged node
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.nodes[i] = -x;
            r.weights[i] = w;
            r.nodes[n - 1 - i] = x;
            r.weights[n - 1 - i] = w;
        }
        return r;
    }();
    return rule;
}

namespace detail {

inline void check_tolerance(double tol) {
    if (!(tol >= kMinTolerance) || !std::isfinite(tol)) {
        throw Error(ErrorCode::invalid_input,
                    "quadrature tolerance must be finite and >= 1e-13, got " + std::to_string(tol));
    }
}

inline Complex checked(Complex v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorCode::invalid_input, "integrand is not finite on the domain");
    }
    return v;
}

template <class F>
Complex panel_sum_1d(F& f, double a, double b, std::size_t panels, std::size_t& evaluations) {
    const auto& rule = gauss_legendre_rule();
    const double width = (b - a) / static_cast<double>(panels);
    Complex total{0.0, 0.0};
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * width;
        Complex panel{0.0, 0.0};
        for (int i = 0; i < kRuleOrder; ++i) {
            panel += rule.weights[i] * checked(f(mid + 0.5 * width * rule.nodes[i]));
        }
        total += 0.5 * width * panel;
    }
    evaluations += panels * kRuleOrder;
    return total;
}

template <class F>
Complex panel_sum_2d(F& f, double ax, double bx, double ay, double by, std::size_t panels,
                     std::size_t& evaluations) {
    const auto& rule = gauss_legendre_rule();
    const double wx = (bx - ax) / static_cast<double>(panels);
    const double wy = (by - ay) / static_cast<double>(panels);
    Complex total{0.0, 0.0};
    for (std::size_t px = 0; px < panels; ++px) {
        const double mx = ax + (static_cast<double>(px) + 0.5) * wx;
        for (std::size_t py = 0; py < panels; ++py) {
            const double my = ay + (static_cast<double>(py) + 0.5) * wy;
            Complex panel{0.0, 0.0};
            for (int i = 0; i < kRuleOrder; ++i) {
                const double x = mx + 0.5 * wx * rule.nodes[i];
                Complex row{0.0, 0.0};
                for (int j = 0; j < kRuleOrder; ++j) {
                    row += rule.weights[j] * checked(f(x, my + 0.5 * wy * rule.nodes[j]));
                }
                panel += rule.weights[i] * row;
            }
            total += 0.25 * wx * wy * panel;
        }
    }
    evaluations += panels * panels * kRuleOrder * kRuleOrder;
    return total;
}

// Floor for the reported error: the difference of two estimates can vanish
// exactly while rounding in either estimate does not.
inline double rounding_floor(Complex v) {
    return 16.0 * std::numeric_limits<double>::epsilon() * std::abs(v);
}

}  // namespace detail

/**
 * Integrates a complex-valued f over [a, b].
 *
 * Starts from `initial_panels` equal panels and doubles until successive
 * estimates differ by less than `tol`; the last difference (plus a rounding
 * floor) is reported as the error estimate.
 */
template <class F>
QuadratureResult integrate_1d(F&& f, double a, double b, double tol, std::size_t initial_panels = 1) {
    detail::check_tolerance(tol);
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
        throw Error(ErrorCode::invalid_input, "integration interval must be finite with b > a");
    }
    if (initial_panels == 0) initial_panels = 1;
    QuadratureResult result;
    std::size_t panels = initial_panels;
    Complex previous = detail::panel_sum_1d(f, a, b, panels, result.evaluations);
    double last_diff = std::numeric_limits<double>::infinity();
    for (int d = 0; d < kMaxDoublings; ++d) {
        panels *= 2;
        const Complex current = detail::panel_sum_1d(f, a, b, panels, result.evaluations);
        last_diff = std::abs(current - previous);
        previous = current;
        if (last_diff < tol) {
            result.value = current;
            result.error_estimate = last_diff + detail::rounding_floor(current);
            return result;
        }
    }
    throw Error(ErrorCode::convergence_failure,
                "integrate_1d did not converge after " + std::to_string(kMaxDoublings) +
                    " doublings on [" + std::to_string(a) + ", " + std::to_string(b) +
                    "]; last difference " + std::to_string(last_diff) + ", tol " + std::to_string(tol));
}

struct Rectangle {
    double x_min;
    double x_max;
    double y_min;
    double y_max;
};

/// Tensor-product extension of integrate_1d; both axes double together.
template <class F>
QuadratureResult integrate_2d(F&& f, const Rectangle& domain, double tol, std::size_t initial_panels = 1) {
    detail::check_tolerance(tol);
    if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min) ||
        !std::isfinite(domain.x_min + domain.x_max + domain.y_min + domain.y_max)) {
        throw Error(ErrorCode::invalid_input, "integration rectangle must be finite and non-degenerate");
    }
    if (initial_panels == 0) initial_panels = 1;
    QuadratureResult result;
    std::size_t panels = initial_panels;
    Complex previous = detail::panel_sum_2d(f, domain.x_min, domain.x_max, domain.y_min, domain.y_max,
                                            panels, result.evaluations);
    double last_diff = std::numeric_limits<double>::infinity();
    // 2-D work grows 4x per doubling; cap lower than in 1-D.
    for (int d = 0; d < 10; ++d) {
        panels *= 2;
        const Complex current = detail::panel_sum_2d(f, domain.x_min, domain.x_max, domain.y_min,
                                                     domain.y_max, panels, result.evaluations);
        last_diff = std::abs(current - previous);
        previous = current;
        if (last_diff < tol) {
            result.value = current;
            result.error_estimate = last_diff + detail::rounding_floor(current);
            return result;
        }
    }
    throw Error(ErrorCode::convergence_failure,
                "integrate_2d did not converge; last difference " + std::to_string(last_diff) +
                    ", tol " + std::to_string(tol));
}

/**
 * Sums term(0) + term(1) + ... until five consecutive terms are each below
 * `tol` in magnitude.
 */
template <class Term>
Complex series_sum(Term&& term, double tol, std::size_t max_terms) {
    if (!(tol > 0.0)) throw Error(ErrorCode::invalid_input, "series tolerance must be positive");
    Complex sum{0.0, 0.0};
    int small_run = 0;
    for (std::size_t k = 0; k < max_terms; ++k) {
        const Complex t = detail::checked(Complex(term(k)));
        sum += t;
        small_run = std::abs(t) < tol ? small_run + 1 : 0;
        if (small_run >= 5) return sum;
    }
    throw Error(ErrorCode::divergence_suspected,
                "series did not reach its tail condition within " + std::to_string(max_terms) + " terms");
}

}  // namespace qphase::oracle
