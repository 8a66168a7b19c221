// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file specialfn.hpp
 * @brief Hermite polynomials, Hermite functions and associated Laguerre
 *        polynomials.
 *
 * Hermite polynomials use the physicists' convention throughout:
 * H_0 = 1, H_1 = 2x, H_{n+1} = 2x H_n - 2n H_{n-1}, with generating function
 * exp(-t^2 + 2tx) = sum_k H_k(x) t^k / k!.  The probabilists' He_n are never
 * used.
 */

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "qphase/error.hpp"
#include "qphase/oracle.hpp"

namespace qphase::specialfn {

inline constexpr int kMaxOrder = 200;
inline constexpr double kMaxArgument = 10.0;

namespace detail {

inline void check_envelope(const char* what, int n, double x, int max_n, double max_x) {
    if (n < 0 || n > max_n || !std::isfinite(x) || std::abs(x) > max_x) {
        throw Error(ErrorCode::range, std::string(what) + ": (n=" + std::to_string(n) +
                                          ", x=" + std::to_string(x) + ") outside envelope n <= " +
                                          std::to_string(max_n) + ", |x| <= " + std::to_string(max_x));
    }
}

}  // namespace detail

/// H_n(x) by the three-term recurrence. Envelope: n <= 200, |x| <= 10.
inline double hermite(int n, double x) {
    detail::check_envelope("hermite", n, x, kMaxOrder, kMaxArgument);
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

/**
 * H_n(x) from the integral form (2^n / sqrt(pi)) * int (x + i t)^n e^{-t^2} dt,
 * evaluated with the oracle quadrature on t in [-9, 9].
 *
 * The integrand is rescaled by s^n with s = max(1, sqrt(x^2 + n/2)) so the
 * absolute quadrature tolerance is meaningful for every order. The imaginary
 * part must vanish; a residue above 1e-10 (in units of (2s)^n) is reported
 * as a quadrature failure.
 */
inline double hermite_integral(int n, double x) {
    detail::check_envelope("hermite_integral", n, x, 30, 5.0);
    const double s = std::max(1.0, std::sqrt(x * x + 0.5 * n));
    auto integrand = [n, x, s](double t) {
        const std::complex<double> z(x / s, t / s);
        return std::pow(z, n) * std::exp(-t * t);
    };
    const auto r = oracle::integrate_1d(integrand, -9.0, 9.0, 1e-13, 18);
    const double unit = std::pow(2.0 * s, n);
    const std::complex<double> h = r.value * unit / std::sqrt(std::numbers::pi);
    if (std::abs(h.imag()) > 1e-10 * unit) {
        throw Error(ErrorCode::quadrature_failure,
                    "hermite_integral: imaginary residue " + std::to_string(h.imag()) + " for n=" +
                        std::to_string(n) + ", x=" + std::to_string(x));
    }
    return h.real();
}

/**
 * Values psi_0(x) ... psi_{count-1}(x) of the normalized Hermite functions
 * psi_n(x) = exp(-x^2/2) H_n(x) / sqrt(2^n sqrt(pi) n!).
 *
 * Uses psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}, which
 * never forms a factorial. No envelope check; callers own the range.
 */
template <class T = double>
std::vector<T> hermite_functions(T x, int count) {
    std::vector<T> psi(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return psi;
    using std::exp;
    using std::sqrt;
    psi[0] = exp(-x * x / 2) / sqrt(sqrt(std::numbers::pi_v<T>));
    if (count == 1) return psi;
    psi[1] = sqrt(T(2)) * x * psi[0];
    for (int n = 1; n + 1 < count; ++n) {
        psi[n + 1] = sqrt(T(2) / T(n + 1)) * x * psi[n] - sqrt(T(n) / T(n + 1)) * psi[n - 1];
    }
    return psi;
}

/// Single Hermite function psi_n(X). Envelope: n <= 200, |X| <= 10.
inline double hermite_function(int n, double x) {
    detail::check_envelope("hermite_function", n, x, kMaxOrder, kMaxArgument);
    return hermite_functions(x, n + 1).back();
}

/**
 * Partial sum sum_{k=0}^{K} H_{k+shift}(x) t^k / k!.
 *
 * shift = 0 is the generating-function partial sum; shift = 2n is the
 * right-hand side of the derivative-shift identity
 * d^{2n}/dt^{2n} sum_k H_k t^k/k! = sum_k H_{k+2n} t^k/k!.
 * Templated on the scalar so finite-difference checks can run in extended
 * precision.
 */
template <class T = double>
T generating_shifted(T t, T x, int terms, int shift) {
    // H_shift and H_{shift+1} first.
    T h_prev = T(1);
    T h_cur = T(2) * x;
    for (int k = 1; k <= shift; ++k) {
        const T next = T(2) * x * h_cur - T(2) * T(k) * h_prev;
        h_prev = h_cur;
        h_cur = next;
    }
    // now h_prev = H_shift, h_cur = H_{shift+1}
    T sum = h_prev;
    T coeff = T(1);  // t^k / k!
    T h_k = h_prev;
    T h_k1 = h_cur;
    for (int k = 1; k <= terms; ++k) {
        coeff *= t / T(k);
        sum += h_k1 * coeff;
        const int order = shift + k;  // h_k1 = H_order
        const T next = T(2) * x * h_k1 - T(2) * T(order) * h_k;
        h_k = h_k1;
        h_k1 = next;
    }
    return sum;
}

/// sum_{k=0}^{K} H_k(x) t^k / k!; tends to exp(-t^2 + 2tx). Envelope |t| <= 1, |x| <= 5, K <= 200.
template <class T = double>
T generating_partial(T t, T x, int terms) {
    using std::abs;
    if (terms < 1 || terms > kMaxOrder || !(abs(t) <= T(1)) || !(abs(x) <= T(5))) {
        throw Error(ErrorCode::range, "generating_partial: outside envelope |t| <= 1, |x| <= 5, 1 <= K <= 200");
    }
    // h_k = H_k t^k / k! obeys h_{k+1} = 2t (x h_k - t h_{k-1}) / (k+1).
    // For t x < 0 the terms cancel down to e^{-11} from partial sums near e^{11}; binary64 input
    // is summed in long double.
    using A = std::conditional_t<std::is_same_v<T, double>, long double, T>;
    const A ta = t;
    const A xa = x;
    A h_prev = A(1);
    A sum = h_prev;
    A h_cur = A(2) * ta * xa;
    sum += h_cur;
    for (int k = 1; k < terms; ++k) {
        const A next = A(2) * ta * (xa * h_cur - ta * h_prev) / A(k + 1);
        h_prev = h_cur;
        h_cur = next;
        sum += h_cur;
    }
    return static_cast<T>(sum);
}

/**
 * Associated Laguerre polynomial L_n^{(k)}(x) for integer k >= -n.
 *
 * Non-negative k uses the forward recurrence
 * (m+1) L_{m+1} = (2m+1+k-x) L_m - (m+k) L_{m-1}; negative k is mapped
 * through L_n^{(-j)}(x) = (-x)^j (n-j)!/n! L_{n-j}^{(j)}(x).
 */
inline double laguerre(int n, int k, double x) {
    if (n < 0 || n > kMaxOrder || k < -n || !std::isfinite(x) || x < 0.0) {
        throw Error(ErrorCode::range, "laguerre: requires 0 <= n <= 200, k >= -n, x >= 0");
    }
    if (k < 0) {
        const int j = -k;
        const double log_ratio = std::lgamma(n - j + 1.0) - std::lgamma(n + 1.0);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        const double scale = x == 0.0 ? 0.0 : sign * std::exp(j * std::log(x) + log_ratio);
        return scale * laguerre(n - j, j, x);
    }
    double l0 = 1.0;
    if (n == 0) return l0;
    double l1 = 1.0 + k - x;
    for (int m = 1; m < n; ++m) {
        const double l2 = ((2.0 * m + 1.0 + k - x) * l1 - (m + k) * l0) / (m + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

}  // namespace qphase::specialfn
