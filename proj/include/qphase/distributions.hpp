// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file distributions.hpp
 * @brief Characteristic function, Wigner, Kirkwood-Rihaczek and Husimi Q.
 *
 * Wigner convention: W(q,p) = (1/2pi) int du e^{-iup} <q+u/2|rho|q-u/2>,
 * normalized to int W dq dp = 1.
 *
 * Kirkwood-Rihaczek convention: K(q,p) = <p|rho|q><q|p>, with
 * <q|p> = e^{ipq}/sqrt(2pi) and <n|p> = i^n psi_n(p). Its q- and p-marginals
 * are the exact position and momentum densities.
 *
 * Routes whose natural normalization is not fixed here (Fourier transforms
 * of the characteristic function, the vacuum sandwich form) return raw
 * values; the calibrated entry points multiply by a constant looked up in a
 * CalibrationCache (see calibration.hpp).
 *
 * Measure: d^2 beta = dRe(beta) dIm(beta), and dq dp = 2 d^2 beta.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/grid.hpp"
#include "qphase/oracle.hpp"
#include "qphase/specialfn.hpp"

namespace qphase {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kMaxQuadrature = 10.0;

// ---------------------------------------------------------------------------
// Characteristic function and displaced parity
// ---------------------------------------------------------------------------

namespace detail {

/// Tr[m D(beta)] over the leading eff x eff block of m.
inline Complex trace_with_displacement(const Matrix& m, int eff, Complex beta) {
    Complex sum{0.0, 0.0};
    if (eff == 1) return m(0, 0) * std::exp(-0.5 * std::norm(beta));
    for_each_displacement_element(beta, eff, [&](int n, int k, Complex lower, Complex upper) {
        // Tr[m D] = sum_{ij} m_ij D_ji
        sum += m(n, n + k) * lower;
        if (k > 0) sum += m(n + k, n) * upper;
    });
    return sum;
}

inline void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorCode::invalid_input, std::string(what) + ": non-finite argument");
    }
}

}  // namespace detail

/// C(beta) = Tr[rho D(beta)].
inline Complex char_fn(const DensityOperator& rho, Complex beta) {
    detail::require_finite(beta, "char_fn");
    return detail::trace_with_displacement(rho.matrix(), rho.effective_dim(), beta);
}

/**
 * Displaced-parity Wigner function Tr[(-1)^{a^dag a} rho D(2 beta)].
 * Raw mode returns the trace (1 for the vacuum at the origin); normalized
 * mode multiplies by 1/pi, matching wigner_integral.
 */
inline double wigner_parity(const DensityOperator& rho, const PhasePoint& point, bool normalized = true) {
    const int eff = rho.effective_dim();
    Matrix pr = rho.matrix().topLeftCorner(eff, eff);
    for (int n = 1; n < eff; n += 2) pr.row(n) *= -1.0;
    const Complex t = detail::trace_with_displacement(pr, eff, 2.0 * point.beta());
    if (std::abs(t.imag()) > 1e-9) {
        throw Error(ErrorCode::invalid_input,
                    "wigner_parity: imaginary residue " + detail::format_double(t.imag()) + " (rho not Hermitian?)");
    }
    return normalized ? t.real() / kPi : t.real();
}

// ---------------------------------------------------------------------------
// Position representation
// ---------------------------------------------------------------------------

/**
 * rho written as sum_k b_k(x) conj(b_k(y)) for <x|rho|y>, where the b_k are
 * wavefunctions of the (scaled) eigenvectors of rho.
 */
class PositionRepresentation {
public:
    explicit PositionRepresentation(const DensityOperator& rho) : eff_(rho.effective_dim()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix().topLeftCorner(eff_, eff_));
        const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
        std::vector<int> keep;
        for (int k = 0; k < eff_; ++k) {
            if (es.eigenvalues()(k) > 1e-16 * top) keep.push_back(k);
        }
        factors_ = Matrix::Zero(eff_, static_cast<int>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) {
            factors_.col(static_cast<int>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(es.eigenvalues()(keep[c]));
        }
        support_ = find_support();
    }

    /// Row vector of b_k(x).
    Eigen::RowVectorXcd wavefunctions(double x) const {
        const auto psi = specialfn::hermite_functions(x, eff_);
        Eigen::RowVectorXd row(eff_);
        for (int n = 0; n < eff_; ++n) row(n) = psi[n];
        return row.cast<Complex>() * factors_;
    }

    /// <x|rho|y>.
    Complex kernel(double x, double y) const { return wavefunctions(y).dot(wavefunctions(x)); }
    double density(double x) const { return wavefunctions(x).squaredNorm(); }

    /// Half-width L beyond which the position density stays below 1e-28.
    double support() const noexcept { return support_; }
    int effective_dim() const noexcept { return eff_; }

private:
    double find_support() const {
        constexpr double kStep = 0.25;
        for (double x = 16.0; x > 0.0; x -= kStep) {
            if (std::max(density(x), density(-x)) >= 1e-28) return x + kStep;
        }
        return kStep;
    }

    int eff_;
    Matrix factors_;
    double support_ = 0.0;
};

struct WignerIntegralOptions {
    double tolerance = 1e-10;
};

/// Wigner function by direct quadrature of the position-space kernel.
inline double wigner_integral(const PositionRepresentation& pos, const PhasePoint& point,
                              const WignerIntegralOptions& opts = {}) {
    const double q = point.q();
    const double p = point.p();
    // Both q+u/2 and q-u/2 must lie inside [-L, L].
    const double u_max = 2.0 * std::max(pos.support() - std::abs(q), 1.0);
    auto integrand = [&](double u) {
        return std::polar(1.0 / (2.0 * kPi), -u * p) * pos.kernel(q + 0.5 * u, q - 0.5 * u);
    };
    const auto panels = static_cast<std::size_t>(std::ceil(2.0 * u_max / 3.0));
    const auto r = oracle::integrate_1d(integrand, -u_max, u_max, opts.tolerance, panels);
    if (std::abs(r.value.imag()) > 1e-9) {
        throw Error(ErrorCode::quadrature_failure,
                    "wigner_integral: imaginary residue " + detail::format_double(r.value.imag()) + " at (" +
                        detail::format_double(q) + ", " + detail::format_double(p) + ")");
    }
    return r.value.real();
}

inline double wigner_integral(const DensityOperator& rho, const PhasePoint& point,
                              const WignerIntegralOptions& opts = {}) {
    return wigner_integral(PositionRepresentation(rho), point, opts);
}

// ---------------------------------------------------------------------------
// Kirkwood-Rihaczek, direct
// ---------------------------------------------------------------------------

namespace detail {

inline void check_quadrature_envelope(const PhasePoint& point, const char* what) {
    if (!(std::abs(point.q()) <= kMaxQuadrature) || !(std::abs(point.p()) <= kMaxQuadrature)) {
        throw Error(ErrorCode::range, std::string(what) + ": |q|, |p| must be <= 10, got (" +
                                          format_double(point.q()) + ", " + format_double(point.p()) + ")");
    }
}

/// Components <n|q> = psi_n(q) and <n|p> = i^n psi_n(p).
inline Vector position_ket(double q, int dim) {
    const auto psi = specialfn::hermite_functions(q, dim);
    Vector v(dim);
    for (int n = 0; n < dim; ++n) v(n) = psi[n];
    return v;
}

inline Vector momentum_ket(double p, int dim) {
    const auto psi = specialfn::hermite_functions(p, dim);
    static const Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Vector v(dim);
    for (int n = 0; n < dim; ++n) v(n) = kPhase[n % 4] * psi[n];
    return v;
}

/// <p|m|q><q|p> for an arbitrary operator m restricted to its leading eff block.
inline Complex kr_sandwich(const Matrix& m, int eff, const PhasePoint& point) {
    const Vector qk = position_ket(point.q(), eff);
    const Vector pk = momentum_ket(point.p(), eff);
    const Complex sandwich = pk.dot(m.topLeftCorner(eff, eff) * qk);  // dot conjugates pk
    return sandwich * std::polar(1.0 / std::sqrt(2.0 * kPi), point.p() * point.q());
}

}  // namespace detail

/// K(q,p) = <p|rho|q><q|p>.
inline Complex kr_direct(const DensityOperator& rho, const PhasePoint& point) {
    detail::check_quadrature_envelope(point, "kr_direct");
    return detail::kr_sandwich(rho.matrix(), rho.effective_dim(), point);
}

// ---------------------------------------------------------------------------
// Husimi Q
// ---------------------------------------------------------------------------

/// Q(alpha) = <alpha|rho|alpha>; integrates to pi over d^2 alpha.
inline double q_function(const DensityOperator& rho, Complex alpha) {
    detail::require_finite(alpha, "q_function");
    const int eff = rho.effective_dim();
    const Vector c = coherent_amplitudes(alpha, eff);
    const Complex v = c.dot(rho.matrix().topLeftCorner(eff, eff) * c);
    if (v.real() < -1e-10) {
        throw Error(ErrorCode::positivity_violation,
                    "q_function: <alpha|rho|alpha> = " + detail::format_double(v.real()) + " is negative");
    }
    if (std::abs(v.imag()) > 1e-10) {
        throw Error(ErrorCode::invalid_input, "q_function: imaginary residue " + detail::format_double(v.imag()));
    }
    return std::max(v.real(), 0.0);
}

// ---------------------------------------------------------------------------
// Transforms of the sampled characteristic function
// ---------------------------------------------------------------------------

struct LatticeOptions {
    double step = 0.1;
    double start_extent = 6.0;
    double max_extent = 25.0;
    double edge_tolerance = 1e-10;
};

/**
 * C(beta) sampled on the square lattice Re beta, Im beta in {-B, ..., B}
 * with spacing h. B grows from start_extent until |C| < edge_tolerance on
 * the boundary of the square.
 *
 * Both transforms below are raw lattice sums h^2 sum e^{...} C; their
 * overall constants are supplied by calibration.
 */
class CharFnLattice {
public:
    explicit CharFnLattice(const DensityOperator& rho, const LatticeOptions& opts = {}) : step_(opts.step) {
        if (!(opts.step > 0.0) || !(opts.max_extent >= opts.start_extent)) {
            throw Error(ErrorCode::invalid_input, "lattice options: need step > 0 and max_extent >= start_extent");
        }
        const int eff = rho.effective_dim();
        const Matrix m = rho.matrix().topLeftCorner(eff, eff);
        auto edge = [&](double b) {
            const int k = static_cast<int>(std::lround(b / step_));
            double worst = 0.0;
            for (int j = -k; j <= k; ++j) {
                const double t = j * step_;
                const double s = k * step_;
                for (Complex z : {Complex(s, t), Complex(-s, t), Complex(t, s), Complex(t, -s)}) {
                    worst = std::max(worst, std::abs(detail::trace_with_displacement(m, eff, z)));
                }
            }
            return worst;
        };
        double extent = opts.start_extent;
        while (edge(extent) >= opts.edge_tolerance) {
            extent += 1.0;
            if (extent > opts.max_extent) {
                double needed = extent;
                while (needed < 200.0 && edge(needed) >= opts.edge_tolerance) needed += 1.0;
                throw Error(ErrorCode::domain, "characteristic function exceeds " +
                                                   detail::format_double(opts.edge_tolerance) +
                                                   " at the lattice edge; required extent ~" +
                                                   detail::format_double(needed) + " > max_extent " +
                                                   detail::format_double(opts.max_extent));
            }
        }
        half_ = static_cast<int>(std::lround(extent / step_));
        const int n = 2 * half_ + 1;
        nodes_.resize(n);
        for (int i = 0; i < n; ++i) nodes_[i] = (i - half_) * step_;
        samples_ = Matrix(n, n);
        detail::parallel_for(n, [&](int i) {
            for (int j = 0; j < n; ++j) {
                samples_(i, j) = detail::trace_with_displacement(m, eff, Complex(nodes_[i], nodes_[j]));
            }
        });
        kr_samples_ = samples_;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) kr_samples_(i, j) *= std::polar(1.0, nodes_[i] * nodes_[j]);
        }
    }

    double extent() const noexcept { return half_ * step_; }
    double step() const noexcept { return step_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    /// samples()(i, j) = C(nodes[i] + i nodes[j]).
    const Matrix& samples() const noexcept { return samples_; }

    /// h^2 sum_beta e^{alpha beta* - alpha* beta} C(beta), alpha the point's label.
    Matrix wigner_raw(const GridSpec& grid) const { return transform(samples_, grid); }
    Complex wigner_raw(const PhasePoint& point) const { return transform(samples_, point); }

    /// h^2 sum_alpha e^{beta alpha* - beta* alpha} e^{(alpha^2 - alpha*^2)/4} C(alpha), beta the point's label.
    Matrix kr_raw(const GridSpec& grid) const { return transform(kr_samples_, grid); }
    Complex kr_raw(const PhasePoint& point) const { return transform(kr_samples_, point); }

private:
    // Both kernels reduce to e^{i sqrt2 (p x - q y)} over lattice nodes (x, y).
    Matrix transform(const Matrix& s, const GridSpec& grid) const {
        grid.validate();
        const int n = static_cast<int>(nodes_.size());
        Matrix bq(grid.q.count, n);
        Matrix ap(n, grid.p.count);
        for (int j = 0; j < n; ++j) {
            for (int iq = 0; iq < grid.q.count; ++iq) bq(iq, j) = std::polar(1.0, -kSqrt2 * grid.q.at(iq) * nodes_[j]);
            for (int ip = 0; ip < grid.p.count; ++ip) ap(j, ip) = std::polar(1.0, kSqrt2 * grid.p.at(ip) * nodes_[j]);
        }
        return step_ * step_ * (bq * s.transpose() * ap);
    }

    Complex transform(const Matrix& s, const PhasePoint& point) const {
        const int n = static_cast<int>(nodes_.size());
        Eigen::RowVectorXcd bq(n);
        Vector ap(n);
        for (int j = 0; j < n; ++j) {
            bq(j) = std::polar(1.0, -kSqrt2 * point.q() * nodes_[j]);
            ap(j) = std::polar(1.0, kSqrt2 * point.p() * nodes_[j]);
        }
        return step_ * step_ * (bq * s.transpose() * ap)(0, 0);
    }

    double step_;
    int half_ = 0;
    std::vector<double> nodes_;
    Matrix samples_;
    Matrix kr_samples_;
};

// ---------------------------------------------------------------------------
// Vacuum sandwich form
// ---------------------------------------------------------------------------

/**
 * Raw value of (e^{beta^2 + Y^2}/sqrt2) <-sqrt2 iY| e^{a^2/2} rho e^{-a^dag^2/2} |sqrt2 X>
 * with beta = (X + iY)/sqrt2 and (X, Y) = (q, p).
 *
 * The truncated exponentials are built once per dimension. Every value is
 * computed at the working dimension N and again at 2N; a relative change
 * above 1e-6 is reported as a truncation error.
 */
class VacuumFormEvaluator {
public:
    explicit VacuumFormEvaluator(const DensityOperator& rho, int min_dim = 16)
        : rho_(rho.matrix()) {
        const int n = std::max(rho.dim(), min_dim);
        levels_[0] = make_level(n);
        levels_[1] = make_level(2 * n);
    }

    /// Optional sandwich bra amplitude override: +sqrt2 iY instead of -sqrt2 iY.
    Complex raw(const PhasePoint& point, bool flip_bra_sign = false) const {
        const Complex v0 = evaluate(levels_[0], point, flip_bra_sign);
        const Complex v1 = evaluate(levels_[1], point, flip_bra_sign);
        const double change = std::abs(v1 - v0);
        if (change > 1e-6 * std::abs(v1) + 1e-14) {
            throw Error(ErrorCode::truncation, "vacuum form changed by " + detail::format_double(change) +
                                                   " between dim " + std::to_string(levels_[0].dim) + " and " +
                                                   std::to_string(levels_[1].dim));
        }
        return v1;
    }

private:
    struct Level {
        int dim;
        Matrix up;    // exp(+a^dag^2/2)
        Matrix down;  // exp(-a^dag^2/2)
        Matrix rho;
    };

    Level make_level(int dim) const {
        const auto [a, ad] = ladder(dim);
        const Matrix ad2 = ad.matrix() * ad.matrix();
        Level l{dim, expm(FockOperator(0.5 * ad2)).matrix(), expm(FockOperator(-0.5 * ad2)).matrix(),
                Matrix::Zero(dim, dim)};
        const int d = std::min<int>(dim, static_cast<int>(rho_.rows()));
        l.rho.topLeftCorner(d, d) = rho_.topLeftCorner(d, d);
        return l;
    }

    static Complex evaluate(const Level& l, const PhasePoint& point, bool flip) {
        const double x = point.q();
        const double y = point.p();
        const Vector u = l.up * coherent_amplitudes(Complex(0.0, (flip ? 1.0 : -1.0) * kSqrt2 * y), l.dim);
        const Vector v = l.down * coherent_amplitudes(Complex(kSqrt2 * x, 0.0), l.dim);
        const Complex beta = point.beta();
        const Complex pref = std::exp(beta * beta + y * y) / kSqrt2;
        return pref * u.dot(l.rho * v);
    }

    Matrix rho_;
    Level levels_[2];
};

inline Complex kr_vacuum_form_raw(const DensityOperator& rho, const PhasePoint& point) {
    return VacuumFormEvaluator(rho).raw(point);
}

// ---------------------------------------------------------------------------
// Calibration cache
// ---------------------------------------------------------------------------

struct Calibration {
    std::string route;
    Complex constant;
    std::string reference;
    double residual = 0.0;
};

/// Per-route calibration constants. Safe for concurrent use.
class CalibrationCache {
public:
    void store(const Calibration& c) {
        std::lock_guard lock(mutex_);
        entries_[c.route] = c;
    }

    std::optional<Calibration> find(const std::string& route) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(route);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    Calibration require(const std::string& route) const {
        auto c = find(route);
        if (!c) throw Error(ErrorCode::uncalibrated_route, "route '" + route + "' has no calibration");
        return *c;
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, Calibration> entries_;
};

/// Calibrated Wigner grid from the characteristic function (route wigner.charfn).
inline DistributionGrid wigner_from_charfn(const DensityOperator& rho, const GridSpec& grid,
                                           const CalibrationCache& cache, const LatticeOptions& opts = {}) {
    const Calibration c = cache.require("wigner.charfn");
    const CharFnLattice lattice(rho, opts);
    GridMetadata meta;
    meta.route = "wigner.charfn";
    meta.dim = rho.dim();
    meta.calibration = c.constant;
    return DistributionGrid(grid, c.constant * lattice.wigner_raw(grid), std::move(meta));
}

/// Calibrated K from the characteristic function (route kr.charfn).
inline Complex kr_from_charfn(const DensityOperator& rho, const PhasePoint& point, const CalibrationCache& cache,
                              const LatticeOptions& opts = {}) {
    const Calibration c = cache.require("kr.charfn");
    return c.constant * CharFnLattice(rho, opts).kr_raw(point);
}

/// Calibrated K from the vacuum sandwich form (route kr.vacuum).
inline Complex kr_vacuum_form(const DensityOperator& rho, const PhasePoint& point, const CalibrationCache& cache) {
    const Calibration c = cache.require("kr.vacuum");
    return c.constant * kr_vacuum_form_raw(rho, point);
}

}  // namespace qphase
