// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fockspace.hpp
 * @brief Truncated Fock-space linear algebra for a single bosonic mode.
 *
 * Conventions: hbar = 1, a = (q + i p)/sqrt(2), <q|p> = e^{ipq}/sqrt(2 pi).
 * A phase-space point (q, p) carries the complex label beta = (q + i p)/sqrt(2).
 *
 * All matrices are dim x dim over the basis |0>, ..., |dim-1>. Every state
 * constructor reports the probability mass it had to drop beyond the
 * truncation and refuses to build a state whose tail exceeds the configured
 * tolerance (1e-10 by default).
 */

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qphase/error.hpp"
#include "qphase/specialfn.hpp"

namespace qphase {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kDefaultDim = 64;
inline constexpr double kDefaultTailTolerance = 1e-10;

namespace detail {

inline void require_dim(int dim, int minimum, const char* what) {
    if (dim < minimum) {
        throw Error(ErrorCode::invalid_dimension,
                    std::string(what) + ": dimension must be >= " + std::to_string(minimum) + ", got " +
                        std::to_string(dim));
    }
}

inline bool all_finite(const Matrix& m) {
    return m.allFinite();
}

inline std::string format_double(double v) {
    // JSON readers take "-0" as the integer 0; keep the sign bit through a round trip.
    if (v == 0.0 && std::signbit(v)) return "-0.0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_shortest(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Complex amplitudes c_0 .. c_{dim-1} over the Fock basis.
class TruncatedVector {
public:
    explicit TruncatedVector(Vector amps) : amps_(std::move(amps)) {
        detail::require_dim(static_cast<int>(amps_.size()), 1, "TruncatedVector");
    }

    int dim() const noexcept { return static_cast<int>(amps_.size()); }
    const Vector& amps() const noexcept { return amps_; }
    Complex operator[](int n) const { return amps_(n); }
    double norm_squared() const { return amps_.squaredNorm(); }

private:
    Vector amps_;
};

/// General dim x dim operator. May be non-unitary (e.g. exp(-a^dag^2 / 2)).
class FockOperator {
public:
    explicit FockOperator(Matrix m) : matrix_(std::move(m)) {
        detail::require_dim(static_cast<int>(matrix_.rows()), 1, "FockOperator");
        if (matrix_.rows() != matrix_.cols()) {
            throw Error(ErrorCode::invalid_dimension, "FockOperator must be square");
        }
    }

    int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const noexcept { return matrix_; }
    Complex operator()(int row, int col) const { return matrix_(row, col); }

    FockOperator adjoint() const { return FockOperator(matrix_.adjoint()); }

    friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
        if (a.dim() != b.dim()) throw Error(ErrorCode::invalid_dimension, "operator dimension mismatch");
        return FockOperator(a.matrix_ * b.matrix_);
    }

    /// Diagnostics attached by the constructing operation (e.g. underflow).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    Matrix matrix_;
    std::vector<std::string> warnings_;
};

/**
 * Density matrix. Construction validates: Hermitian within 1e-12 entrywise,
 * real trace in [1 - tail_tolerance, 1 + 1e-12], smallest eigenvalue
 * >= -1e-10.
 */
class DensityOperator {
public:
    static DensityOperator from_matrix(Matrix m, double tail_tolerance = kDefaultTailTolerance) {
        return DensityOperator(std::move(m), tail_tolerance);
    }

    static DensityOperator pure(const TruncatedVector& v, double tail_tolerance = kDefaultTailTolerance) {
        return DensityOperator(v.amps() * v.amps().adjoint(), tail_tolerance);
    }

    int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const noexcept { return matrix_; }
    Complex operator()(int row, int col) const { return matrix_(row, col); }
    double trace() const { return matrix_.trace().real(); }

    /// Same state embedded in a larger truncation (zero-padded).
    DensityOperator padded(int new_dim) const {
        if (new_dim < dim()) throw Error(ErrorCode::invalid_dimension, "padded() cannot shrink");
        Matrix m = Matrix::Zero(new_dim, new_dim);
        m.topLeftCorner(dim(), dim()) = matrix_;
        DensityOperator out;
        out.matrix_ = std::move(m);
        return out;
    }

    /// Number of leading basis states carrying any weight above `cutoff`.
    int effective_dim(double cutoff = 1e-18) const {
        int eff = 1;
        for (int n = 0; n < dim(); ++n) {
            if (matrix_.row(n).cwiseAbs().maxCoeff() > cutoff) eff = n + 1;
        }
        return eff;
    }

private:
    DensityOperator() = default;

    DensityOperator(Matrix m, double tail_tolerance) : matrix_(std::move(m)) {
        detail::require_dim(static_cast<int>(matrix_.rows()), 1, "DensityOperator");
        if (matrix_.rows() != matrix_.cols()) {
            throw Error(ErrorCode::invalid_dimension, "density matrix must be square");
        }
        if (!detail::all_finite(matrix_)) throw Error(ErrorCode::invalid_input, "density matrix has non-finite entries");
        const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-12) {
            throw Error(ErrorCode::invalid_input, "density matrix not Hermitian (deviation " + detail::format_double(asym) + ")");
        }
        const Complex tr = matrix_.trace();
        if (std::abs(tr.imag()) > 1e-12 || tr.real() < 1.0 - tail_tolerance || tr.real() > 1.0 + 1e-12) {
            throw Error(ErrorCode::invalid_input,
                        "density matrix trace " + detail::format_double(tr.real()) + " outside [1 - " +
                            detail::format_double(tail_tolerance) + ", 1]");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw Error(ErrorCode::invalid_input, "density matrix is not positive semidefinite (eigenvalue " +
                                                      detail::format_double(es.eigenvalues().minCoeff()) + ")");
        }
    }

    Matrix matrix_;
};

/**
 * Phase-space point. Stores the quadratures (q, p); the complex label
 * beta = (q + i p)/sqrt(2) is always derived, never stored separately.
 */
class PhasePoint {
public:
    static PhasePoint from_quadratures(double q, double p) { return PhasePoint(q, p); }
    static PhasePoint from_label(Complex beta) {
        return PhasePoint(std::numbers::sqrt2 * beta.real(), std::numbers::sqrt2 * beta.imag());
    }

    double q() const noexcept { return q_; }
    double p() const noexcept { return p_; }
    Complex beta() const noexcept { return Complex(q_, p_) / std::numbers::sqrt2; }

private:
    PhasePoint(double q, double p) : q_(q), p_(p) {}
    double q_;
    double p_;
};

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

struct Ladder {
    FockOperator lower;
    FockOperator raise;
};

/// Annihilation a (<n|a|n+1> = sqrt(n+1)) and creation a^dag.
inline Ladder ladder(int dim) {
    detail::require_dim(dim, 2, "ladder");
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    Matrix ad = a.adjoint();
    return {FockOperator(std::move(a)), FockOperator(std::move(ad))};
}

/// (-1)^{a^dag a}.
inline FockOperator parity(int dim) {
    detail::require_dim(dim, 1, "parity");
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return FockOperator(std::move(m));
}

/// Matrix exponential (Pade scaling-and-squaring).
inline FockOperator expm(const FockOperator& op) {
    if (!detail::all_finite(op.matrix())) throw Error(ErrorCode::invalid_input, "expm: non-finite entries");
    return FockOperator(op.matrix().exp());
}

namespace detail {

/**
 * Calls visit(n, k, value_lower, value_upper) for every pair of matrix
 * elements <n+k|D(beta)|n> and <n|D(beta)|n+k> with n + k < dim.
 *
 * Uses <n+k|D|n> = sqrt(n!/(n+k)!) beta^k e^{-|beta|^2/2} L_n^{(k)}(|beta|^2)
 * and <n|D|n+k> = sqrt(n!/(n+k)!) (-beta*)^k e^{-|beta|^2/2} L_n^{(k)}(|beta|^2).
 * The factorial ratio is folded into a normalized Laguerre recurrence
 * g_n = sqrt(n!/(n+k)!) L_n^{(k)}, so no factorial is ever formed.
 */
template <class Visit>
void for_each_displacement_element(Complex beta, int dim, Visit&& visit) {
    const double x = std::norm(beta);
    const double r = std::abs(beta);
    const double theta = std::arg(beta);
    const double log_r = r > 0.0 ? std::log(r) : 0.0;
    double log_k_fact = 0.0;  // log(k!)
    for (int k = 0; k < dim; ++k) {
        if (k > 0) log_k_fact += std::log(static_cast<double>(k));
        // |beta|^k e^{-x/2} / sqrt(k!)
        double scale;
        if (k == 0) {
            scale = std::exp(-0.5 * x);
        } else if (r == 0.0) {
            scale = 0.0;
        } else {
            scale = std::exp(k * log_r - 0.5 * x - 0.5 * log_k_fact);
        }
        const Complex phase_lower = std::polar(1.0, k * theta);
        const Complex phase_upper = ((k % 2 == 0) ? 1.0 : -1.0) * std::conj(phase_lower);
        // g_n * sqrt(k!): h_0 = 1, h_1 = (1 + k - x)/sqrt(k+1),
        // h_{n+1} = [(2n+1+k-x) h_n - sqrt(n(n+k)) h_{n-1}] / sqrt((n+1)(n+1+k)).
        double h_prev = 0.0;
        double h = 1.0;
        for (int n = 0; n + k < dim; ++n) {
            if (n > 0) {
                const double next = ((2.0 * (n - 1) + 1.0 + k - x) * h -
                                     std::sqrt(static_cast<double>(n - 1) * (n - 1 + k)) * h_prev) /
                                    std::sqrt(static_cast<double>(n) * (n + k));
                h_prev = h;
                h = next;
            }
            const double mag = scale * h;
            visit(n, k, mag * phase_lower, mag * phase_upper);
        }
    }
}

}  // namespace detail

/**
 * D(beta) = exp(beta a^dag - beta* a) from closed-form matrix elements.
 *
 * The elements are those of the untruncated operator restricted to the
 * leading dim x dim block. If e^{-|beta|^2/2} underflows the result carries
 * an underflow warning.
 */
inline FockOperator displacement(Complex beta, int dim) {
    detail::require_dim(dim, 2, "displacement");
    if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag())) {
        throw Error(ErrorCode::invalid_input, "displacement: non-finite beta");
    }
    Matrix m = Matrix::Zero(dim, dim);
    detail::for_each_displacement_element(beta, dim, [&](int n, int k, Complex lower, Complex upper) {
        m(n + k, n) = lower;
        if (k > 0) m(n, n + k) = upper;
    });
    FockOperator op(std::move(m));
    if (0.5 * std::norm(beta) > 708.0) {
        op.add_warning("underflow: exp(-|beta|^2/2) is below the smallest normal double");
    }
    return op;
}

/// Factorized D(beta) = e^{-|beta|^2/2} exp(beta a^dag) exp(-beta* a), truncated. Reference route only.
inline FockOperator displacement_factorized(Complex beta, int dim) {
    const auto [a, ad] = ladder(dim);
    const Matrix up = (beta * ad.matrix()).exp();
    const Matrix down = (-std::conj(beta) * a.matrix()).exp();
    return FockOperator(std::exp(-0.5 * std::norm(beta)) * up * down);
}

/// Amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < dim (no tail check).
inline Vector coherent_amplitudes(Complex alpha, int dim) {
    Vector v(dim);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return v;
}

/// Probability mass of |alpha> on n >= dim.
inline double coherent_tail(Complex alpha, int dim) {
    const double x = std::norm(alpha);
    if (x == 0.0) return 0.0;
    double tail = 0.0;
    double log_term = -x + dim * std::log(x) - std::lgamma(dim + 1.0);
    for (int n = dim; n < dim + 100000; ++n) {
        const double term = std::exp(log_term);
        tail += term;
        if (n > x && term < 1e-30 * std::max(tail, 1e-300)) break;
        if (n > x && term == 0.0) break;
        log_term += std::log(x) - std::log(n + 1.0);
    }
    return tail;
}

// ---------------------------------------------------------------------------
// Position eigenstates
// ---------------------------------------------------------------------------

enum class PositionRoute { hermite, displaced_vacuum };

struct PositionOptions {
    double max_abs_x = 8.0;
    /// Largest admissible share of sum |c_n|^2 held by the last 10% of components.
    double tail_share_threshold = 0.25;
};

/**
 * Truncated position eigenstate |X>.
 *
 * hermite:          c_n = psi_n(X).
 * displaced_vacuum: pi^{-1/4} e^{-X^2/2} exp(-a^dag^2/2 + sqrt(2) X a^dag) |0>.
 *
 * Both are approximations of a non-normalizable state; if the last tenth of
 * the components carries too much of the weight the truncation is rejected.
 */
inline TruncatedVector position_eigenstate(double x, int dim, PositionRoute route,
                                           const PositionOptions& opts = {}) {
    detail::require_dim(dim, 2, "position_eigenstate");
    if (!std::isfinite(x) || std::abs(x) > opts.max_abs_x) {
        throw Error(ErrorCode::range, "position_eigenstate: |X| = " + detail::format_double(std::abs(x)) +
                                          " exceeds " + detail::format_double(opts.max_abs_x));
    }
    Vector c(dim);
    if (route == PositionRoute::hermite) {
        const auto psi = specialfn::hermite_functions(x, dim);
        for (int n = 0; n < dim; ++n) c(n) = psi[n];
    } else {
        const auto [a, ad] = ladder(dim);
        const Matrix gen = -0.5 * ad.matrix() * ad.matrix() + std::numbers::sqrt2 * x * ad.matrix();
        const Matrix e = gen.exp();
        c = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25) * e.col(0);
    }
    const int last = std::max(1, static_cast<int>(std::ceil(0.1 * dim)));
    const double total = c.squaredNorm();
    const double tail = c.tail(last).squaredNorm();
    if (total > 0.0 && tail / total > opts.tail_share_threshold) {
        throw Error(ErrorCode::truncation, "position_eigenstate: last " + std::to_string(last) +
                                               " components hold " + detail::format_double(tail / total) +
                                               " of the weight at X=" + detail::format_double(x) +
                                               ", dim=" + std::to_string(dim));
    }
    return TruncatedVector(std::move(c));
}

// ---------------------------------------------------------------------------
// Test states
// ---------------------------------------------------------------------------

namespace state {
struct Fock {
    int n = 0;
    bool operator==(const Fock&) const = default;
};
struct Coherent {
    Complex alpha;
    bool operator==(const Coherent&) const = default;
};
struct Thermal {
    double nbar = 0.0;
    bool operator==(const Thermal&) const = default;
};
struct Squeezed {
    double r = 0.0;
    double phi = 0.0;
    bool operator==(const Squeezed&) const = default;
};
/// |alpha> + e^{i phase} |-alpha>, normalized.
struct Cat {
    Complex alpha;
    double phase = 0.0;
    bool operator==(const Cat&) const = default;
};
}  // namespace state

using StateSpec = std::variant<state::Fock, state::Coherent, state::Thermal, state::Squeezed, state::Cat>;

inline std::string format_complex(Complex z) {
    std::string s = detail::format_shortest(z.real());
    if (z.imag() != 0.0) {
        const std::string im = detail::format_shortest(z.imag());
        s += (im.front() == '-' ? "" : "+") + im + "i";
    }
    return s;
}

/// Canonical text form, re-parsable by parse_state_spec.
inline std::string to_string(const StateSpec& spec) {
    struct V {
        std::string operator()(const state::Fock& s) const { return "fock:" + std::to_string(s.n); }
        std::string operator()(const state::Coherent& s) const { return "coherent:" + format_complex(s.alpha); }
        std::string operator()(const state::Thermal& s) const { return "thermal:" + detail::format_shortest(s.nbar); }
        std::string operator()(const state::Squeezed& s) const {
            return "squeezed:" + detail::format_shortest(s.r) + "," + detail::format_shortest(s.phi);
        }
        std::string operator()(const state::Cat& s) const {
            return "cat:" + format_complex(s.alpha) + "," + detail::format_shortest(s.phase);
        }
    };
    return std::visit(V{}, spec);
}

struct StateVector {
    Vector amps;
    double tail = 0.0;
};

namespace detail {

inline StateVector squeezed_vector(double r, double phi, int dim) {
    StateVector out;
    out.amps = Vector::Zero(dim);
    const Complex ratio = -std::polar(std::tanh(r), phi);
    Complex c = 1.0 / std::sqrt(std::cosh(r));
    double tail = 0.0;
    for (int m = 0;; ++m) {
        const int n = 2 * m;
        if (n < dim) {
            out.amps(n) = c;
        } else {
            tail += std::norm(c);
            if (std::norm(c) < 1e-40 || m > 1000000) break;
        }
        c *= ratio * std::sqrt((2.0 * m + 1.0) * (2.0 * m + 2.0)) / (2.0 * (m + 1.0));
        if (n >= dim && std::norm(c) < 1e-40) break;
    }
    out.tail = tail;
    return out;
}

inline double thermal_tail(double nbar, int dim) {
    return std::pow(nbar / (1.0 + nbar), dim);
}

}  // namespace detail

/// Amplitudes for the pure specs; tail is the exact dropped mass.
inline StateVector pure_state_vector(const StateSpec& spec, int dim) {
    struct V {
        int dim;
        StateVector operator()(const state::Fock& s) const {
            if (s.n < 0 || s.n >= dim) {
                throw Error(ErrorCode::invalid_spec,
                            "fock(" + std::to_string(s.n) + ") requires 0 <= n < dim = " + std::to_string(dim));
            }
            StateVector sv{Vector::Zero(dim), 0.0};
            sv.amps(s.n) = 1.0;
            return sv;
        }
        StateVector operator()(const state::Coherent& s) const {
            return {coherent_amplitudes(s.alpha, dim), coherent_tail(s.alpha, dim)};
        }
        StateVector operator()(const state::Squeezed& s) const {
            if (!std::isfinite(s.r) || !std::isfinite(s.phi)) throw Error(ErrorCode::invalid_spec, "squeezed: non-finite parameter");
            return detail::squeezed_vector(s.r, s.phi, dim);
        }
        StateVector operator()(const state::Cat& s) const {
            const double norm2 = 2.0 + 2.0 * std::cos(s.phase) * std::exp(-2.0 * std::norm(s.alpha));
            if (!(norm2 > 1e-14)) throw Error(ErrorCode::invalid_spec, "cat: superposition vanishes");
            const Complex rel = std::polar(1.0, s.phase);
            const double inv = 1.0 / std::sqrt(norm2);
            Vector plus = coherent_amplitudes(s.alpha, dim);
            StateVector sv;
            sv.amps = Vector(dim);
            for (int n = 0; n < dim; ++n) {
                const double sign = (n % 2 == 0) ? 1.0 : -1.0;
                sv.amps(n) = plus(n) * (1.0 + rel * sign) * inv;
            }
            // each tail component is |coh_n|^2 |1 +- e^{i phase}|^2 / norm2 <= 4 |coh_n|^2 / norm2
            sv.tail = std::max(0.0, 1.0 - sv.amps.squaredNorm());
            sv.tail = std::min(sv.tail, 4.0 * coherent_tail(s.alpha, dim) / norm2);
            return sv;
        }
        StateVector operator()(const state::Thermal&) const {
            throw Error(ErrorCode::invalid_spec, "thermal state has no state vector");
        }
    };
    return std::visit(V{dim}, spec);
}

inline double state_tail(const StateSpec& spec, int dim) {
    if (const auto* t = std::get_if<state::Thermal>(&spec)) return detail::thermal_tail(t->nbar, dim);
    if (const auto* f = std::get_if<state::Fock>(&spec)) return f->n < dim ? 0.0 : 1.0;
    return pure_state_vector(spec, dim).tail;
}

/**
 * Builds the density operator for a test state.
 *
 * Pure specs give the rank-1 projector of their truncated amplitudes
 * (not renormalized); thermal gives diag(nbar^n / (1+nbar)^{n+1}).
 */
inline DensityOperator make_state(const StateSpec& spec, int dim = kDefaultDim,
                                  double tail_tolerance = kDefaultTailTolerance) {
    detail::require_dim(dim, 1, "make_state");
    if (const auto* t = std::get_if<state::Thermal>(&spec); t && !(t->nbar >= 0.0 && std::isfinite(t->nbar))) {
        throw Error(ErrorCode::invalid_spec, "thermal: nbar >= 0 required, got " + detail::format_double(t->nbar));
    }
    if (const auto* c = std::get_if<state::Coherent>(&spec);
        c && !(std::isfinite(c->alpha.real()) && std::isfinite(c->alpha.imag()))) {
        throw Error(ErrorCode::invalid_spec, "coherent: non-finite alpha");
    }
    if (const auto* f = std::get_if<state::Fock>(&spec); f && (f->n < 0 || f->n >= dim)) {
        throw Error(ErrorCode::invalid_spec,
                    "fock(" + std::to_string(f->n) + ") requires 0 <= n < dim = " + std::to_string(dim));
    }
    const double tail = state_tail(spec, dim);
    if (tail > tail_tolerance) {
        int adequate = dim;
        while (adequate < 1 << 14 && state_tail(spec, adequate) > tail_tolerance) adequate *= 2;
        int lo = adequate / 2;
        while (lo + 1 < adequate) {
            const int mid = (lo + adequate) / 2;
            (state_tail(spec, mid) > tail_tolerance ? lo : adequate) = mid;
        }
        throw Error(ErrorCode::truncation, to_string(spec) + " loses " + detail::format_double(tail) +
                                               " of its mass at dim=" + std::to_string(dim) +
                                               "; minimal adequate dim is " + std::to_string(adequate));
    }
    if (const auto* t = std::get_if<state::Thermal>(&spec)) {
        Matrix m = Matrix::Zero(dim, dim);
        const double ratio = t->nbar / (1.0 + t->nbar);
        double pn = 1.0 / (1.0 + t->nbar);
        for (int n = 0; n < dim; ++n) {
            m(n, n) = pn;
            pn *= ratio;
        }
        return DensityOperator::from_matrix(std::move(m), tail_tolerance);
    }
    const StateVector sv = pure_state_vector(spec, dim);
    return DensityOperator::pure(TruncatedVector(sv.amps), tail_tolerance);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// {"dim": N, "matrix": [[[re,im],...],...]}, row-major, 17 significant digits.
inline std::string to_json(const DensityOperator& rho) {
    std::string out = "{\"dim\": " + std::to_string(rho.dim()) + ", \"matrix\": [";
    for (int r = 0; r < rho.dim(); ++r) {
        out += r ? ", [" : "[";
        for (int c = 0; c < rho.dim(); ++c) {
            if (c) out += ", ";
            out += "[" + detail::format_double(rho(r, c).real()) + ", " + detail::format_double(rho(r, c).imag()) + "]";
        }
        out += "]";
    }
    out += "]}";
    return out;
}

inline DensityOperator density_from_json(const std::string& text, double tail_tolerance = kDefaultTailTolerance) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_input, std::string("density JSON: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("matrix")) throw Error(ErrorCode::invalid_input, "density JSON needs dim and matrix");
    const int dim = j.at("dim").get<int>();
    detail::require_dim(dim, 1, "density JSON");
    const auto& rows = j.at("matrix");
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) throw Error(ErrorCode::invalid_input, "density JSON: row count != dim");
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) throw Error(ErrorCode::invalid_input, "density JSON: column count != dim");
        for (int c = 0; c < dim; ++c) {
            const auto& z = row[c];
            if (!z.is_array() || z.size() != 2) throw Error(ErrorCode::invalid_input, "density JSON: entries are [re, im]");
            m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return DensityOperator::from_matrix(std::move(m), tail_tolerance);
}

}  // namespace qphase
