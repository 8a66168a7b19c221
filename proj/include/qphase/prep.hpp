// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file prep.hpp
 * @brief Analytic Glauber-Sudarshan P-representations.
 *
 * Only forward evaluation is supported: a P-function given in closed form
 * is turned into a density matrix, or integrated against the
 * Kirkwood-Rihaczek kernel. P is never reconstructed from rho.
 *
 * gaussian(mean, nbar): P(alpha) = e^{-|alpha - mean|^2 / nbar} / (pi nbar),
 * the displaced thermal state.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qphase/distributions.hpp"
#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/oracle.hpp"

namespace qphase::prep {

struct Delta {
    Complex alpha;
};

struct Gaussian {
    Complex mean;
    double nbar = 1.0;
};

struct Atom {
    Complex weight;
    Complex alpha;
};

struct DeltaSum {
    std::vector<Atom> atoms;
};

class PRepresentation {
public:
    using Variant = std::variant<Delta, Gaussian, DeltaSum>;

    PRepresentation(Delta d) : PRepresentation(Variant(d)) {}        // NOLINT(google-explicit-constructor)
    PRepresentation(Gaussian g) : PRepresentation(Variant(g)) {}     // NOLINT(google-explicit-constructor)
    PRepresentation(DeltaSum s) : PRepresentation(Variant(std::move(s))) {}  // NOLINT(google-explicit-constructor)

    explicit PRepresentation(Variant v) : v_(std::move(v)) {
        if (const auto* g = std::get_if<Gaussian>(&v_); g && !(g->nbar > 0.0 && std::isfinite(g->nbar))) {
            throw Error(ErrorCode::invalid_input, "gaussian P needs nbar > 0");
        }
        if (const auto* s = std::get_if<DeltaSum>(&v_)) {
            if (s->atoms.empty()) throw Error(ErrorCode::invalid_input, "delta-sum needs at least one atom");
            Complex total{0.0, 0.0};
            for (const auto& a : s->atoms) total += a.weight;
            if (std::abs(total - 1.0) > 1e-12) {
                throw Error(ErrorCode::invalid_input, "delta-sum weights must sum to 1");
            }
        }
    }

    const Variant& variant() const noexcept { return v_; }

private:
    Variant v_;
};

// ---------------------------------------------------------------------------
// rho = int P(alpha) |alpha><alpha| d^2 alpha
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix coherent_projector(Complex alpha, int dim, double tail_tolerance) {
    const double tail = coherent_tail(alpha, dim);
    if (tail > tail_tolerance) {
        throw Error(ErrorCode::truncation, "coherent atom at " + format_complex(alpha) + " loses " +
                                               qphase::detail::format_double(tail) + " of its mass at dim=" +
                                               std::to_string(dim));
    }
    const Vector c = coherent_amplitudes(alpha, dim);
    return c * c.adjoint();
}

inline Matrix displaced_thermal(Complex mean, double nbar, int dim, double tail_tolerance) {
    // Work in a larger space so the thermal weights beyond dim are included, then cut.
    const double ratio = nbar / (1.0 + nbar);
    int work = dim;
    while (std::pow(ratio, work) > 1e-18 && work < 4096) work *= 2;
    work += static_cast<int>(std::ceil(std::norm(mean) + 10.0 * std::abs(mean)));
    Eigen::VectorXd weights(work);
    double pn = 1.0 / (1.0 + nbar);
    for (int n = 0; n < work; ++n) {
        weights(n) = pn;
        pn *= ratio;
    }
    const Matrix d = displacement(mean, work).matrix();
    const Matrix top = d.topRows(dim);
    Matrix rho = top * weights.cast<Complex>().asDiagonal() * top.adjoint();
    const double tail = 1.0 - rho.trace().real();
    if (tail > tail_tolerance) {
        throw Error(ErrorCode::truncation, "gaussian P loses " + qphase::detail::format_double(tail) +
                                               " of its mass at dim=" + std::to_string(dim));
    }
    return rho;
}

}  // namespace detail

inline DensityOperator density_from_p(const PRepresentation& p, int dim = kDefaultDim,
                                      double tail_tolerance = kDefaultTailTolerance) {
    qphase::detail::require_dim(dim, 1, "density_from_p");
    struct V {
        int dim;
        double tol;
        Matrix operator()(const Delta& d) const { return detail::coherent_projector(d.alpha, dim, tol); }
        Matrix operator()(const Gaussian& g) const { return detail::displaced_thermal(g.mean, g.nbar, dim, tol); }
        Matrix operator()(const DeltaSum& s) const {
            Matrix m = Matrix::Zero(dim, dim);
            for (const auto& a : s.atoms) m += a.weight * detail::coherent_projector(a.alpha, dim, tol);
            return m;
        }
    };
    return DensityOperator::from_matrix(std::visit(V{dim, tail_tolerance}, p.variant()), tail_tolerance);
}

// ---------------------------------------------------------------------------
// K from P
// ---------------------------------------------------------------------------

/// e^{(alpha^2 - alpha*^2)/2 - |alpha|^2} e^{sqrt2 (X alpha* - i Y alpha)}.
inline Complex kr_p_integrand(Complex alpha, double x, double y) {
    const Complex i{0.0, 1.0};
    const Complex ac = std::conj(alpha);
    return std::exp(0.5 * (alpha * alpha - ac * ac) - std::norm(alpha) + kSqrt2 * (x * ac - i * y * alpha));
}

struct KrFromPOptions {
    double tolerance = 1e-10;
    double edge_tolerance = 1e-12;
};

/**
 * Raw (e^{iXY}/sqrt2) int P(alpha) e^{(alpha^2 - alpha*^2)/2 - |alpha|^2} e^{sqrt2(X alpha* - iY alpha)} d^2 alpha.
 * Delta atoms are sifted; the gaussian is integrated over mean +- 8 sqrt(nbar).
 */
inline Complex kr_from_p_raw(const PRepresentation& p, const PhasePoint& point, const KrFromPOptions& opts = {}) {
    const double x = point.q();
    const double y = point.p();
    struct V {
        double x;
        double y;
        const KrFromPOptions& opts;
        Complex operator()(const Delta& d) const { return kr_p_integrand(d.alpha, x, y); }
        Complex operator()(const DeltaSum& s) const {
            Complex sum{0.0, 0.0};
            for (const auto& a : s.atoms) sum += a.weight * kr_p_integrand(a.alpha, x, y);
            return sum;
        }
        Complex operator()(const Gaussian& g) const {
            const double half = 8.0 * std::sqrt(g.nbar);
            const oracle::Rectangle box{g.mean.real() - half, g.mean.real() + half, g.mean.imag() - half,
                                        g.mean.imag() + half};
            auto f = [&](double a1, double a2) {
                const Complex alpha(a1, a2);
                return std::exp(-std::norm(alpha - g.mean) / g.nbar) / (kPi * g.nbar) * kr_p_integrand(alpha, x, y);
            };
            double peak = 0.0;
            double edge = 0.0;
            constexpr int kProbe = 64;
            for (int k = 0; k <= kProbe; ++k) {
                const double t = -half + 2.0 * half * k / kProbe;
                for (int j = 0; j <= kProbe; ++j) {
                    const double s = -half + 2.0 * half * j / kProbe;
                    const double v = std::abs(f(g.mean.real() + t, g.mean.imag() + s));
                    peak = std::max(peak, v);
                    if (k == 0 || k == kProbe || j == 0 || j == kProbe) edge = std::max(edge, v);
                }
            }
            if (edge > opts.edge_tolerance * std::max(peak, 1e-300)) {
                throw Error(ErrorCode::domain, "gaussian P integrand is not negligible on the edge of mean +- " +
                                                   qphase::detail::format_double(half));
            }
            return oracle::integrate_2d(f, box, opts.tolerance, 8).value;
        }
    };
    const Complex integral = std::visit(V{x, y, opts}, p.variant());
    return std::polar(1.0 / kSqrt2, x * y) * integral;
}

/// Calibrated K from P (route kr.p).
inline Complex kr_from_p(const PRepresentation& p, const PhasePoint& point, const CalibrationCache& cache,
                         const KrFromPOptions& opts = {}) {
    const Calibration c = cache.require("kr.p");
    return c.constant * kr_from_p_raw(p, point, opts);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

/// {"variant": "delta"|"gaussian"|"delta-sum", ...}; complex numbers as [re, im].
inline std::string to_json(const PRepresentation& p) {
    nlohmann::json j;
    struct V {
        nlohmann::json& j;
        void operator()(const Delta& d) const {
            j["variant"] = "delta";
            j["alpha"] = complex_json(d.alpha);
        }
        void operator()(const Gaussian& g) const {
            j["variant"] = "gaussian";
            j["mean"] = complex_json(g.mean);
            j["nbar"] = g.nbar;
        }
        void operator()(const DeltaSum& s) const {
            j["variant"] = "delta-sum";
            j["atoms"] = nlohmann::json::array();
            for (const auto& a : s.atoms) {
                j["atoms"].push_back({{"weight", complex_json(a.weight)}, {"alpha", complex_json(a.alpha)}});
            }
        }
    };
    std::visit(V{j}, p.variant());
    return j.dump();
}

inline PRepresentation p_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        const auto variant = j.at("variant").get<std::string>();
        if (variant == "delta") return Delta{complex_from_json(j.at("alpha"))};
        if (variant == "gaussian") return Gaussian{complex_from_json(j.at("mean")), j.at("nbar").get<double>()};
        if (variant == "delta-sum") {
            DeltaSum s;
            for (const auto& a : j.at("atoms")) {
                s.atoms.push_back({complex_from_json(a.at("weight")), complex_from_json(a.at("alpha"))});
            }
            return s;
        }
        throw Error(ErrorCode::invalid_input, "unknown P variant '" + variant + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_input, std::string("P JSON: ") + e.what());
    }
}

}  // namespace qphase::prep
