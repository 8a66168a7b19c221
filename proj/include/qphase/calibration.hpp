// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file calibration.hpp
 * @brief Fitting the single overall constant of a raw route.
 *
 * A route is calibrated against its reference (wigner_integral for Wigner
 * routes, kr_direct for Kirkwood-Rihaczek routes) on the nine points
 * (q, p) in {-1, 0, 1}^2. The constant is the least-squares solution of
 * c * raw = reference; the residual is max |c raw - ref| / max |ref|.
 */

#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "qphase/distributions.hpp"
#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/prep.hpp"

namespace qphase {

inline constexpr std::array<std::string_view, 5> kCalibratedRoutes = {"wigner.parity", "wigner.charfn", "kr.charfn",
                                                                      "kr.vacuum", "kr.p"};
inline constexpr double kCalibrationResidualLimit = 1e-8;

struct FitResult {
    Complex constant;
    double residual = 0.0;
};

inline FitResult fit_constant(const std::vector<Complex>& raw, const std::vector<Complex>& ref) {
    if (raw.size() != ref.size() || raw.empty()) throw Error(ErrorCode::invalid_input, "fit needs matching samples");
    Complex num{0.0, 0.0};
    double den = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        num += std::conj(raw[k]) * ref[k];
        den += std::norm(raw[k]);
        scale = std::max(scale, std::abs(ref[k]));
    }
    if (!(den > 0.0) || !(scale > 0.0)) {
        throw Error(ErrorCode::calibration_failure, "route or reference vanishes on every calibration point");
    }
    FitResult fit{num / den, 0.0};
    for (std::size_t k = 0; k < raw.size(); ++k) {
        fit.residual = std::max(fit.residual, std::abs(fit.constant * raw[k] - ref[k]) / scale);
    }
    return fit;
}

inline std::vector<PhasePoint> calibration_points() {
    std::vector<PhasePoint> pts;
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) pts.push_back(PhasePoint::from_quadratures(i, j));
    }
    return pts;
}

/// P-representation used by the kr.p route for a state spec.
inline prep::PRepresentation p_for_state(const StateSpec& spec) {
    if (const auto* c = std::get_if<state::Coherent>(&spec)) return prep::Delta{c->alpha};
    if (const auto* f = std::get_if<state::Fock>(&spec); f && f->n == 0) return prep::Delta{0.0};
    if (const auto* t = std::get_if<state::Thermal>(&spec)) {
        if (t->nbar == 0.0) return prep::Delta{0.0};
        return prep::Gaussian{0.0, t->nbar};
    }
    throw Error(ErrorCode::invalid_spec, to_string(spec) + " has no regular P-representation");
}

/// Raw route values and reference values on the calibration points.
inline FitResult fit_route(std::string_view route, const StateSpec& reference, int dim = kDefaultDim) {
    if (std::find(kCalibratedRoutes.begin(), kCalibratedRoutes.end(), route) == kCalibratedRoutes.end()) {
        throw Error(ErrorCode::invalid_input, "no calibratable route named '" + std::string(route) + "'");
    }
    const auto pts = calibration_points();
    std::vector<Complex> raw;
    std::vector<Complex> ref;
    if (route == "kr.p") {
        const auto p = p_for_state(reference);
        const DensityOperator rho = prep::density_from_p(p, dim);
        for (const auto& pt : pts) {
            raw.push_back(prep::kr_from_p_raw(p, pt));
            ref.push_back(kr_direct(rho, pt));
        }
        return fit_constant(raw, ref);
    }
    const DensityOperator rho = make_state(reference, dim);
    if (route == "wigner.parity" || route == "wigner.charfn") {
        const PositionRepresentation pos(rho);
        std::optional<CharFnLattice> lattice;
        if (route == "wigner.charfn") lattice.emplace(rho);
        for (const auto& pt : pts) {
            raw.push_back(lattice ? lattice->wigner_raw(pt) : Complex(wigner_parity(rho, pt, false)));
            ref.push_back(wigner_integral(pos, pt));
        }
    } else {
        std::optional<CharFnLattice> lattice;
        std::optional<VacuumFormEvaluator> vacuum;
        if (route == "kr.charfn") {
            lattice.emplace(rho);
        } else {
            vacuum.emplace(rho);
        }
        for (const auto& pt : pts) {
            raw.push_back(lattice ? lattice->kr_raw(pt) : vacuum->raw(pt));
            ref.push_back(kr_direct(rho, pt));
        }
    }
    return fit_constant(raw, ref);
}

/// Fits, checks the residual and stores the constant in `cache`.
inline Calibration calibrate(std::string_view route, const StateSpec& reference, CalibrationCache& cache,
                             int dim = kDefaultDim) {
    const FitResult fit = fit_route(route, reference, dim);
    if (!(fit.residual < kCalibrationResidualLimit)) {
        throw Error(ErrorCode::calibration_failure,
                    std::string(route) + " against " + to_string(reference) + ": residual " +
                        detail::format_double(fit.residual) + " (constant " + format_complex(fit.constant) + ")");
    }
    Calibration c{std::string(route), fit.constant, to_string(reference), fit.residual};
    cache.store(c);
    return c;
}

}  // namespace qphase
