// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file verify.hpp
 * @brief Cross-route checks and the verification report.
 *
 * Every check compares two independently computed quantities and records
 * the largest deviation. Rows marked `candidate` test identities whose
 * printed form is in doubt; they report a fitted constant and a residual
 * and do not decide the overall verdict. Skipped rows (e.g. P-routes for a
 * state without a regular P-function) do not count either.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qphase/calibration.hpp"
#include "qphase/cohen.hpp"
#include "qphase/distributions.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/grid.hpp"
#include "qphase/prep.hpp"
#include "qphase/specialfn.hpp"
#include "qphase/state_spec.hpp"

namespace qphase::verify {

inline const std::vector<std::string>& default_states() {
    static const std::vector<std::string> s = {"vacuum",        "fock:1",     "fock:2",        "coherent:1",
                                               "thermal:0.5",   "squeezed:0.4,0"};
    return s;
}

// ---------------------------------------------------------------------------
// Grid helpers
// ---------------------------------------------------------------------------

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Matrix wigner_integral_grid(const DensityOperator& rho, const GridSpec& g) {
    const PositionRepresentation pos(rho);
    return sample_grid(g, [&](const PhasePoint& pt) { return wigner_integral(pos, pt); });
}

inline Matrix wigner_parity_grid(const DensityOperator& rho, const GridSpec& g) {
    return sample_grid(g, [&](const PhasePoint& pt) { return wigner_parity(rho, pt, true); });
}

inline Matrix kr_direct_grid(const DensityOperator& rho, const GridSpec& g) {
    return sample_grid(g, [&](const PhasePoint& pt) { return kr_direct(rho, pt); });
}

inline Matrix char_fn_grid(const DensityOperator& rho, const GridSpec& g) {
    return sample_grid(g, [&](const PhasePoint& pt) { return char_fn(rho, pt.beta()); });
}

inline Matrix kr_vacuum_grid(const DensityOperator& rho, const GridSpec& g, bool flip_bra = false) {
    const VacuumFormEvaluator ev(rho);
    return sample_grid(g, [&](const PhasePoint& pt) { return ev.raw(pt, flip_bra); });
}

inline Matrix kr_p_grid(const prep::PRepresentation& p, const GridSpec& g) {
    return sample_grid(g, [&](const PhasePoint& pt) { return prep::kr_from_p_raw(p, pt); });
}

/// Least-squares constant and relative residual of c * raw ~ ref over a whole grid.
inline FitResult fit_grid(const Matrix& raw, const Matrix& ref) {
    std::vector<Complex> r(raw.data(), raw.data() + raw.size());
    std::vector<Complex> f(ref.data(), ref.data() + ref.size());
    return fit_constant(r, f);
}

// ---------------------------------------------------------------------------
// Kirkwood-Rihaczek properties
// ---------------------------------------------------------------------------

struct MarginalDeviations {
    double q_marginal = 0.0;
    double p_marginal = 0.0;
    double mass_real = 0.0;
    double mass_imag = 0.0;
};

/// Rectangle-rule marginals of kr_direct against the position and momentum densities.
inline MarginalDeviations kr_marginals(const DensityOperator& rho, const GridSpec& g) {
    const Matrix k = kr_direct_grid(rho, g);
    const double dq = g.q.step();
    const double dp = g.p.step();
    const int eff = rho.effective_dim();
    const Matrix m = rho.matrix().topLeftCorner(eff, eff);
    MarginalDeviations d;
    for (int iq = 0; iq < g.q.count; ++iq) {
        const Vector v = detail::position_ket(g.q.at(iq), eff);
        const double density = v.dot(m * v).real();
        d.q_marginal = std::max(d.q_marginal, std::abs(k.row(iq).sum() * dp - density));
    }
    for (int ip = 0; ip < g.p.count; ++ip) {
        const Vector v = detail::momentum_ket(g.p.at(ip), eff);
        const double density = v.dot(m * v).real();
        d.p_marginal = std::max(d.p_marginal, std::abs(k.col(ip).sum() * dq - density));
    }
    const Complex mass = k.sum() * dq * dp;
    d.mass_real = std::abs(mass.real() - 1.0);
    d.mass_imag = std::abs(mass.imag());
    return d;
}

/// |kr_direct* - <q|rho|p><p|q>| with the right-hand side built term by term.
inline double kr_conjugation_deviation(const DensityOperator& rho, const GridSpec& g) {
    const int eff = rho.effective_dim();
    const Matrix k = kr_direct_grid(rho, g);
    double dev = 0.0;
    for (int iq = 0; iq < g.q.count; ++iq) {
        const double q = g.q.at(iq);
        for (int ip = 0; ip < g.p.count; ++ip) {
            const double p = g.p.at(ip);
            Complex s{0.0, 0.0};
            for (int n = 0; n < eff; ++n) {
                const double pn = specialfn::hermite_function(n, q);
                for (int mm = 0; mm < eff; ++mm) {
                    s += pn * rho(n, mm) * std::pow(Complex(0.0, 1.0), mm) * specialfn::hermite_function(mm, p);
                }
            }
            s *= std::polar(1.0 / std::sqrt(2.0 * kPi), -p * q);
            dev = std::max(dev, std::abs(std::conj(k(iq, ip)) - s));
        }
    }
    return dev;
}

// ---------------------------------------------------------------------------
// Candidate identities
// ---------------------------------------------------------------------------

/**
 * sqrt(pi/2) e^{beta^2 - beta*^2} <X| e^{(a - beta*)^2} (-1)^{a^dag a} rho |X>,
 * grouping the exponential as its own factor. (a - beta*)^2 is upper
 * triangular, so the truncated exponential is exact on the leading block.
 */
inline Complex parity_sandwich(const DensityOperator& rho, const PhasePoint& pt) {
    const int n = rho.dim();
    const Complex beta = pt.beta();
    const auto [a, ad] = ladder(std::max(n, 2));
    const Matrix shifted = a.matrix() - std::conj(beta) * Matrix::Identity(a.dim(), a.dim());
    Matrix pr = Matrix::Zero(a.dim(), a.dim());
    pr.topLeftCorner(n, n) = rho.matrix();
    for (int k = 1; k < a.dim(); k += 2) pr.row(k) *= -1.0;
    const Matrix m = expm(FockOperator(shifted * shifted)).matrix() * pr;
    const Vector x = detail::position_ket(pt.q(), a.dim());
    const Complex bc = std::conj(beta);
    return std::sqrt(kPi / 2.0) * std::exp(beta * beta - bc * bc) * x.dot(m * x);
}

/// The bracket of the P-form with the printed bra <-sqrt2 iY| and the sifted atom alpha.
inline Complex p_bracket_atom(Complex alpha, const PhasePoint& pt) {
    const double x = pt.q();
    const double y = pt.p();
    const Complex beta = pt.beta();
    const Complex ac = std::conj(alpha);
    const Complex gamma(0.0, -kSqrt2 * y);
    const Complex bra = std::exp(-0.5 * std::norm(gamma) - 0.5 * std::norm(alpha) + std::conj(gamma) * alpha);
    const Complex ket = std::exp(-0.5 * std::norm(alpha) - x * x + ac * kSqrt2 * x);
    return std::exp(beta * beta + y * y) / kSqrt2 * std::exp(0.5 * (alpha * alpha - ac * ac)) * bra * ket;
}

/// The sifted P-integrand form with prefactor e^{iXY}/sqrt2.
inline Complex p_integrand_atom(Complex alpha, const PhasePoint& pt) {
    return std::polar(1.0 / kSqrt2, pt.q() * pt.p()) * prep::kr_p_integrand(alpha, pt.q(), pt.p());
}

// ---------------------------------------------------------------------------
// Special-function checks
// ---------------------------------------------------------------------------

/// Max componentwise |hermite route - displaced-vacuum route| for n <= nmax.
inline double position_eigenstate_deviation(int dim = 128, int nmax = 40, double xmax = 3.0) {
    double dev = 0.0;
    for (int k = -6; k <= 6; ++k) {
        const double x = xmax * k / 6.0;
        const auto h = position_eigenstate(x, dim, PositionRoute::hermite);
        const auto d = position_eigenstate(x, dim, PositionRoute::displaced_vacuum);
        for (int n = 0; n <= nmax; ++n) dev = std::max(dev, std::abs(h[n] - d[n]));
    }
    return dev;
}

/// Max relative |recurrence - integral form| for n <= 20, |x| <= 3.
inline double hermite_integral_deviation() {
    double dev = 0.0;
    for (int n = 0; n <= 20; ++n) {
        for (int k = -6; k <= 6; ++k) {
            const double x = 0.5 * k;
            const double r = specialfn::hermite(n, x);
            const double i = specialfn::hermite_integral(n, x);
            // near a root the relative error is taken against the polynomial's scale
            const double scale = std::max(std::abs(r), std::pow(2.0 * std::max(1.0, std::abs(x)), 0.5 * n));
            dev = std::max(dev, std::abs(r - i) / scale);
        }
    }
    return dev;
}

/// Max relative |partial sum (K = 200) - e^{-t^2 + 2tx}| on |t| <= 1, |x| <= 5.
inline double generating_deviation() {
    double dev = 0.0;
    for (double t : {-1.0, -0.6, -0.2, 0.0, 0.3, 0.7, 1.0}) {
        for (double x : {-5.0, -2.5, -1.0, 0.0, 0.5, 1.7, 3.0, 5.0}) {
            const double exact = std::exp(-t * t + 2.0 * t * x);
            dev = std::max(dev, std::abs(specialfn::generating_partial(t, x, 200) - exact) / exact);
        }
    }
    return dev;
}

/**
 * 2n-th t-derivative of the K = 80 partial sum by central differences
 * (step 1e-3, one Richardson step) against the shifted sum truncated at
 * K - 2n, at t = 0.2. Evaluated in long double: the fourth difference
 * divides by h^4 = 1e-12, which would leave ~1e-4 of rounding in binary64.
 */
inline double derivative_shift_deviation() {
    using LD = long double;
    auto derivative = [](int order, LD t, LD x, LD h) {
        LD sum = 0;
        LD binom = 1;
        for (int j = 0; j <= order; ++j) {
            const LD sign = (j % 2 == 0) ? 1 : -1;
            sum += sign * binom * specialfn::generating_partial<LD>(t + (LD(order) / 2 - j) * h, x, 80);
            binom = binom * (order - j) / (j + 1);
        }
        return sum / std::pow(h, static_cast<LD>(order));
    };
    double dev = 0.0;
    const LD t = 0.2L;
    const LD h = 1e-3L;
    for (LD x : {0.0L, 0.5L, 1.7L}) {
        for (int n : {1, 2}) {
            const LD d1 = derivative(2 * n, t, x, h);
            const LD d2 = derivative(2 * n, t, x, 2 * h);
            const LD richardson = (4 * d1 - d2) / 3;
            const LD expected = specialfn::generating_shifted<LD>(t, x, 80 - 2 * n, 2 * n);
            dev = std::max(dev, static_cast<double>(std::abs(richardson - expected) / std::max<LD>(1, std::abs(expected))));
        }
    }
    return dev;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct Row {
    std::string check;
    double deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool candidate = false;
    bool skipped = false;
    std::optional<Complex> constant;
    std::string note;
};

struct Options {
    int dim = kDefaultDim;
    double tol = 1e-6;
    std::vector<std::string> states = default_states();
    GridSpec grid{{-4.0, 4.0, 41}, {-4.0, 4.0, 41}};
    GridSpec marginal_grid{{-10.0, 10.0, 201}, {-10.0, 10.0, 201}};
    GridSpec candidate_grid{{-3.0, 3.0, 7}, {-3.0, 3.0, 7}};
    bool timestamp = true;
};

struct Report {
    Options options;
    std::vector<Row> rows;
    std::string timestamp;

    bool pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass || r.candidate || r.skipped; });
    }
};

namespace detail {

inline Row make_row(std::string check, double deviation, double tol, bool candidate = false,
                    std::optional<Complex> constant = std::nullopt) {
    Row r;
    r.check = std::move(check);
    r.deviation = deviation;
    r.tol = tol;
    r.pass = std::isfinite(deviation) && deviation <= tol;
    r.candidate = candidate;
    r.constant = constant;
    return r;
}

inline Row failed_row(std::string check, double tol, bool candidate, const std::exception& e) {
    Row r = make_row(std::move(check), std::numeric_limits<double>::infinity(), tol, candidate);
    r.note = e.what();
    return r;
}

inline std::string axis_text(const Axis& a) {
    return qphase::detail::format_double(a.min) + "," + qphase::detail::format_double(a.max) + "," +
           std::to_string(a.count);
}

}  // namespace detail

/// Runs one guarded check; numeric failures become failed rows instead of aborting the suite.
inline void guarded(std::vector<Row>& rows, const std::string& name, double tol, bool candidate,
                    const std::function<Row()>& body) {
    try {
        rows.push_back(body());
    } catch (const Error& e) {
        rows.push_back(detail::failed_row(name, tol, candidate, e));
    }
}

inline Report run(const Options& opts) {
    Report report;
    report.options = opts;
    auto& rows = report.rows;
    const double tol = opts.tol;

    std::vector<std::pair<std::string, StateSpec>> states;
    for (const auto& s : opts.states) states.emplace_back(s, parse_state_spec(s));

    // Calibration on the vacuum.
    CalibrationCache cache;
    const StateSpec vacuum = state::Fock{0};
    std::map<std::string, FitResult> base;
    for (auto route : kCalibratedRoutes) {
        const std::string r(route);
        const bool candidate = r == "kr.vacuum";
        guarded(rows, "calibration.residual " + r + " [vacuum]", 1e-8, candidate, [&] {
            const FitResult f = fit_route(r, vacuum, opts.dim);
            base[r] = f;
            if (f.residual < kCalibrationResidualLimit) {
                cache.store({r, f.constant, "vacuum", f.residual});
            }
            return detail::make_row("calibration.residual " + r + " [vacuum]", f.residual, 1e-8, candidate, f.constant);
        });
    }
    if (base.count("wigner.parity")) {
        const Complex c = base["wigner.parity"].constant;
        rows.push_back(detail::make_row("calibration.constant wigner.parity = 1/pi", std::abs(c - 1.0 / kPi), 1e-9,
                                        false, c));
    }

    for (const auto& [name, spec] : states) {
        const std::string tag = " [" + name + "]";
        std::optional<DensityOperator> rho_opt;
        guarded(rows, "state" + tag, 0.0, false, [&] {
            rho_opt.emplace(make_state(spec, opts.dim));
            return detail::make_row("state" + tag, 0.0, 0.0);
        });
        if (!rho_opt) continue;
        const DensityOperator& rho = *rho_opt;
        const bool has_p = std::holds_alternative<state::Coherent>(spec) ||
                           std::holds_alternative<state::Thermal>(spec) ||
                           (std::holds_alternative<state::Fock>(spec) && std::get<state::Fock>(spec).n == 0);

        // Calibration stability.
        for (auto route : kCalibratedRoutes) {
            const std::string r(route);
            const bool candidate = r == "kr.vacuum";
            const std::string check = "calibration.stability " + r + tag;
            if (r == "kr.p" && !has_p) {
                Row row = detail::make_row(check, 0.0, tol);
                row.skipped = true;
                row.note = "no regular P-function";
                rows.push_back(row);
                continue;
            }
            guarded(rows, check, tol, candidate, [&] {
                const FitResult f = fit_route(r, spec, opts.dim);
                const Complex c0 = base.count(r) ? base[r].constant : Complex(0.0, 0.0);
                double dev = std::abs(f.constant - c0) / std::abs(c0);
                if (!(f.residual < kCalibrationResidualLimit)) dev = std::max(dev, f.residual);
                Row row = detail::make_row(check, dev, tol, candidate, f.constant);
                row.note = "fit residual " + qphase::detail::format_double(f.residual);
                return row;
            });
        }

        // Wigner routes.
        Matrix w_int;
        guarded(rows, "wigner.parity~wigner.integral" + tag, tol, false, [&] {
            w_int = wigner_integral_grid(rho, opts.grid);
            return detail::make_row("wigner.parity~wigner.integral" + tag,
                                    max_abs_diff(wigner_parity_grid(rho, opts.grid), w_int), tol);
        });
        guarded(rows, "wigner.charfn~wigner.integral" + tag, tol, false, [&] {
            const Complex c = cache.require("wigner.charfn").constant;
            const Matrix w = c * CharFnLattice(rho).wigner_raw(opts.grid);
            return detail::make_row("wigner.charfn~wigner.integral" + tag, max_abs_diff(w, w_int), tol, false, c);
        });

        // KR routes.
        Matrix k_direct;
        guarded(rows, "kr.charfn~kr.direct" + tag, tol, false, [&] {
            k_direct = kr_direct_grid(rho, opts.grid);
            const Complex c = cache.require("kr.charfn").constant;
            const Matrix k = c * CharFnLattice(rho).kr_raw(opts.grid);
            return detail::make_row("kr.charfn~kr.direct" + tag, max_abs_diff(k, k_direct), tol, false, c);
        });
        guarded(rows, "kr.vacuum~kr.direct" + tag, tol, true, [&] {
            const Complex c = cache.require("kr.vacuum").constant;
            const Matrix k = c * kr_vacuum_grid(rho, opts.grid);
            return detail::make_row("kr.vacuum~kr.direct" + tag, max_abs_diff(k, k_direct), tol, true, c);
        });
        if (has_p) {
            guarded(rows, "kr.p~kr.direct" + tag, tol, false, [&] {
                const auto p = p_for_state(spec);
                const DensityOperator rp = prep::density_from_p(p, opts.dim);
                // A rejected calibration still carries its least-squares constant; the row then shows
                // how far the route is from kr.direct instead of only reporting the rejection.
                const auto cached = cache.find("kr.p");
                if (!cached && !base.count("kr.p")) cache.require("kr.p");
                const Complex c = cached ? cached->constant : base["kr.p"].constant;
                const Matrix k = c * kr_p_grid(p, opts.grid);
                Row row = detail::make_row("kr.p~kr.direct" + tag, max_abs_diff(k, kr_direct_grid(rp, opts.grid)), tol,
                                           false, c);
                if (!cached) row.note = "vacuum calibration rejected; least-squares constant used";
                return row;
            });
        } else {
            Row row = detail::make_row("kr.p~kr.direct" + tag, 0.0, tol);
            row.skipped = true;
            row.note = "no regular P-function";
            rows.push_back(row);
        }

        // KR marginals and conjugation.
        guarded(rows, "kr.marginal" + tag, tol, false, [&] {
            const MarginalDeviations m = kr_marginals(rho, opts.marginal_grid);
            rows.push_back(detail::make_row("kr.marginal-q" + tag, m.q_marginal, tol));
            rows.push_back(detail::make_row("kr.marginal-p" + tag, m.p_marginal, tol));
            rows.push_back(detail::make_row("kr.mass-imag" + tag, m.mass_imag, 1e-8));
            return detail::make_row("kr.mass-real" + tag, m.mass_real, tol);
        });
        guarded(rows, "kr.conjugation" + tag, 1e-12, false, [&] {
            return detail::make_row("kr.conjugation" + tag, kr_conjugation_deviation(rho, opts.candidate_grid), 1e-12);
        });

        // Cohen class.
        guarded(rows, "cohen.unity~wigner.integral" + tag, tol, false, [&] {
            const Matrix c = cohen(rho, CohenKernel::unity(), opts.grid).values();
            return detail::make_row("cohen.unity~wigner.integral" + tag, max_abs_diff(c, w_int), tol);
        });
        guarded(rows, "cohen.dirac-pair~charfn" + tag, tol, false, [&] {
            const Matrix c = cohen(rho, CohenKernel::dirac_pair(), opts.grid).values();
            return detail::make_row("cohen.dirac-pair~charfn" + tag, max_abs_diff(c, char_fn_grid(rho, opts.grid)), tol);
        });

        // Candidate identities.
        const GridSpec& cg = opts.candidate_grid;
        Matrix k22;
        Matrix k26;
        const Matrix kd = kr_direct_grid(rho, cg);
        guarded(rows, "candidate parity-sandwich~kr.direct" + tag, tol, true, [&] {
            k22 = sample_grid(cg, [&](const PhasePoint& pt) { return parity_sandwich(rho, pt); });
            const FitResult f = fit_grid(k22, kd);
            return detail::make_row("candidate parity-sandwich~kr.direct" + tag, f.residual, tol, true, 1.0 / f.constant);
        });
        guarded(rows, "candidate kr.vacuum~parity-sandwich" + tag, tol, true, [&] {
            k26 = kr_vacuum_grid(rho, cg);
            const FitResult f = fit_grid(k26, k22);
            return detail::make_row("candidate kr.vacuum~parity-sandwich" + tag, f.residual, tol, true, 1.0 / f.constant);
        });
        guarded(rows, "candidate kr.vacuum~kr.direct(parity*rho)" + tag, tol, true, [&] {
            Matrix pr = rho.matrix();
            for (int k = 1; k < pr.rows(); k += 2) pr.row(k) *= -1.0;
            const Matrix ref = sample_grid(cg, [&](const PhasePoint& pt) {
                return qphase::detail::kr_sandwich(pr, static_cast<int>(pr.rows()), pt);
            });
            const FitResult f = fit_grid(k26, ref);
            return detail::make_row("candidate kr.vacuum~kr.direct(parity*rho)" + tag, f.residual, tol, true, 1.0 / f.constant);
        });
        guarded(rows, "candidate kr.vacuum(bra +sqrt2 iY)~kr.direct" + tag, tol, true, [&] {
            const FitResult f = fit_grid(kr_vacuum_grid(rho, cg, true), kd);
            return detail::make_row("candidate kr.vacuum(bra +sqrt2 iY)~kr.direct" + tag, f.residual, tol, true,
                                    1.0 / f.constant);
        });
        if (has_p) {
            guarded(rows, "candidate kr.p*exp(-(q^2+p^2)/2)~kr.direct" + tag, tol, true, [&] {
                const auto p = p_for_state(spec);
                const DensityOperator rp = prep::density_from_p(p, opts.dim);
                const Matrix raw = sample_grid(cg, [&](const PhasePoint& pt) {
                    return std::exp(-0.5 * (pt.q() * pt.q() + pt.p() * pt.p())) * prep::kr_from_p_raw(p, pt);
                });
                const FitResult f = fit_grid(raw, kr_direct_grid(rp, cg));
                return detail::make_row("candidate kr.p*exp(-(q^2+p^2)/2)~kr.direct" + tag, f.residual, tol, true,
                                        1.0 / f.constant);
            });
        }
    }

    // P-form consistency: the two printed forms should differ by a pure phase of modulus 1.
    guarded(rows, "candidate p-bracket/p-integrand ratio", tol, true, [&] {
        double dev = 0.0;
        double worst_modulus = 1.0;
        for (Complex alpha : {Complex(0.0, 0.0), Complex(0.5, 0.3), Complex(0.0, -0.7)}) {
            for (int iq = 0; iq < opts.candidate_grid.q.count; ++iq) {
                for (int ip = 0; ip < opts.candidate_grid.p.count; ++ip) {
                    const auto pt = PhasePoint::from_quadratures(opts.candidate_grid.q.at(iq), opts.candidate_grid.p.at(ip));
                    const Complex ratio = p_bracket_atom(alpha, pt) / p_integrand_atom(alpha, pt);
                    if (std::abs(ratio - 1.0) > dev) {
                        dev = std::abs(ratio - 1.0);
                        worst_modulus = std::abs(ratio);
                    }
                }
            }
        }
        Row row = detail::make_row("candidate p-bracket/p-integrand ratio", dev, tol, true);
        row.note = "ratio modulus at worst point " + qphase::detail::format_double(worst_modulus);
        return row;
    });

    // Special functions and position eigenstates.
    guarded(rows, "position-eigenstate displaced-vacuum~hermite", 1e-10, false, [&] {
        return detail::make_row("position-eigenstate displaced-vacuum~hermite", position_eigenstate_deviation(), 1e-10);
    });
    guarded(rows, "hermite integral~recurrence", 1e-8, false, [&] {
        return detail::make_row("hermite integral~recurrence", hermite_integral_deviation(), 1e-8);
    });
    guarded(rows, "hermite generating-sum~exp", 1e-10, false, [&] {
        return detail::make_row("hermite generating-sum~exp", generating_deviation(), 1e-10);
    });
    guarded(rows, "hermite derivative-shift", 1e-5, false, [&] {
        return detail::make_row("hermite derivative-shift", derivative_shift_deviation(), 1e-5);
    });
    return report;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string to_text(const Report& r) {
    std::string out;
    char buf[512];
    for (const auto& row : r.rows) {
        const char* status = row.skipped ? "SKIP" : row.pass ? "PASS" : "FAIL";
        std::snprintf(buf, sizeof buf, "%s  %-58s dev=%-12.4g tol=%-8.2g%s", status, row.check.c_str(), row.deviation,
                      row.tol, row.candidate ? " [candidate]" : "");
        out += buf;
        if (row.constant) out += " constant=" + format_complex(*row.constant);
        if (!row.note.empty()) out += "  (" + row.note + ")";
        out += '\n';
    }
    out += r.pass() ? "overall: PASS\n" : "overall: FAIL\n";
    return out;
}

inline std::string to_json(const Report& r) {
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json env;
    env["dim"] = r.options.dim;
    env["tol"] = r.options.tol;
    env["states"] = r.options.states;
    env["grid"] = detail::axis_text(r.options.grid.q) + "," + detail::axis_text(r.options.grid.p);
    env["marginal_grid"] = detail::axis_text(r.options.marginal_grid.q) + "," + detail::axis_text(r.options.marginal_grid.p);
    env["candidate_grid"] =
        detail::axis_text(r.options.candidate_grid.q) + "," + detail::axis_text(r.options.candidate_grid.p);
    env["calibration_residual_limit"] = kCalibrationResidualLimit;
    if (r.options.timestamp && !r.timestamp.empty()) env["timestamp"] = r.timestamp;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j{{"check", row.check}, {"deviation", num(row.deviation)}, {"tol", row.tol},
               {"pass", row.pass},   {"candidate", row.candidate},     {"skipped", row.skipped}};
        if (row.constant) j["constant"] = {row.constant->real(), row.constant->imag()};
        if (!row.note.empty()) j["note"] = row.note;
        rows.push_back(std::move(j));
    }
    json out{{"environment", env}, {"rows", rows}, {"pass", r.pass()}};
    return out.dump(2) + "\n";
}

}  // namespace qphase::verify
