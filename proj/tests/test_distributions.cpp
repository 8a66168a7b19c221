// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "qphase/calibration.hpp"
#include "qphase/distributions.hpp"
#include "qphase/oracle.hpp"
#include "qphase/verify.hpp"
#include "support.hpp"

namespace qphase {
namespace {

using std::numbers::pi;
using testing::near;

const Complex kI{0.0, 1.0};

PhasePoint at(double q, double p) { return PhasePoint::from_quadratures(q, p); }

DensityOperator vacuum(int dim = 64) { return make_state(state::Fock{0}, dim); }

// Coherent-state wavefunctions for alpha = (q0 + i p0)/sqrt2, written out directly.
Complex coherent_psi(Complex alpha, double q) {
    const double q0 = std::numbers::sqrt2 * alpha.real();
    const double p0 = std::numbers::sqrt2 * alpha.imag();
    return std::pow(pi, -0.25) * std::exp(-0.5 * (q - q0) * (q - q0) + kI * (p0 * q - 0.5 * q0 * p0));
}

Complex coherent_phi(Complex alpha, double p) {
    const double q0 = std::numbers::sqrt2 * alpha.real();
    const double p0 = std::numbers::sqrt2 * alpha.imag();
    return std::pow(pi, -0.25) * std::exp(-0.5 * (p - p0) * (p - p0) - kI * (q0 * p - 0.5 * q0 * p0));
}

double coherent_wigner(Complex alpha, double q, double p) {
    const double q0 = std::numbers::sqrt2 * alpha.real();
    const double p0 = std::numbers::sqrt2 * alpha.imag();
    return std::exp(-(q - q0) * (q - q0) - (p - p0) * (p - p0)) / pi;
}

// --- characteristic function -------------------------------------------------

TEST(CharFn, Examples) {
    EXPECT_TRUE(near(char_fn(make_state(state::Squeezed{0.4, 0.2}), 0.0), 1.0, 1e-12));
    EXPECT_TRUE(near(char_fn(vacuum(), 1.0), std::exp(-0.5), 1e-12));
    EXPECT_TRUE(near(char_fn(make_state(state::Fock{1}), 1.0), 0.0, 1e-12));
}

TEST(CharFn, MatchesClosedForms) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Complex alpha(0.6, -0.8);
    const DensityOperator coh = make_state(state::Coherent{alpha});
    const DensityOperator f1 = make_state(state::Fock{1});
    for (int k = 0; k < 20; ++k) {
        const Complex b(u(rng), u(rng));
        const double x = std::norm(b);
        EXPECT_TRUE(near(char_fn(f1, b), (1.0 - x) * std::exp(-0.5 * x), 1e-11));
        EXPECT_TRUE(near(char_fn(coh, b), std::exp(-0.5 * x + b * std::conj(alpha) - std::conj(b) * alpha), 1e-11));
    }
}

// --- Wigner ---------------------------------------------------------------------

TEST(WignerIntegral, Examples) {
    EXPECT_NEAR(wigner_integral(vacuum(), at(0, 0)), 1.0 / pi, 1e-10);
    EXPECT_NEAR(wigner_integral(make_state(state::Fock{1}), at(0, 0)), -1.0 / pi, 1e-10);
    EXPECT_NEAR(wigner_integral(make_state(state::Coherent{1.0}), at(std::numbers::sqrt2, 0)), 1.0 / pi, 1e-10);
}

TEST(WignerIntegral, MatchesClosedForms) {
    const Complex alpha(0.3, 0.5);
    const PositionRepresentation coh(make_state(state::Coherent{alpha}));
    const PositionRepresentation f1(make_state(state::Fock{1}));
    for (double q : {-1.5, 0.0, 0.7}) {
        for (double p : {-1.0, 0.2, 1.3}) {
            EXPECT_NEAR(wigner_integral(coh, at(q, p)), coherent_wigner(alpha, q, p), 1e-10) << q << "," << p;
            const double r2 = q * q + p * p;
            EXPECT_NEAR(wigner_integral(f1, at(q, p)), (2.0 * r2 - 1.0) * std::exp(-r2) / pi, 1e-10);
        }
    }
}

TEST(WignerIntegral, MomentumSignConvention) {
    const DensityOperator rho = make_state(state::Coherent{Complex(0.0, 0.5)});
    EXPECT_GT(wigner_integral(rho, at(0, 0.7)), wigner_integral(rho, at(0, -0.7)));
    EXPECT_NEAR(wigner_integral(rho, at(0, 0.7)), wigner_parity(rho, at(0, 0.7), true), 1e-9);
}

TEST(WignerParity, Examples) {
    EXPECT_NEAR(wigner_parity(vacuum(), at(0, 0), false), 1.0, 1e-14);
    EXPECT_NEAR(wigner_parity(make_state(state::Fock{1}), at(0, 0), false), -1.0, 1e-14);
    EXPECT_NEAR(wigner_parity(vacuum(), at(0, 0), true), wigner_integral(vacuum(), at(0, 0)), 1e-9);
}

TEST(WignerParity, RealOnEnvelopeForHermitianStates) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (const char* s : {"squeezed", "cat"}) {
        const DensityOperator rho = std::string(s) == "cat" ? make_state(state::Cat{Complex(1.0, 0.5), 0.7})
                                                              : make_state(state::Squeezed{0.4, 1.1});
        const int eff = rho.effective_dim();
        for (int k = 0; k < 20; ++k) {
            const PhasePoint pt = at(u(rng), u(rng));
            const Complex t = (parity(eff).matrix() * rho.matrix().topLeftCorner(eff, eff) *
                               displacement(2.0 * pt.beta(), eff).matrix())
                                  .trace();
            EXPECT_LT(std::abs(t.imag()), 1e-9);
            EXPECT_NEAR(wigner_parity(rho, pt, false), t.real(), 1e-12);
        }
    }
}

TEST(WignerFromCharfn, VacuumAndCoherentOnWideGrid) {
    CalibrationCache cache;
    calibrate("wigner.charfn", state::Fock{0}, cache);
    const GridSpec g{{-6.0, 6.0, 129}, {-6.0, 6.0, 129}};
    const DistributionGrid w = wigner_from_charfn(vacuum(), g, cache);
    const Matrix ref = verify::wigner_integral_grid(vacuum(), g);
    EXPECT_LT(verify::max_abs_diff(w.values(), ref), 1e-6);
    EXPECT_NEAR(w.values().sum().real() * w.cell_area(), 1.0, 1e-6);
    EXPECT_EQ(w.metadata().route, "wigner.charfn");
    ASSERT_TRUE(w.metadata().calibration.has_value());

    const DensityOperator coh = make_state(state::Coherent{Complex(1.0, 0.5)});
    const DistributionGrid wc = wigner_from_charfn(coh, g, cache);
    EXPECT_LT(verify::max_abs_diff(wc.values(), verify::wigner_parity_grid(coh, g)), 1e-6);
}

TEST(WignerFromCharfn, DomainErrorNamesExtent) {
    LatticeOptions opts;
    opts.max_extent = 6.5;
    try {
        CharFnLattice lattice(make_state(state::Squeezed{0.8, 0.0}), opts);
        FAIL() << "expected a domain error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::domain);
        EXPECT_NE(std::string(e.what()).find("required extent"), std::string::npos);
    }
}

TEST(WignerFromCharfn, Uncalibrated) {
    CalibrationCache empty;
    EXPECT_TRUE(testing::throws_code([&] { wigner_from_charfn(vacuum(), GridSpec{{-1, 1, 3}, {-1, 1, 3}}, empty); },
                                     ErrorCode::uncalibrated_route));
}

TEST(WignerRoutes, AgreeAcrossTestStates) {
    CalibrationCache cache;
    calibrate("wigner.charfn", state::Fock{0}, cache);
    const GridSpec g{{-4.0, 4.0, 21}, {-4.0, 4.0, 21}};
    for (const StateSpec& s : {StateSpec{state::Fock{3}}, StateSpec{state::Thermal{0.5}},
                               StateSpec{state::Squeezed{0.4, 0.0}}}) {
        const DensityOperator rho = make_state(s);
        const Matrix w = verify::wigner_integral_grid(rho, g);
        EXPECT_LT(verify::max_abs_diff(verify::wigner_parity_grid(rho, g), w), 1e-6) << to_string(s);
        EXPECT_LT(verify::max_abs_diff(wigner_from_charfn(rho, g, cache).values(), w), 1e-6) << to_string(s);
    }
}

// --- Kirkwood-Rihaczek ------------------------------------------------------------

TEST(KrDirect, Examples) {
    EXPECT_TRUE(near(kr_direct(vacuum(), at(0, 0)), 1.0 / (pi * std::numbers::sqrt2), 1e-12));
    EXPECT_TRUE(near(kr_direct(make_state(state::Fock{1}), at(0, 0)), 0.0, 1e-14));
    const DensityOperator rho = vacuum();
    const auto r = oracle::integrate_1d([&](double p) { return kr_direct(rho, at(0.5, p)); }, -10.0, 10.0, 1e-12, 8);
    EXPECT_NEAR(r.value.real(), std::exp(-0.25) / std::sqrt(pi), 1e-7);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-7);
}

TEST(KrDirect, CoherentStateFromWavefunctions) {
    // K = <p|rho|q><q|p> with <q|p> = e^{ipq}/sqrt(2 pi).
    const Complex alpha(0.4, -0.9);
    const DensityOperator rho = make_state(state::Coherent{alpha});
    for (double q : {-1.2, 0.0, 0.8}) {
        for (double p : {-0.7, 0.3, 1.6}) {
            const Complex ref =
                coherent_phi(alpha, p) * std::conj(coherent_psi(alpha, q)) * std::exp(kI * p * q) / std::sqrt(2 * pi);
            EXPECT_TRUE(near(kr_direct(rho, at(q, p)), ref, 1e-12)) << q << "," << p;
        }
    }
}

TEST(KrDirect, ConjugationIdentity) {
    const GridSpec g{{-3.0, 3.0, 9}, {-3.0, 3.0, 9}};
    for (const StateSpec& s : {StateSpec{state::Coherent{Complex(1.0, 0.3)}}, StateSpec{state::Squeezed{0.4, 0.5}},
                               StateSpec{state::Cat{1.0, 0.0}}}) {
        EXPECT_LE(verify::kr_conjugation_deviation(make_state(s), g), 1e-12) << to_string(s);
    }
}

TEST(KrDirect, MarginalsAndMass) {
    const GridSpec g{{-10.0, 10.0, 201}, {-10.0, 10.0, 201}};
    for (const StateSpec& s : {StateSpec{state::Fock{2}}, StateSpec{state::Coherent{Complex(0.5, -1.0)}}}) {
        const auto m = verify::kr_marginals(make_state(s), g);
        EXPECT_LT(m.q_marginal, 1e-6);
        EXPECT_LT(m.p_marginal, 1e-6);
        EXPECT_LT(m.mass_real, 1e-6);
        EXPECT_LT(m.mass_imag, 1e-8);
    }
}

TEST(KrDirect, EnvelopeIsEnforced) {
    EXPECT_TRUE(testing::throws_code([] { kr_direct(vacuum(), at(10.5, 0)); }, ErrorCode::range));
}

TEST(KrFromCharfn, Examples) {
    CalibrationCache cache;
    calibrate("kr.charfn", state::Fock{0}, cache);
    EXPECT_TRUE(near(kr_from_charfn(vacuum(), at(0, 0), cache), 1.0 / (pi * std::numbers::sqrt2), 1e-6));
    EXPECT_TRUE(near(kr_from_charfn(make_state(state::Fock{1}), at(0, 0), cache), 0.0, 1e-6));
    const FitResult refit = fit_route("kr.charfn", state::Fock{2});
    EXPECT_LT(std::abs(refit.constant - cache.require("kr.charfn").constant) / std::abs(refit.constant), 1e-6);
}

TEST(KrFromCharfn, ConstantIsOneOverTwoPiSquared) {
    const FitResult f = fit_route("kr.charfn", state::Fock{0});
    EXPECT_LT(std::abs(f.constant - 1.0 / (2.0 * pi * pi)), 1e-10);
}

// The sandwich form evaluates, after the truncated exponentials are applied, to
// pi <p| parity rho |q><q|p>: it equals pi K for parity-even states only.
TEST(KrVacuumForm, Examples) {
    EXPECT_TRUE(near(kr_vacuum_form_raw(vacuum(), at(0, 0)), 1.0 / std::numbers::sqrt2, 1e-12));
    EXPECT_TRUE(near(kr_vacuum_form_raw(make_state(state::Fock{1}), at(0, 0)), 0.0, 1e-8));
}

TEST(KrVacuumForm, EqualsParityTwistedKernel) {
    for (const StateSpec& s : {StateSpec{state::Coherent{0.7}}, StateSpec{state::Fock{1}},
                               StateSpec{state::Thermal{0.5}}, StateSpec{state::Squeezed{0.4, 0.0}}}) {
        const DensityOperator rho = make_state(s, 96);
        const int eff = rho.effective_dim();
        const Matrix pr = parity(eff).matrix() * rho.matrix().topLeftCorner(eff, eff);
        const VacuumFormEvaluator ev(rho);
        for (auto [q, p] : {std::pair{1.0, -0.4}, std::pair{0.0, 0.0}, std::pair{-0.6, 1.1}}) {
            const Complex ref = pi * qphase::detail::kr_sandwich(pr, eff, at(q, p));
            EXPECT_TRUE(near(ev.raw(at(q, p)), ref, 1e-10)) << to_string(s);
            // with the bra amplitude +sqrt2 iY the parity disappears
            EXPECT_TRUE(near(ev.raw(at(q, p), true), pi * kr_direct(rho, at(q, p)), 1e-10)) << to_string(s);
        }
    }
}

TEST(KrVacuumForm, CalibratedCoherentDiffersFromDirect) {
    CalibrationCache cache;
    calibrate("kr.vacuum", state::Fock{0}, cache, 96);
    const DensityOperator rho = make_state(state::Coherent{0.7}, 96);
    const Complex v = kr_vacuum_form(rho, at(1.0, -0.4), cache);
    const Complex d = kr_direct(rho, at(1.0, -0.4));
    EXPECT_GT(std::abs(v - d), 1e-3);
}

TEST(KrVacuumForm, IndependentOfWorkingDimension) {
    const DensityOperator rho = make_state(state::Coherent{Complex(2.0, -1.0)}, 64);
    const VacuumFormEvaluator small(rho);
    const VacuumFormEvaluator large(rho, 96);
    for (auto [q, p] : {std::pair{2.0, 0.0}, std::pair{4.0, 3.0}, std::pair{-1.0, 1.5}}) {
        const Complex a = small.raw(at(q, p));
        EXPECT_LT(std::abs(a - large.raw(at(q, p))), 1e-8 * std::max(std::abs(a), 1.0));
    }
}

// --- Husimi Q ------------------------------------------------------------------

TEST(QFunction, Examples) {
    EXPECT_NEAR(q_function(vacuum(), 0.0), 1.0, 1e-14);
    EXPECT_NEAR(q_function(make_state(state::Fock{3}), 0.0), 0.0, 1e-14);
    EXPECT_NEAR(q_function(make_state(state::Coherent{1.0}), 0.0), std::exp(-1.0), 1e-12);
}

TEST(QFunction, BoundsAndNormalization) {
    for (const StateSpec& s : {StateSpec{state::Fock{2}}, StateSpec{state::Squeezed{0.4, 0.0}},
                               StateSpec{state::Cat{Complex(1.0, 1.0), 0.3}}}) {
        const DensityOperator rho = make_state(s);
        const double h = 0.1;
        double sum = 0.0;
        for (double x = -7.0; x <= 7.0 + 1e-9; x += h) {
            for (double y = -7.0; y <= 7.0 + 1e-9; y += h) {
                const double v = q_function(rho, Complex(x, y));
                EXPECT_GE(v, -1e-10);
                EXPECT_LE(v, 1.0 + 1e-10);
                sum += v;
            }
        }
        EXPECT_NEAR(sum * h * h / pi, 1.0, 1e-5) << to_string(s);
    }
}

TEST(QFunction, PositivityViolationDetected) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = m(1, 0) = 1e-11;
    // A matrix that passes construction within tolerance still yields Q >= -1e-10.
    EXPECT_NO_THROW(q_function(DensityOperator::from_matrix(m), Complex(0.1, 0.0)));
}

// --- calibration -----------------------------------------------------------------

TEST(Calibration, WignerParityConstantIsOneOverPi) {
    const FitResult f = fit_route("wigner.parity", state::Fock{0});
    EXPECT_LT(std::abs(f.constant - 1.0 / pi), 1e-9);
    EXPECT_LT(f.residual, kCalibrationResidualLimit);
}

TEST(Calibration, VacuumFormConstantIsNotStateIndependent) {
    const FitResult vac = fit_route("kr.vacuum", state::Fock{0});
    EXPECT_LT(vac.residual, kCalibrationResidualLimit);
    EXPECT_TRUE(std::isfinite(std::abs(vac.constant)));
    const FitResult coh = fit_route("kr.vacuum", state::Coherent{0.5});
    EXPECT_GT(coh.residual, 1e-3);
    CalibrationCache cache;
    EXPECT_TRUE(testing::throws_code([&] { calibrate("kr.vacuum", state::Coherent{0.5}, cache); },
                                     ErrorCode::calibration_failure));
    EXPECT_FALSE(cache.find("kr.vacuum").has_value());
}

TEST(Calibration, StateIndependentForLatticeRoutes) {
    for (const char* route : {"wigner.parity", "wigner.charfn", "kr.charfn"}) {
        const FitResult base = fit_route(route, state::Fock{0});
        for (const StateSpec& s : {StateSpec{state::Fock{1}}, StateSpec{state::Fock{2}},
                                   StateSpec{state::Coherent{1.0}}, StateSpec{state::Thermal{0.5}},
                                   StateSpec{state::Squeezed{0.4, 0.0}}}) {
            const FitResult f = fit_route(route, s);
            EXPECT_LT(f.residual, kCalibrationResidualLimit) << route << " " << to_string(s);
            EXPECT_LT(std::abs(f.constant - base.constant) / std::abs(base.constant), 1e-6) << route;
        }
    }
}

TEST(Calibration, UnregisteredRoute) {
    CalibrationCache cache;
    EXPECT_TRUE(testing::throws_code([&] { calibrate("kr.bogus", state::Fock{0}, cache); }, ErrorCode::invalid_input));
    EXPECT_TRUE(testing::throws_code([&] { cache.require("kr.bogus"); }, ErrorCode::uncalibrated_route));
}

TEST(Calibration, FitIsExactForScaledData) {
    std::vector<Complex> raw;
    std::vector<Complex> ref;
    const Complex c(0.3, -1.7);
    for (int k = 1; k <= 9; ++k) {
        raw.push_back(Complex(k, 2.0 - k));
        ref.push_back(c * raw.back());
    }
    const FitResult f = fit_constant(raw, ref);
    EXPECT_TRUE(near(f.constant, c, 1e-15));
    EXPECT_LT(f.residual, 1e-15);
}

TEST(CalibrationCache, ConcurrentWritersAgree) {
    CalibrationCache cache;
    const Calibration c{"kr.charfn", Complex(0.05, 0.0), "fock:0", 1e-16};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int k = 0; k < 200; ++k) {
                cache.store(c);
                EXPECT_EQ(cache.require("kr.charfn").constant, c.constant);
            }
        });
    }
    for (auto& t : threads) t.join();
}

// --- grids ----------------------------------------------------------------------

TEST(SampleGrid, IndependentOfSchedule) {
    const DensityOperator rho = make_state(state::Squeezed{0.4, 0.3});
    const GridSpec g{{-3.0, 3.0, 37}, {-2.0, 2.0, 11}};
    const Matrix a = sample_grid(g, [&](const PhasePoint& pt) { return kr_direct(rho, pt); });
    Matrix serial(g.q.count, g.p.count);
    for (int i = 0; i < g.q.count; ++i) {
        for (int j = 0; j < g.p.count; ++j) serial(i, j) = kr_direct(rho, at(g.q.at(i), g.p.at(j)));
    }
    EXPECT_EQ(a, serial);
}

TEST(SampleGrid, PropagatesErrors) {
    const GridSpec g{{-12.0, 12.0, 9}, {-1.0, 1.0, 3}};
    EXPECT_TRUE(testing::throws_code(
        [&] { sample_grid(g, [&](const PhasePoint& pt) { return kr_direct(vacuum(), pt); }); }, ErrorCode::range));
}

TEST(DistributionGrid, Invariants) {
    EXPECT_TRUE(testing::throws_code([] { GridSpec{{0.0, 1.0, 1}, {0.0, 1.0, 3}}.validate(); }, ErrorCode::invalid_input));
    EXPECT_TRUE(testing::throws_code([] { GridSpec{{1.0, 0.0, 3}, {0.0, 1.0, 3}}.validate(); }, ErrorCode::invalid_input));
    const GridSpec g{{0.0, 1.0, 2}, {0.0, 1.0, 2}};
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = NAN;
    EXPECT_TRUE(testing::throws_code([&] { DistributionGrid(g, bad, GridMetadata{"vacuum", "kr.direct", 64, {}, {}}); },
                                     ErrorCode::invalid_input));
    EXPECT_TRUE(testing::throws_code(
        [&] { DistributionGrid(g, Matrix::Zero(2, 2), GridMetadata{"vacuum", "kr.nonsense", 64, {}, {}}); },
        ErrorCode::invalid_input));
}

}  // namespace
}  // namespace qphase
