// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "qphase/fockspace.hpp"
#include "qphase/specialfn.hpp"
#include "support.hpp"

namespace qphase {
namespace {

using std::numbers::pi;

double block_max(const Matrix& m, int n) { return m.topLeftCorner(n, n).cwiseAbs().maxCoeff(); }

// <m|D(beta)|0> by a truncated Taylor product of e^{beta a^dag} e^{-beta* a} acting on |0>.
Complex displaced_vacuum_series(Complex beta, int m) {
    Complex term = std::exp(-0.5 * std::norm(beta));
    for (int k = 1; k <= m; ++k) term *= beta / std::sqrt(static_cast<double>(k));
    return term;
}

TEST(Ladder, SmallestSize) {
    const auto [a, ad] = ladder(2);
    EXPECT_EQ(a(0, 0), 0.0);
    EXPECT_EQ(a(0, 1), 1.0);
    EXPECT_EQ(a(1, 0), 0.0);
    EXPECT_EQ(a(1, 1), 0.0);
}

TEST(Ladder, ElementAndNumberOperator) {
    const auto [a, ad] = ladder(8);
    EXPECT_EQ(a(3, 4), 2.0);
    const Matrix n = (ad * a).matrix();
    for (int r = 0; r < 8; ++r) {
        // sqrt(n)^2 rounds to n within an ulp
        for (int c = 0; c < 8; ++c) EXPECT_TRUE(testing::near(n(r, c), r == c ? Complex(r) : Complex(0.0), 1e-14));
    }
    EXPECT_EQ((a.adjoint().matrix() - ad.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ladder, RejectsTinyDimension) {
    EXPECT_TRUE(testing::throws_code([] { ladder(1); }, ErrorCode::invalid_dimension));
    EXPECT_TRUE(testing::throws_code([] { parity(0); }, ErrorCode::invalid_dimension));
}

TEST(Parity, DiagonalAndInvolution) {
    const FockOperator p = parity(4);
    for (int n = 0; n < 4; ++n) EXPECT_EQ(p(n, n), n % 2 ? -1.0 : 1.0);
    EXPECT_TRUE((p * p).matrix().isIdentity(0.0));
}

TEST(Parity, ReflectsPositionEigenstate) {
    const TruncatedVector plus = position_eigenstate(0.7, 64, PositionRoute::hermite);
    const TruncatedVector minus = position_eigenstate(-0.7, 64, PositionRoute::hermite);
    const Complex lhs = minus.amps().dot(parity(64).matrix() * plus.amps());
    double ref = 0.0;
    for (int n = 0; n < 64; ++n) {
        const double psi = specialfn::hermite_function(n, 0.7);
        ref += psi * psi;
    }
    EXPECT_NEAR(lhs.real(), ref, 1e-8);
    EXPECT_NEAR(lhs.imag(), 0.0, 1e-8);
}

TEST(Displacement, ZeroIsIdentity) {
    EXPECT_TRUE(displacement(0.0, 16).matrix().isIdentity(0.0));
    EXPECT_TRUE(displacement(0.0, 16).warnings().empty());
}

TEST(Displacement, VacuumColumnMatchesSeries) {
    const FockOperator d = displacement(1.0, 64);
    EXPECT_TRUE(testing::near(d(0, 0), 0.6065306597126334, 1e-12));
    EXPECT_TRUE(testing::near(d(1, 0), 0.6065306597126334, 1e-12));
    const Complex beta(0.4, -1.1);
    const FockOperator db = displacement(beta, 64);
    for (int m = 0; m < 20; ++m) EXPECT_TRUE(testing::near(db(m, 0), displaced_vacuum_series(beta, m), 1e-13));
}

TEST(Displacement, AgreesWithFactorizedProduct) {
    for (Complex beta : {Complex(1.0, 0.0), Complex(-0.3, 0.8), Complex(1.2, 1.1)}) {
        const Matrix d = displacement(beta, 64).matrix();
        const Matrix f = displacement_factorized(beta, 64).matrix();
        EXPECT_LT(block_max(d - f, 32), 1e-9) << beta;
    }
}

// Elements are those of the untruncated operator, so D^dag D - I on a leading block is minus the
// overlap carried by the dropped rows n >= dim. Columns near 3dim/4 spread past dim once |beta| is
// of order 1, so the block on which unitarity holds to 1e-8 shrinks with |beta|.
TEST(Displacement, UnitarityDefectIsTheDroppedRows) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    for (int trial = 0; trial < 6; ++trial) {
        const Complex beta(u(rng), u(rng));
        if (std::abs(beta) > 2.0) continue;
        const Matrix d = displacement(beta, 64).matrix();
        const Matrix big = displacement(beta, 160).matrix();
        const Matrix dropped = big.block(64, 0, 96, 48);
        const Matrix defect = (d.adjoint() * d).topLeftCorner(48, 48) - Matrix::Identity(48, 48);
        EXPECT_LT((defect + dropped.adjoint() * dropped).cwiseAbs().maxCoeff(), 1e-12) << beta;
    }
}

TEST(Displacement, UnitarityOnLeadingBlock) {
    const Matrix p = parity(64).matrix();
    for (double r : {0.25, 0.5, 1.0, 2.0}) {
        // 3dim/4 for |beta| <= 1/2; dim/3 up to |beta| = 2
        const int block = r <= 0.5 ? 48 : 21;
        for (double theta : {0.0, 0.9, 2.5, -1.7}) {
            const Complex beta = std::polar(r, theta);
            const Matrix d = displacement(beta, 64).matrix();
            const Matrix dm = displacement(-beta, 64).matrix();
            EXPECT_LT(block_max(d.adjoint() * d - Matrix::Identity(64, 64), block), 1e-8) << beta;
            EXPECT_LT(block_max(d * dm - Matrix::Identity(64, 64), block), 1e-8) << beta;
        }
    }
}

TEST(Displacement, ParityConjugation) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    const Matrix p = parity(64).matrix();
    for (int trial = 0; trial < 10; ++trial) {
        const Complex beta(u(rng), u(rng));
        const Matrix d = displacement(beta, 64).matrix();
        const Matrix dm = displacement(-beta, 64).matrix();
        EXPECT_LT(block_max(p * d * p - dm, 48), 1e-8) << beta;
    }
}

TEST(Displacement, MatchesLaguerreSeriesAtHighIndex) {
    const Complex beta(0.9, -0.6);
    const double x = std::norm(beta);
    const Matrix d = displacement(beta, 64).matrix();
    for (auto [m, n] : {std::pair{60, 40}, std::pair{40, 60}, std::pair{63, 63}, std::pair{50, 10}}) {
        const int lo = std::min(m, n);
        const int k = std::abs(m - n);
        long double lag = 0.0L;
        for (int j = 0; j <= lo; ++j) {
            lag += std::pow(-1.0L, j) * std::exp(std::lgamma(lo + k + 1.0L) - std::lgamma(lo - j + 1.0L) -
                                                 std::lgamma(k + j + 1.0L) - std::lgamma(j + 1.0L)) *
                   std::pow(static_cast<long double>(x), j);
        }
        const Complex power = m >= n ? std::pow(beta, k) : std::pow(-std::conj(beta), k);
        const double mag = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) - 0.5 * x);
        EXPECT_TRUE(testing::near(d(m, n), mag * static_cast<double>(lag) * power, 1e-10)) << m << "," << n;
    }
}

TEST(Displacement, DisplacedVacuumIsCoherentState) {
    for (Complex alpha : {Complex(2.0, 0.0), Complex(0.5, -1.5), Complex(-1.2, 1.2)}) {
        const Vector dv = displacement(alpha, 64).matrix().col(0);
        const Matrix rho = make_state(state::Coherent{alpha}).matrix();
        const Vector ref = rho.col(0) / std::sqrt(rho(0, 0).real());
        EXPECT_LT((dv - ref).cwiseAbs().maxCoeff(), 1e-10) << alpha;
    }
}

TEST(Displacement, UnderflowWarning) {
    const FockOperator d = displacement(Complex(40.0, 0.0), 4);
    ASSERT_EQ(d.warnings().size(), 1u);
    EXPECT_NE(d.warnings().front().find("underflow"), std::string::npos);
}

TEST(Displacement, RejectsNonFinite) {
    EXPECT_TRUE(testing::throws_code([] { displacement(Complex(NAN, 0.0), 4); }, ErrorCode::invalid_input));
}

TEST(Expm, Examples) {
    EXPECT_TRUE(expm(FockOperator(Matrix::Zero(3, 3))).matrix().isIdentity(0.0));
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = 2.0;
    const Matrix e = expm(FockOperator(diag)).matrix();
    EXPECT_NEAR(std::abs(e(0, 0) - std::exp(1.0)), 0.0, 1e-13 * std::exp(1.0));
    EXPECT_NEAR(std::abs(e(1, 1) - std::exp(2.0)), 0.0, 1e-13 * std::exp(2.0));
    EXPECT_EQ(e(0, 1), 0.0);
    Matrix nil = Matrix::Zero(2, 2);
    nil(1, 0) = Complex(0.3, -2.0);
    const Matrix en = expm(FockOperator(nil)).matrix();
    EXPECT_TRUE(testing::near(en(0, 0), 1.0, 1e-15));
    EXPECT_TRUE(testing::near(en(1, 0), Complex(0.3, -2.0), 1e-15));
    EXPECT_TRUE(testing::near(en(1, 1), 1.0, 1e-15));
    EXPECT_TRUE(testing::near(en(0, 1), 0.0, 1e-13));
}

TEST(Expm, RejectsNonFinite) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = INFINITY;
    EXPECT_TRUE(testing::throws_code([&] { expm(FockOperator(m)); }, ErrorCode::invalid_input));
}

TEST(PositionEigenstate, OriginComponents) {
    for (auto route : {PositionRoute::hermite, PositionRoute::displaced_vacuum}) {
        const TruncatedVector v = position_eigenstate(0.0, 32, route);
        EXPECT_NEAR(std::abs(v[1]), 0.0, 1e-15);
        EXPECT_NEAR(v[0].real(), specialfn::hermite_integral(0, 0.0) / std::pow(pi, 0.25), 1e-12);
    }
}

TEST(PositionEigenstate, RoutesAgreeAtDim64) {
    const Vector h = position_eigenstate(1.0, 64, PositionRoute::hermite).amps();
    const Vector d = position_eigenstate(1.0, 64, PositionRoute::displaced_vacuum).amps();
    EXPECT_LT((h - d).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PositionEigenstate, FidelityAgainstHermiteFunctions) {
    for (double x = -3.0; x <= 3.0; x += 0.5) {
        for (auto route : {PositionRoute::hermite, PositionRoute::displaced_vacuum}) {
            const TruncatedVector v = position_eigenstate(x, 128, route);
            for (int n = 0; n <= 40; ++n) {
                // independent oracle: explicit normalized Hermite function from the integral-form polynomial
                const double ref = std::exp(-x * x / 2) * specialfn::hermite(n, x) /
                                   std::sqrt(std::pow(2.0, n) * std::sqrt(pi) * std::tgamma(n + 1.0));
                EXPECT_NEAR(v[n].real(), ref, 1e-10) << "x=" << x << " n=" << n;
                EXPECT_EQ(v[n].imag(), 0.0);
            }
        }
    }
}

TEST(PositionEigenstate, RangeAndTruncationErrors) {
    EXPECT_TRUE(testing::throws_code([] { position_eigenstate(8.5, 64, PositionRoute::hermite); }, ErrorCode::range));
    EXPECT_TRUE(
        testing::throws_code([] { position_eigenstate(7.5, 8, PositionRoute::hermite); }, ErrorCode::truncation));
    EXPECT_NO_THROW(position_eigenstate(7.5, 128, PositionRoute::hermite));
}

TEST(MakeState, FockVacuum) {
    const DensityOperator rho = make_state(state::Fock{0}, 4);
    Matrix ref = Matrix::Zero(4, 4);
    ref(0, 0) = 1.0;
    EXPECT_EQ(rho.matrix(), ref);
}

TEST(MakeState, CoherentAmplitude) {
    const DensityOperator rho = make_state(state::Coherent{1.0});
    // |c_2|^2 with c_n = e^{-|a|^2/2} a^n / sqrt(n!)
    const double c2 = std::exp(-0.5) / std::sqrt(2.0);
    EXPECT_NEAR(c2, 0.4288819424803534, 1e-12);
    EXPECT_NEAR(rho(2, 2).real(), c2 * c2, 1e-14);
    EXPECT_NEAR(std::sqrt(rho(2, 2).real()), 0.4288819425, 1e-10);
}

TEST(MakeState, ThermalGeometricLaw) {
    const DensityOperator rho = make_state(state::Thermal{1.0});
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
    for (int n = 0; n < 30; ++n) EXPECT_NEAR(rho(n, n).real(), std::pow(0.5, n + 1), 1e-15);
}

TEST(MakeState, SqueezedVacuumAmplitudes) {
    // <2n|S(r)|0> = (-tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r)) for phi = 0
    const double r = 0.4;
    const Matrix rho = make_state(state::Squeezed{r, 0.0}).matrix();
    const Vector c = rho.col(0) / std::sqrt(rho(0, 0).real());
    for (int n = 0; n < 10; ++n) {
        const double ref = std::pow(-std::tanh(r), n) * std::sqrt(std::tgamma(2.0 * n + 1.0)) /
                           (std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::cosh(r)));
        EXPECT_NEAR(c(2 * n).real(), ref, 1e-13);
        EXPECT_NEAR(std::abs(c(2 * n + 1)), 0.0, 1e-15);
    }
}

TEST(MakeState, CatIsNormalizedSuperposition) {
    const DensityOperator rho = make_state(state::Cat{1.5, 0.0});
    EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
    for (int n = 1; n < 64; n += 2) EXPECT_NEAR(std::abs(rho(n, n)), 0.0, 1e-15);
}

TEST(MakeState, Errors) {
    EXPECT_TRUE(testing::throws_code([] { make_state(state::Fock{4}, 4); }, ErrorCode::invalid_spec));
    EXPECT_TRUE(testing::throws_code([] { make_state(state::Thermal{-1.0}); }, ErrorCode::invalid_spec));
    try {
        make_state(state::Coherent{5.0}, 32);
        FAIL() << "expected truncation error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::truncation);
        // the named dimension is the smallest one that passes
        const std::string msg = e.what();
        const auto pos = msg.find("minimal adequate dim is ");
        ASSERT_NE(pos, std::string::npos);
        const int adequate = std::stoi(msg.substr(pos + 24));
        EXPECT_NO_THROW(make_state(state::Coherent{5.0}, adequate));
        EXPECT_TRUE(testing::throws_code([&] { make_state(state::Coherent{5.0}, adequate - 1); },
                                         ErrorCode::truncation));
    }
}

TEST(MakeState, OutputsSatisfyInvariants) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex alpha(u(rng), u(rng));
        for (const StateSpec& spec : {StateSpec{state::Coherent{alpha}}, StateSpec{state::Thermal{std::abs(alpha)}},
                                      StateSpec{state::Squeezed{0.3 * std::abs(alpha), alpha.real()}},
                                      StateSpec{state::Cat{alpha, alpha.imag()}}}) {
            const DensityOperator rho = make_state(spec);
            const Matrix& m = rho.matrix();
            EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_GE(rho.trace(), 1.0 - kDefaultTailTolerance);
            EXPECT_LE(rho.trace(), 1.0 + 1e-12);
            Eigen::SelfAdjointEigenSolver<Matrix> es(m);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
        }
    }
}

TEST(DensityOperator, ValidationErrors) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = Complex(0.0, 0.1);
    EXPECT_TRUE(testing::throws_code([&] { DensityOperator::from_matrix(m); }, ErrorCode::invalid_input));
    m(0, 1) = 0.0;
    m(0, 0) = 0.9;
    EXPECT_TRUE(testing::throws_code([&] { DensityOperator::from_matrix(m); }, ErrorCode::invalid_input));
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_TRUE(testing::throws_code([&] { DensityOperator::from_matrix(neg); }, ErrorCode::invalid_input));
}

TEST(PhasePoint, ExactInterconversion) {
    const PhasePoint p = PhasePoint::from_quadratures(1.25, -0.5);
    EXPECT_EQ(p.beta().real() * std::numbers::sqrt2, 1.25 / std::numbers::sqrt2 * std::numbers::sqrt2);
    EXPECT_EQ(p.beta(), Complex(1.25, -0.5) / std::numbers::sqrt2);
    const PhasePoint l = PhasePoint::from_label(Complex(1.0, 2.0));
    EXPECT_EQ(l.q(), std::numbers::sqrt2);
    EXPECT_EQ(l.p(), 2.0 * std::numbers::sqrt2);
}

TEST(DensityJson, RoundTripIsBitIdentical) {
    const DensityOperator rho = make_state(state::Squeezed{0.4, 0.3}, 32);
    const std::string text = to_json(rho);
    const DensityOperator back = density_from_json(text);
    EXPECT_EQ(std::memcmp(back.matrix().data(), rho.matrix().data(), sizeof(Complex) * rho.matrix().size()), 0);
    EXPECT_EQ(to_json(back), text);
}

TEST(DensityJson, MalformedInput) {
    EXPECT_TRUE(testing::throws_code([] { density_from_json("{\"dim\": 2}"); }, ErrorCode::invalid_input));
    EXPECT_TRUE(testing::throws_code([] { density_from_json("not json"); }, ErrorCode::invalid_input));
}

TEST(StateSpecText, CanonicalForms) {
    EXPECT_EQ(to_string(StateSpec{state::Fock{3}}), "fock:3");
    EXPECT_EQ(to_string(StateSpec{state::Thermal{0.5}}), "thermal:0.5");
    EXPECT_EQ(to_string(StateSpec{state::Coherent{Complex(1.0, 0.5)}}), "coherent:1+0.5i");
    EXPECT_EQ(to_string(StateSpec{state::Squeezed{0.4, 0.3}}), "squeezed:0.4,0.3");
}

}  // namespace
}  // namespace qphase
