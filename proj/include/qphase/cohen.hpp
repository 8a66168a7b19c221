// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cohen.hpp
 * @brief Cohen-class distributions with a pluggable kernel.
 *
 * With R(x, y) = <x|rho|y> (or phi(x) phi*(y) for a signal) the ambiguity
 * function is
 *
 *   A(theta, tau) = int ds R(s + tau/2, s - tau/2) e^{i theta s},
 *
 * and a kernel Phi(theta, tau) selects the member
 *
 *   C(q, p) = (1/4pi^2) int dtheta dtau A(theta, tau) Phi(theta, tau) e^{-i theta q - i tau p}.
 *
 * Phi = 1 gives the Wigner function. The dirac-pair kernel picks single
 * values of A: the output at (q, p) is A(theta = p, tau = -q), which is the
 * characteristic function C(beta) at beta = (q + ip)/sqrt2.
 *
 * Everything is evaluated on a uniform position lattice x_j = x_0 + j h;
 * tau runs over multiples of h and theta over a grid fine enough that the
 * theta sum has no aliasing on the requested q range.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qphase/distributions.hpp"
#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/grid.hpp"

namespace qphase {

/// Complex samples phi(x_0 + j h).
struct SampledSignal {
    double x0 = 0.0;
    double step = 0.0;
    std::vector<Complex> values;

    /// Builds a signal from explicit abscissae; they must be uniform within 1e-9 of the step.
    static SampledSignal from_samples(const std::vector<double>& xs, std::vector<Complex> values) {
        if (xs.size() < 2 || xs.size() != values.size()) {
            throw Error(ErrorCode::invalid_input, "signal needs >= 2 samples and matching abscissae");
        }
        const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
        if (!(h > 0.0)) throw Error(ErrorCode::invalid_input, "signal abscissae must increase");
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (std::abs(xs[j] - (xs.front() + h * static_cast<double>(j))) > 1e-9 * h) {
                throw Error(ErrorCode::invalid_input, "signal sample grid is not uniform at index " + std::to_string(j));
            }
        }
        return {xs.front(), h, std::move(values)};
    }
};

struct CohenKernel {
    enum class Kind { unity, dirac_pair, custom };

    Kind kind = Kind::unity;
    /// custom only: Phi sampled on theta_axis x tau_axis, bilinear in between, zero outside.
    Axis theta_axis;
    Axis tau_axis;
    Matrix samples;

    static CohenKernel unity() { return {}; }
    static CohenKernel dirac_pair() { return {Kind::dirac_pair, {}, {}, {}}; }
    static CohenKernel custom(Axis theta, Axis tau, Matrix values) {
        theta.validate("kernel theta");
        tau.validate("kernel tau");
        if (values.rows() != theta.count || values.cols() != tau.count || !values.allFinite()) {
            throw Error(ErrorCode::invalid_input, "custom kernel samples must be finite and match the axes");
        }
        return {Kind::custom, theta, tau, std::move(values)};
    }

    bool covers(double theta, double tau) const {
        return theta >= theta_axis.min && theta <= theta_axis.max && tau >= tau_axis.min && tau <= tau_axis.max;
    }

    Complex at(double theta, double tau) const {
        if (kind == Kind::unity) return 1.0;
        if (!covers(theta, tau)) return 0.0;
        auto locate = [](const Axis& a, double v, int& i, double& f) {
            const double t = (v - a.min) / a.step();
            i = std::clamp(static_cast<int>(std::floor(t)), 0, a.count - 2);
            f = t - i;
        };
        int i;
        int j;
        double fi;
        double fj;
        locate(theta_axis, theta, i, fi);
        locate(tau_axis, tau, j, fj);
        return (1 - fi) * (1 - fj) * samples(i, j) + fi * (1 - fj) * samples(i + 1, j) +
               (1 - fi) * fj * samples(i, j + 1) + fi * fj * samples(i + 1, j + 1);
    }
};

struct CohenOptions {
    double lattice_step = 0.05;
    double theta_max = 30.0;
    double edge_tolerance = 1e-10;
};

/// R_ab = <x_a|rho|x_b> on a uniform lattice.
class PositionKernel {
public:
    PositionKernel(double x0, double step, Matrix r) : x0_(x0), step_(step), r_(std::move(r)) {}

    static PositionKernel from_signal(const SampledSignal& s, double edge_tolerance = 1e-10) {
        if (s.values.size() < 2 || !(s.step > 0.0)) throw Error(ErrorCode::invalid_input, "signal needs >= 2 samples");
        if (std::abs(s.values.front()) >= edge_tolerance || std::abs(s.values.back()) >= edge_tolerance) {
            throw Error(ErrorCode::domain, "signal is not negligible at the edges of its sample grid");
        }
        Vector phi(static_cast<int>(s.values.size()));
        for (int j = 0; j < phi.size(); ++j) phi(j) = s.values[j];
        if (!phi.allFinite()) throw Error(ErrorCode::invalid_input, "signal samples must be finite");
        return {s.x0, s.step, phi * phi.adjoint()};
    }

    static PositionKernel from_density(const DensityOperator& rho, double step = 0.05) {
        const PositionRepresentation pos(rho);
        const int half = static_cast<int>(std::ceil(pos.support() / step));
        const int n = 2 * half + 1;
        Matrix b(n, 0);
        for (int j = 0; j < n; ++j) {
            const auto row = pos.wavefunctions((j - half) * step);
            if (j == 0) b.resize(n, row.size());
            b.row(j) = row;
        }
        return {-half * step, step, b * b.adjoint()};
    }

    double x0() const noexcept { return x0_; }
    double step() const noexcept { return step_; }
    int size() const noexcept { return static_cast<int>(r_.rows()); }
    const Matrix& matrix() const noexcept { return r_; }
    double x(int j) const { return x0_ + j * step_; }

    /// A(theta_k, m h) for all theta in the list and all shifts m in [-(n-1), n-1]; columns indexed m + n - 1.
    Matrix ambiguity(const std::vector<double>& thetas) const {
        const int n = size();
        const int nt = static_cast<int>(thetas.size());
        Matrix e(nt, n);
        for (int k = 0; k < nt; ++k) {
            for (int j = 0; j < n; ++j) e(k, j) = std::polar(1.0, thetas[k] * x(j));
        }
        // diag(j, m) = R_{j+m, j}
        Matrix diag = Matrix::Zero(n, 2 * n - 1);
        for (int m = -(n - 1); m <= n - 1; ++m) {
            for (int j = std::max(0, -m); j < std::min(n, n - m); ++j) diag(j, m + n - 1) = r_(j + m, j);
        }
        Matrix a = step_ * (e * diag);
        for (int k = 0; k < nt; ++k) {
            for (int m = -(n - 1); m <= n - 1; ++m) a(k, m + n - 1) *= std::polar(1.0, thetas[k] * 0.5 * m * step_);
        }
        return a;
    }

    /// A(theta, m h) for a single point.
    Complex ambiguity(double theta, int m) const {
        const int n = size();
        Complex sum{0.0, 0.0};
        for (int j = std::max(0, -m); j < std::min(n, n - m); ++j) {
            sum += r_(j + m, j) * std::polar(1.0, theta * (x(j) + 0.5 * m * step_));
        }
        return step_ * sum;
    }

private:
    double x0_;
    double step_;
    Matrix r_;
};

/// Evaluates the Cohen-class member selected by `kernel` on `grid`.
inline Matrix cohen(const PositionKernel& pk, const CohenKernel& kernel, const GridSpec& grid,
                    const CohenOptions& opts = {}) {
    grid.validate();
    const int n = pk.size();
    const double h = pk.step();
    if (kernel.kind == CohenKernel::Kind::dirac_pair) {
        Matrix out(grid.q.count, grid.p.count);
        for (int iq = 0; iq < grid.q.count; ++iq) {
            const double tau = -grid.q.at(iq);
            const double mf = tau / h;
            const long m = std::lround(mf);
            if (std::abs(mf - static_cast<double>(m)) > 1e-9) {
                throw Error(ErrorCode::invalid_input, "dirac-pair: q grid values must be multiples of the lattice step " +
                                                          detail::format_double(h));
            }
            for (int ip = 0; ip < grid.p.count; ++ip) {
                out(iq, ip) = std::abs(m) < n ? pk.ambiguity(grid.p.at(ip), static_cast<int>(m)) : Complex{0.0, 0.0};
            }
        }
        return out;
    }

    const double x_min = pk.x(0);
    const double x_max = pk.x(n - 1);
    const double span = std::max({x_max - grid.q.min, grid.q.max - x_min, x_max - x_min});
    const double period = 1.25 * span + 1.0;
    const double dtheta = 2.0 * kPi / period;
    const double theta_max = std::min(kPi / h, opts.theta_max);
    const int kmax = static_cast<int>(std::floor(theta_max / dtheta));
    std::vector<double> thetas;
    for (int k = -kmax; k <= kmax; ++k) thetas.push_back(k * dtheta);
    Matrix a = pk.ambiguity(thetas);

    if (kernel.kind == CohenKernel::Kind::custom) {
        double peak = a.cwiseAbs().maxCoeff();
        double outside = 0.0;
        for (int k = 0; k < a.rows(); ++k) {
            for (int m = -(n - 1); m <= n - 1; ++m) {
                const double tau = m * h;
                if (!kernel.covers(thetas[k], tau)) {
                    outside = std::max(outside, std::abs(a(k, m + n - 1)));
                } else {
                    a(k, m + n - 1) *= kernel.at(thetas[k], tau);
                }
            }
        }
        if (outside > opts.edge_tolerance * std::max(peak, 1e-300)) {
            throw Error(ErrorCode::domain, "ambiguity function reaches " + detail::format_double(outside / peak) +
                                               " of its peak outside the custom kernel grid");
        }
        for (int k = 0; k < a.rows(); ++k) {
            for (int m = -(n - 1); m <= n - 1; ++m) {
                if (!kernel.covers(thetas[k], m * h)) a(k, m + n - 1) = 0.0;
            }
        }
    }

    Matrix eq(grid.q.count, a.rows());
    for (int iq = 0; iq < grid.q.count; ++iq) {
        for (int k = 0; k < a.rows(); ++k) eq(iq, k) = std::polar(1.0, -thetas[k] * grid.q.at(iq));
    }
    Matrix fp(a.cols(), grid.p.count);
    for (int m = -(n - 1); m <= n - 1; ++m) {
        for (int ip = 0; ip < grid.p.count; ++ip) fp(m + n - 1, ip) = std::polar(1.0, -m * h * grid.p.at(ip));
    }
    return (dtheta * h / (4.0 * kPi * kPi)) * (eq * a * fp);
}

inline DistributionGrid cohen(const DensityOperator& rho, const CohenKernel& kernel, const GridSpec& grid,
                              const CohenOptions& opts = {}) {
    const PositionKernel pk = PositionKernel::from_density(rho, opts.lattice_step);
    GridMetadata meta;
    meta.dim = rho.dim();
    meta.route = kernel.kind == CohenKernel::Kind::unity        ? "cohen.unity"
                 : kernel.kind == CohenKernel::Kind::dirac_pair ? "cohen.dirac-pair"
                                                                : "cohen.custom";
    return DistributionGrid(grid, cohen(pk, kernel, grid, opts), std::move(meta));
}

inline DistributionGrid cohen(const SampledSignal& signal, const CohenKernel& kernel, const GridSpec& grid,
                              const CohenOptions& opts = {}) {
    const PositionKernel pk = PositionKernel::from_signal(signal, opts.edge_tolerance);
    GridMetadata meta;
    meta.state = "signal";
    meta.route = kernel.kind == CohenKernel::Kind::unity        ? "cohen.unity"
                 : kernel.kind == CohenKernel::Kind::dirac_pair ? "cohen.dirac-pair"
                                                                : "cohen.custom";
    return DistributionGrid(grid, cohen(pk, kernel, grid, opts), std::move(meta));
}

}  // namespace qphase
