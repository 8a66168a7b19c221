// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file grid.hpp
 * @brief Sampled phase-space fields and their CSV / JSON forms.
 *
 * CSV: header `q,p,re,im`, one row per cell in q-major order, every number
 * printed with 17 significant digits so it re-parses bit-identically.
 * JSON carries the same values plus a metadata block; the timestamp is the
 * only non-deterministic field and can be left out.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"

namespace qphase {

inline constexpr std::array<std::string_view, 13> kRegisteredRoutes = {
    "wigner.integral", "wigner.parity", "wigner.parity-raw", "wigner.charfn", "kr.direct",
    "kr.charfn",       "kr.vacuum",     "kr.p",              "q.coherent",    "charfn.trace",
    "cohen.unity",     "cohen.dirac-pair", "cohen.custom",
};

inline bool is_registered_route(std::string_view name) {
    return std::find(kRegisteredRoutes.begin(), kRegisteredRoutes.end(), name) != kRegisteredRoutes.end();
}

/// Uniform axis with `count` points from `min` to `max` inclusive.
struct Axis {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    void validate(const char* name) const {
        if (count < 2 || !std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
            throw Error(ErrorCode::invalid_input, std::string(name) + " axis needs count >= 2 and finite max > min");
        }
    }
    double step() const { return (max - min) / (count - 1); }
    double at(int i) const { return i == count - 1 ? max : min + step() * i; }
};

struct GridSpec {
    Axis q;
    Axis p;

    void validate() const {
        q.validate("q");
        p.validate("p");
    }
};

struct GridMetadata {
    std::string state;
    std::string route;
    int dim = 0;
    std::optional<Complex> calibration;
    std::optional<std::string> timestamp;
};

class DistributionGrid {
public:
    DistributionGrid(GridSpec spec, Matrix values, GridMetadata meta)
        : spec_(spec), values_(std::move(values)), meta_(std::move(meta)) {
        spec_.validate();
        if (values_.rows() != spec_.q.count || values_.cols() != spec_.p.count) {
            throw Error(ErrorCode::invalid_input, "grid values do not match axis counts");
        }
        if (!values_.allFinite()) throw Error(ErrorCode::invalid_input, "grid values must be finite");
        if (!is_registered_route(meta_.route)) {
            throw Error(ErrorCode::invalid_input, "unregistered route '" + meta_.route + "'");
        }
    }

    const GridSpec& spec() const noexcept { return spec_; }
    const Axis& q_axis() const noexcept { return spec_.q; }
    const Axis& p_axis() const noexcept { return spec_.p; }
    const Matrix& values() const noexcept { return values_; }
    Complex operator()(int iq, int ip) const { return values_(iq, ip); }
    const GridMetadata& metadata() const noexcept { return meta_; }
    GridMetadata& metadata() noexcept { return meta_; }

    double cell_area() const { return spec_.q.step() * spec_.p.step(); }

private:
    GridSpec spec_;
    Matrix values_;
    GridMetadata meta_;
};

namespace detail {

/// Runs body(i) for i in [0, n) over a fixed set of contiguous chunks.
/// Each index is written by exactly one thread, so results do not depend on scheduling.
template <class Body>
void parallel_for(int n, Body&& body) {
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int workers = std::min(hw, std::max(1, n / 4));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (int i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

/// Samples f(PhasePoint) over the grid, in parallel, deterministically.
template <class F>
Matrix sample_grid(const GridSpec& spec, F&& f) {
    spec.validate();
    Matrix values(spec.q.count, spec.p.count);
    detail::parallel_for(spec.q.count, [&](int iq) {
        for (int ip = 0; ip < spec.p.count; ++ip) {
            values(iq, ip) = Complex(f(PhasePoint::from_quadratures(spec.q.at(iq), spec.p.at(ip))));
        }
    });
    return values;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string to_csv(const DistributionGrid& g) {
    std::string out = "q,p,re,im\n";
    for (int iq = 0; iq < g.q_axis().count; ++iq) {
        const std::string q = detail::format_double(g.q_axis().at(iq));
        for (int ip = 0; ip < g.p_axis().count; ++ip) {
            const Complex v = g(iq, ip);
            out += q + ',' + detail::format_double(g.p_axis().at(ip)) + ',' + detail::format_double(v.real()) + ',' +
                   detail::format_double(v.imag()) + '\n';
        }
    }
    return out;
}

struct CsvRow {
    double q;
    double p;
    Complex value;
};

namespace detail {

inline double parse_number(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw Error(ErrorCode::invalid_input, "CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace detail

inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "q,p,re,im") {
        throw Error(ErrorCode::invalid_input, "CSV header must be q,p,re,im");
    }
    std::vector<CsvRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<std::string, 4> f;
        std::size_t start = 0;
        for (int k = 0; k < 4; ++k) {
            const std::size_t comma = line.find(',', start);
            if ((k < 3) == (comma == std::string::npos)) {
                throw Error(ErrorCode::invalid_input, "CSV line " + std::to_string(lineno) + ": expected 4 fields");
            }
            f[k] = line.substr(start, k < 3 ? comma - start : std::string::npos);
            start = comma + 1;
        }
        rows.push_back({detail::parse_number(f[0], lineno), detail::parse_number(f[1], lineno),
                        Complex(detail::parse_number(f[2], lineno), detail::parse_number(f[3], lineno))});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string axis_json(const Axis& a) {
    return "{\"min\": " + format_double(a.min) + ", \"max\": " + format_double(a.max) +
           ", \"count\": " + std::to_string(a.count) + "}";
}

}  // namespace detail

inline std::string to_json(const DistributionGrid& g, bool include_timestamp = true) {
    const auto& m = g.metadata();
    std::string out = "{\"metadata\": {\"state\": " + detail::json_string(m.state) +
                      ", \"route\": " + detail::json_string(m.route) + ", \"dim\": " + std::to_string(m.dim);
    if (m.calibration) {
        out += ", \"calibration\": [" + detail::format_double(m.calibration->real()) + ", " +
               detail::format_double(m.calibration->imag()) + "]";
    }
    if (include_timestamp && m.timestamp) out += ", \"timestamp\": " + detail::json_string(*m.timestamp);
    out += "}, \"q_axis\": " + detail::axis_json(g.q_axis()) + ", \"p_axis\": " + detail::axis_json(g.p_axis()) +
           ", \"values\": [";
    bool first = true;
    for (int iq = 0; iq < g.q_axis().count; ++iq) {
        for (int ip = 0; ip < g.p_axis().count; ++ip) {
            out += first ? "[" : ", [";
            first = false;
            out += detail::format_double(g(iq, ip).real()) + ", " + detail::format_double(g(iq, ip).imag()) + "]";
        }
    }
    out += "]}\n";
    return out;
}

inline DistributionGrid grid_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        auto axis = [](const nlohmann::json& a) {
            return Axis{a.at("min").get<double>(), a.at("max").get<double>(), a.at("count").get<int>()};
        };
        GridSpec spec{axis(j.at("q_axis")), axis(j.at("p_axis"))};
        spec.validate();
        const auto& vals = j.at("values");
        if (!vals.is_array() || vals.size() != static_cast<std::size_t>(spec.q.count) * spec.p.count) {
            throw Error(ErrorCode::invalid_input, "grid JSON: value count does not match axes");
        }
        Matrix values(spec.q.count, spec.p.count);
        std::size_t k = 0;
        for (int iq = 0; iq < spec.q.count; ++iq) {
            for (int ip = 0; ip < spec.p.count; ++ip, ++k) {
                values(iq, ip) = Complex(vals[k].at(0).get<double>(), vals[k].at(1).get<double>());
            }
        }
        const auto& md = j.at("metadata");
        GridMetadata meta;
        meta.state = md.at("state").get<std::string>();
        meta.route = md.at("route").get<std::string>();
        meta.dim = md.at("dim").get<int>();
        if (md.contains("calibration")) {
            meta.calibration = Complex(md["calibration"].at(0).get<double>(), md["calibration"].at(1).get<double>());
        }
        if (md.contains("timestamp")) meta.timestamp = md["timestamp"].get<std::string>();
        return DistributionGrid(spec, std::move(values), std::move(meta));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_input, std::string("grid JSON: ") + e.what());
    }
}

}  // namespace qphase
