// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief `qphase compute` and `qphase verify`.
 *
 * Exit codes: 0 success, 1 a verification row failed, 2 command-line
 * misuse, 3 numeric or infrastructure failure.
 */

#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qphase/calibration.hpp"
#include "qphase/cohen.hpp"
#include "qphase/distributions.hpp"
#include "qphase/grid.hpp"
#include "qphase/prep.hpp"
#include "qphase/state_spec.hpp"
#include "qphase/verify.hpp"

namespace qphase::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitMisuse = 2;
inline constexpr int kExitNumeric = 3;

/// Routes per distribution; the first entry is the default.
inline const std::map<std::string, std::vector<std::string>>& route_table() {
    static const std::map<std::string, std::vector<std::string>> t = {
        {"wigner", {"parity", "parity-raw", "integral", "charfn"}},
        {"kr", {"direct", "charfn", "vacuum", "p"}},
        {"q", {"coherent"}},
        {"charfn", {"trace"}},
        {"cohen", {"unity", "dirac-pair"}},
    };
    return t;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// "qmin,qmax,nq,pmin,pmax,np".
inline GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 6) throw Error(ErrorCode::invalid_input, "--grid expects qmin,qmax,nq,pmin,pmax,np");
    auto real = [](const std::string& s) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    };
    auto count = [](const std::string& s) {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    };
    GridSpec g;
    try {
        g = {{real(parts[0]), real(parts[1]), count(parts[2])}, {real(parts[3]), real(parts[4]), count(parts[5])}};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::invalid_input, "--grid: malformed number in '" + text + "'");
    }
    g.validate();
    return g;
}

struct ComputeArgs {
    std::string state;
    std::string dist;
    std::string route;
    int dim = kDefaultDim;
    std::string grid = "-6,6,121,-6,6,121";
    std::string out = "-";
    std::string format = "csv";
    bool no_timestamp = false;
};

/// Evaluates the requested distribution; throws qphase::Error on numeric failure.
inline DistributionGrid compute(const ComputeArgs& a, const StateSpec& spec, const GridSpec& grid) {
    const std::string route_name = a.dist + "." + a.route;
    GridMetadata meta;
    meta.state = to_string(spec);
    meta.dim = a.dim;
    Matrix values;
    CalibrationCache cache;

    if (route_name == "kr.p") {
        const auto p = p_for_state(spec);
        const Calibration c = calibrate("kr.p", state::Fock{0}, cache, a.dim);
        meta.calibration = c.constant;
        values = sample_grid(grid, [&](const PhasePoint& pt) { return prep::kr_from_p(p, pt, cache); });
    } else {
        const DensityOperator rho = make_state(spec, a.dim);
        if (route_name == "wigner.parity") {
            values = sample_grid(grid, [&](const PhasePoint& pt) { return wigner_parity(rho, pt, true); });
        } else if (route_name == "wigner.parity-raw") {
            values = sample_grid(grid, [&](const PhasePoint& pt) { return wigner_parity(rho, pt, false); });
        } else if (route_name == "wigner.integral") {
            const PositionRepresentation pos(rho);
            values = sample_grid(grid, [&](const PhasePoint& pt) { return wigner_integral(pos, pt); });
        } else if (route_name == "wigner.charfn") {
            meta.calibration = calibrate("wigner.charfn", state::Fock{0}, cache, a.dim).constant;
            values = wigner_from_charfn(rho, grid, cache).values();
        } else if (route_name == "kr.direct") {
            values = sample_grid(grid, [&](const PhasePoint& pt) { return kr_direct(rho, pt); });
        } else if (route_name == "kr.charfn") {
            meta.calibration = calibrate("kr.charfn", state::Fock{0}, cache, a.dim).constant;
            values = *meta.calibration * CharFnLattice(rho).kr_raw(grid);
        } else if (route_name == "kr.vacuum") {
            meta.calibration = calibrate("kr.vacuum", state::Fock{0}, cache, a.dim).constant;
            const VacuumFormEvaluator ev(rho);
            values = *meta.calibration * sample_grid(grid, [&](const PhasePoint& pt) { return ev.raw(pt); });
        } else if (route_name == "q.coherent") {
            values = sample_grid(grid, [&](const PhasePoint& pt) { return q_function(rho, pt.beta()); });
        } else if (route_name == "charfn.trace") {
            values = sample_grid(grid, [&](const PhasePoint& pt) { return char_fn(rho, pt.beta()); });
        } else if (route_name == "cohen.unity") {
            values = cohen(rho, CohenKernel::unity(), grid).values();
        } else if (route_name == "cohen.dirac-pair") {
            values = cohen(rho, CohenKernel::dirac_pair(), grid).values();
        } else {
            throw Error(ErrorCode::invalid_input, "unhandled route " + route_name);
        }
    }
    meta.route = route_name == "wigner.parity-raw" ? "wigner.parity-raw" : route_name;
    if (!a.no_timestamp) meta.timestamp = utc_timestamp();
    return DistributionGrid(grid, std::move(values), std::move(meta));
}

namespace detail {

inline bool write_output(const std::string& path, const std::string& text, std::ostream& out, std::ostream& err) {
    if (path == "-") {
        out << text;
        return true;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        err << "error: cannot write " << path << "\n";
        return false;
    }
    return true;
}

inline std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

}  // namespace detail

inline int run_compute(const ComputeArgs& a, std::ostream& out, std::ostream& err) {
    const auto& table = route_table();
    const auto it = table.find(a.dist);
    if (it == table.end()) {
        err << "error: unknown --dist '" << a.dist << "'; valid: wigner, kr, q, charfn, cohen\n";
        return kExitMisuse;
    }
    ComputeArgs args = a;
    if (args.route.empty()) args.route = it->second.front();
    if (std::find(it->second.begin(), it->second.end(), args.route) == it->second.end()) {
        err << "error: unknown route '" << args.route << "' for --dist " << a.dist
            << "; valid routes: " << detail::join(it->second) << "\n";
        return kExitMisuse;
    }
    if (args.format != "csv" && args.format != "json") {
        err << "error: --format must be csv or json\n";
        return kExitMisuse;
    }
    StateSpec spec;
    GridSpec grid;
    try {
        spec = parse_state_spec(args.state);
        grid = parse_grid(args.grid);
        if (args.dim < 2) throw Error(ErrorCode::invalid_dimension, "--dim must be >= 2");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitMisuse;
    }
    try {
        const DistributionGrid g = compute(args, spec, grid);
        const std::string text = args.format == "csv" ? to_csv(g) : to_json(g, !args.no_timestamp);
        return detail::write_output(args.out, text, out, err) ? kExitOk : kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

struct VerifyArgs {
    int dim = kDefaultDim;
    double tol = 1e-6;
    std::string states;
    std::string json_out;
    bool no_timestamp = false;
};

inline int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    verify::Options opts;
    opts.dim = a.dim;
    opts.tol = a.tol;
    opts.timestamp = !a.no_timestamp;
    if (!a.states.empty()) opts.states = split_state_list(a.states);
    if (!(a.tol > 0.0) || a.dim < 2) {
        err << "error: --tol must be positive and --dim >= 2\n";
        return kExitMisuse;
    }
    try {
        for (const auto& s : opts.states) parse_state_spec(s);
    } catch (const Error& e) {
        err << "error: --states: " << e.what() << "\n";
        return kExitMisuse;
    }
    try {
        verify::Report report = verify::run(opts);
        if (opts.timestamp) report.timestamp = utc_timestamp();
        out << verify::to_text(report);
        if (!a.json_out.empty() && !detail::write_output(a.json_out, verify::to_json(report), out, err)) {
            return kExitNumeric;
        }
        return report.pass() ? kExitOk : kExitVerifyFailed;
    } catch (const std::exception& e) {
        err << "error: verification could not run: " << e.what() << "\n";
        return kExitNumeric;
    }
}

/// Full command line entry point.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Phase-space quasiprobability distributions in a truncated Fock space"};
    app.require_subcommand(1);

    ComputeArgs c;
    auto* compute_cmd = app.add_subcommand("compute", "Evaluate a distribution on a grid");
    compute_cmd->add_option("--state", c.state, "State spec, e.g. fock:1, coherent:1+0.5i")->required();
    compute_cmd->add_option("--dist", c.dist, "wigner | kr | q | charfn | cohen")->required();
    compute_cmd->add_option("--route", c.route, "Evaluation route (defaults per distribution)");
    compute_cmd->add_option("--dim", c.dim, "Fock truncation")->capture_default_str();
    compute_cmd->add_option("--grid", c.grid, "qmin,qmax,nq,pmin,pmax,np")->capture_default_str();
    compute_cmd->add_option("--out", c.out, "Output path, - for stdout")->capture_default_str();
    compute_cmd->add_option("--format", c.format, "csv | json")->capture_default_str();
    compute_cmd->add_flag("--no-timestamp", c.no_timestamp, "Omit the JSON timestamp");

    VerifyArgs v;
    auto* verify_cmd = app.add_subcommand("verify", "Run the cross-route verification suite");
    verify_cmd->add_option("--dim", v.dim, "Fock truncation")->capture_default_str();
    verify_cmd->add_option("--tol", v.tol, "Tolerance for route-equivalence rows")->capture_default_str();
    verify_cmd->add_option("--states", v.states, "Comma-separated state specs");
    verify_cmd->add_option("--json", v.json_out, "Also write the report as JSON to this path");
    verify_cmd->add_flag("--no-timestamp", v.no_timestamp, "Omit the timestamp from the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitMisuse;
    }
    if (compute_cmd->parsed()) return run_compute(c, out, err);
    return run_verify(v, out, err);
}

}  // namespace qphase::cli
