// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file error.hpp
 * @brief Error kinds raised by the qphase library.
 *
 * Every failure is reported as a qphase::Error carrying an ErrorCode, so
 * callers (notably the CLI) can map failures onto exit codes without
 * parsing messages.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qphase {

enum class ErrorCode {
    invalid_dimension,
    invalid_input,
    invalid_spec,
    truncation,
    range,
    quadrature_failure,
    convergence_failure,
    divergence_suspected,
    domain,
    uncalibrated_route,
    calibration_failure,
    positivity_violation,
    parse,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_dimension: return "invalid-dimension";
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::invalid_spec: return "invalid-spec";
        case ErrorCode::truncation: return "truncation";
        case ErrorCode::range: return "range";
        case ErrorCode::quadrature_failure: return "quadrature-failure";
        case ErrorCode::convergence_failure: return "convergence-failure";
        case ErrorCode::divergence_suspected: return "divergence-suspected";
        case ErrorCode::domain: return "domain";
        case ErrorCode::uncalibrated_route: return "uncalibrated-route";
        case ErrorCode::calibration_failure: return "calibration-failure";
        case ErrorCode::positivity_violation: return "positivity-violation";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class ParseErrorKind {
    syntax,
    unknown_kind,
    arity,
    malformed_number,
    out_of_range,
};

constexpr std::string_view to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
        case ParseErrorKind::syntax: return "syntax";
        case ParseErrorKind::unknown_kind: return "unknown-kind";
        case ParseErrorKind::arity: return "arity-mismatch";
        case ParseErrorKind::malformed_number: return "malformed-number";
        case ParseErrorKind::out_of_range: return "out-of-range";
    }
    return "unknown";
}

/// Parse failure with the character offset where the input stopped making sense.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& message)
        : Error(ErrorCode::parse, std::string(to_string(kind)) + " at position " + std::to_string(position) + ": " +
                                      message),
          kind_(kind),
          position_(position) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t position() const noexcept { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

}  // namespace qphase
