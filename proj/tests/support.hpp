// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gtest/gtest.h>

#include <complex>
#include <string>

#include "qphase/error.hpp"

namespace qphase::testing {

/// Runs `f` and checks it throws qphase::Error with `code`.
template <class F>
::testing::AssertionResult throws_code(F&& f, ErrorCode code) {
    try {
        f();
    } catch (const Error& e) {
        if (e.code() == code) return ::testing::AssertionSuccess();
        return ::testing::AssertionFailure() << "threw " << to_string(e.code()) << ": " << e.what();
    }
    return ::testing::AssertionFailure() << "did not throw";
}

inline ::testing::AssertionResult near(std::complex<double> a, std::complex<double> b, double tol) {
    if (std::abs(a - b) <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a << " vs " << b << " (|diff| " << std::abs(a - b) << " > " << tol << ")";
}

}  // namespace qphase::testing
