// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

/// @file qphase.hpp
/// @brief Umbrella header for the library (the CLI layer is in cli.hpp).

#pragma once

#include "qphase/calibration.hpp"
#include "qphase/cohen.hpp"
#include "qphase/distributions.hpp"
#include "qphase/error.hpp"
#include "qphase/fockspace.hpp"
#include "qphase/grid.hpp"
#include "qphase/oracle.hpp"
#include "qphase/prep.hpp"
#include "qphase/specialfn.hpp"
#include "qphase/state_spec.hpp"
#include "qphase/verify.hpp"
