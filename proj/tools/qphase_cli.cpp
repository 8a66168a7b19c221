// Copyright 2026 The qphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "qphase/cli.hpp"

int main(int argc, char** argv) { return qphase::cli::main(argc, argv); }
