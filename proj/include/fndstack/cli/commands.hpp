// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fndstack/cli/config.hpp"

namespace fndstack::cli {

/// Runs one command line (without the program name) and returns the exit
/// code. Reports go to `out`; the resolved config and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

}  // namespace fndstack::cli
