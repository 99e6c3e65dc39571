// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace quickrest {

/// Full pipeline: acquire document, compile specs, run the checks, report.
/// Exit codes: 0 all pass, 1 at least one property failure, 2 configuration
/// or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace quickrest
