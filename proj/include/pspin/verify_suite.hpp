#pragma once

#include "pspin/stats.hpp"

#include <cstdint>
#include <vector>

namespace pspin {

/// Runs the invariant checks of every module at reduced scale. Checks of
/// stated constants that do not hold numerically are reported with
/// status `advisory` instead of `fail`.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed, std::size_t threads = 1);

/// True when no result has status `fail`.
bool suite_passed(const std::vector<CheckResult>& results);

} // namespace pspin
