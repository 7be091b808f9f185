// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wpt {

/// Numerical solver did not produce a usable point (infeasible start,
/// iteration cap, line-search breakdown).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time-domain simulation failed: Newton breakdown or no steady state.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wpt
