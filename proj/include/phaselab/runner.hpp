#pragma once

#include <iosfwd>

#include "phaselab/config.hpp"

namespace phaselab {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitNotCyclic = 3;
inline constexpr int kExitNumerical = 4;

/// Executes the full pipeline and writes the report JSON and series CSV.
/// Returns the CLI exit code; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

/// One pipeline evaluation per parameter value; failing points are recorded
/// in-row and the sweep continues.
int sweep(const SweepConfig& config, std::ostream& err);

} // namespace phaselab
