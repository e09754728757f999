#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qgeo {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  std::uint64_t seed = 20240915;
  /// Directory with the shipped scenario files (constraint/conservation runs).
  std::string scenario_dir;
  /// Run only this criterion id (0 = all).
  int only = 0;
};

/// Runs the full validation suite: canonicity, round trip, Casimir anchors,
/// entropy/purity anchors, Finsler route equivalence, fundamental tensor,
/// classical-limit dynamics, free-particle moments, constraint drift,
/// dispersion anchor, case-2 exclusion.
std::vector<CriterionResult> run_validation(const ValidateOptions& opt);

/// Locates the scenarios directory (explicit argument, QGEO_SCENARIO_DIR,
/// ./scenarios, or the build-time source path).
std::string default_scenario_dir();

}  // namespace qgeo
