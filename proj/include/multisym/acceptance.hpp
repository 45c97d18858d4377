#pragma once

#include <iosfwd>

#include "multisym/report.hpp"

namespace multisym::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool values_pass = false;
  bool runtime_pass = false;
  double elapsed_seconds = 0.0;
  double budget_seconds = 0.0;
  nlohmann::json details;

  bool pass() const { return values_pass && runtime_pass; }
};

inline constexpr uint64_t kDefaultSeed = 0x6d736d31ull;
inline constexpr int kCriterionCount = 11;

/// Run one numbered criterion (1-based). `quick` shrinks grids and sample
/// counts without touching any tolerance.
CriterionResult run_criterion(int id, bool quick, uint64_t seed = kDefaultSeed);

std::vector<CriterionResult> run_all(bool quick, uint64_t seed = kDefaultSeed);

/// One line per criterion: "PASS  3 hamilton-flow-convergence  (2.41 s)".
void print_results(const std::vector<CriterionResult>& results, std::ostream& os);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace multisym::acceptance
