#pragma once

#include <string>
#include <vector>

#include "cclust/types.hpp"

namespace cclust {

/// Outcome of validate_table. `ok` is true iff every table invariant holds;
/// `issues` lists one message per violation class with the first offending
/// row; `arm_counts[a-1]` is the number of rows in arm a.
struct ValidationReport {
  bool ok = false;
  std::vector<std::string> issues;
  std::vector<std::size_t> arm_counts;
};

/// Check table invariants: arms in {1..q} with every arm present, finite
/// outcomes and covariates, consistent covariate dimension.
ValidationReport validate_table(const ObservationTable& table);

/// validate_table, but throwing validation_error on the first failure.
void require_valid(const ObservationTable& table);

}  // namespace cclust
