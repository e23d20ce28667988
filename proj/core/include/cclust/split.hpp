#pragma once

#include <cstdint>
#include <vector>

#include "cclust/types.hpp"

namespace cclust {

/// Disjoint fit/project row-index sets; fitting never reads project rows.
struct SplitPlan {
  std::vector<std::size_t> fit_indices;
  std::vector<std::size_t> project_indices;
  std::uint64_t seed = 0;
};

/// Random split with |fit| = round(fraction * n), deterministic given seed.
/// Both index sets come back sorted ascending.
SplitPlan make_split(std::size_t n, double fraction, std::uint64_t seed);

}  // namespace cclust
