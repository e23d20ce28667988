#include "cclust/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cclust/rng.hpp"

namespace cclust {

SplitPlan make_split(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw validation_error("split fraction must lie in (0,1)");
  }
  if (n < 2) throw validation_error("cannot split fewer than 2 rows");
  std::size_t n_fit = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_fit == 0) n_fit = 1;
  if (n_fit == n) n_fit = n - 1;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  // Fisher-Yates with the portable generator so plans never drift across platforms.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  SplitPlan plan;
  plan.seed = seed;
  plan.fit_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_fit));
  plan.project_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_fit), perm.end());
  std::sort(plan.fit_indices.begin(), plan.fit_indices.end());
  std::sort(plan.project_indices.begin(), plan.project_indices.end());
  return plan;
}

}  // namespace cclust
