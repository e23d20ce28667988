#pragma once

#include <cstdint>
#include <vector>

#include "cclust/linkage.hpp"
#include "cclust/types.hpp"

namespace cclust {

/// Knobs for the inductive robust hierarchy. alpha bounds the fraction of
/// out-of-cluster points among a point's relevant neighbors, nu the fraction
/// of adversarial/noise points; both are user-facing assumptions, never
/// estimated. t_override pins the neighborhood size directly (0 = derive it
/// from alpha and nu).
struct GoodNeighborhoodParams {
  double alpha = 0.0;
  double nu = 0.0;
  double delta = 0.05;
  std::size_t subsample_n = 250;
  std::size_t t_override = 0;
};

/// Robust hierarchy over a subsample plus the implicit extension rule.
/// merges/heights describe the merge tree over subsample positions
/// (node ids as in Dendrogram, n0 leaves). Heights are median-linkage values
/// and may invert; pruning is by merge order, not height.
struct Hierarchy {
  std::vector<std::size_t> subsample;  // sorted original row indices
  Dendrogram merges;                   // tree over subsample positions
  std::vector<int> subsample_labels;   // pruned labels 1..k per subsample position
  std::size_t t = 0;                   // neighborhood size actually used
  std::size_t m = 0;                   // extension vote count (= t)
  bool degenerate = false;             // all subsample points identical
};

/// Inductive robust clustering:
///  1. draw a uniform subsample of size params.subsample_n;
///  2. replace each subsample point by the coordinate-wise median of its
///     t nearest subsample neighbors (self included),
///     t = ceil((alpha + nu) * subsample_n) + 1, capped at subsample_n;
///  3. agglomerate the smoothed points under median linkage (the cluster
///     distance is the median of pairwise smoothed distances) and prune the
///     tree to target_k clusters;
///  4. label every remaining point by majority vote over its m = t nearest
///     subsample neighbors, ties toward the smaller label.
/// Pure given the seed.
std::pair<Hierarchy, ClusterLabeling> robust_cluster(const CounterfactualMatrix& points,
                                                     const GoodNeighborhoodParams& params,
                                                     std::size_t target_k, std::uint64_t seed);

/// Minimum mismatch fraction over all bijective matchings of predicted to
/// true labels (Hungarian assignment on the confusion matrix). Label 0
/// participates as an ordinary class on both sides.
double pruning_error(const ClusterLabeling& labeling, const ClusterLabeling& truth);

/// Maximum-total assignment over a square score matrix (row r -> column
/// assignment[r]); exposed for direct testing against brute force.
std::vector<std::size_t> max_assignment(const std::vector<double>& score, std::size_t k);

}  // namespace cclust
