#pragma once

#include <vector>

#include "cclust/types.hpp"

namespace cclust {

/// Explicit point set for the standalone set-distance operations.
using PointSet = std::vector<std::vector<double>>;

/// Euclidean distance; the set distances and the Rips graph share this metric.
double point_distance(const std::vector<double>& x, const std::vector<double>& y);

/// Exact single (min), average (mean), or complete (max) linkage over all
/// cross pairs. Average sums pairwise distances with the outer loop over the
/// set whose first point index is listed first, so repeated evaluations are
/// bit-identical.
double linkage_distance(const PointSet& s1, const PointSet& s2, LinkageKind kind);

/// Agglomerative merge tree. Leaves are nodes 1..n_leaves; merge r creates
/// node n_leaves + 1 + r. Heights are non-decreasing for all three kinds.
struct Dendrogram {
  std::size_t n_leaves = 0;
  struct Merge {
    std::size_t left = 0;   // node id of the child containing the smaller min member
    std::size_t right = 0;
    double height = 0.0;
  };
  std::vector<Merge> merges;
};

/// Bottom-up agglomeration: repeatedly merge the pair of clusters at minimal
/// linkage distance. Ties break lexicographically on (smallest member index
/// of the first cluster, smallest member index of the second). Heights for
/// average linkage are recomputed from the pairwise-distance matrix in a
/// canonical member order, so the output matches a from-scratch
/// recomputation bit for bit.
Dendrogram agglomerate(const CounterfactualMatrix& points, LinkageKind kind);

/// Undo the last k-1 merges; components labeled 1..k by smallest member index.
ClusterLabeling cut(const Dendrogram& dendrogram, std::size_t k);

}  // namespace cclust
