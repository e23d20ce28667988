#pragma once

#include <cstddef>
#include <vector>

#include "cclust/density.hpp"
#include "cclust/linkage.hpp"
#include "cclust/types.hpp"

namespace cclust {

// Observed linkage-distance gap between a pair of point sets and its
// estimated counterparts, together with the coordinate-wise error budget
// 2 * sum_a gamma_a the gap must respect. gamma_a is the largest absolute
// error in coordinate a across the rows of both sets.
struct LinkageGap {
  double exact = 0.0;      // D(S1, S2) on the reference points
  double estimated = 0.0;  // D(S1_hat, S2_hat) on the perturbed points
  double gap = 0.0;        // |exact - estimated|
  double bound = 0.0;      // 2 * sum_a gamma_a
};

LinkageGap prop1_gap(const PointSet& s1, const PointSet& s2, const PointSet& s1_hat,
                     const PointSet& s2_hat, LinkageKind kind);

// Hausdorff distance between the retained points of two level-set
// clusterings. The estimate side reads rows of `points_hat`, the reference
// side rows of `points_true`; the flags switch either side to the truth
// columns of its matrix. Both sides empty -> 0; exactly one empty ->
// +infinity (callers report that as disjoint and usually skip the rep).
double levelset_hausdorff(const LevelSetClustering& est, const LevelSetClustering& ref,
                          const CounterfactualMatrix& points_hat,
                          const CounterfactualMatrix& points_true, bool use_truth_est = false,
                          bool use_truth_ref = false);

// Fraction of points whose labels disagree after the best bijective
// relabeling; alias of pruning_error kept next to the other measures.
double classification_error(const ClusterLabeling& predicted, const ClusterLabeling& truth);

}  // namespace cclust
