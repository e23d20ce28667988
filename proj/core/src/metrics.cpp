#include "cclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cclust/robust.hpp"

namespace cclust {

LinkageGap prop1_gap(const PointSet& s1, const PointSet& s2, const PointSet& s1_hat,
                     const PointSet& s2_hat, LinkageKind kind) {
  if (s1.size() != s1_hat.size() || s2.size() != s2_hat.size()) {
    throw validation_error("estimated sets must match the exact sets row for row");
  }
  if (s1.empty() || s2.empty()) throw validation_error("linkage gap needs nonempty sets");
  const std::size_t q = s1.front().size();
  auto check = [&](const PointSet& s) {
    for (const auto& p : s) {
      if (p.size() != q) throw validation_error("points must share one dimension");
    }
  };
  check(s1);
  check(s2);
  check(s1_hat);
  check(s2_hat);

  LinkageGap out;
  out.exact = linkage_distance(s1, s2, kind);
  out.estimated = linkage_distance(s1_hat, s2_hat, kind);
  out.gap = std::abs(out.exact - out.estimated);
  double bound = 0.0;
  for (std::size_t a = 0; a < q; ++a) {
    double gamma = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
      gamma = std::max(gamma, std::abs(s1_hat[i][a] - s1[i][a]));
    }
    for (std::size_t i = 0; i < s2.size(); ++i) {
      gamma = std::max(gamma, std::abs(s2_hat[i][a] - s2[i][a]));
    }
    bound += gamma;
  }
  out.bound = 2.0 * bound;
  return out;
}

double levelset_hausdorff(const LevelSetClustering& est, const LevelSetClustering& ref,
                          const CounterfactualMatrix& points_hat,
                          const CounterfactualMatrix& points_true, bool use_truth_est,
                          bool use_truth_ref) {
  const bool est_empty = est.retained.empty();
  const bool ref_empty = ref.retained.empty();
  if (est_empty && ref_empty) return 0.0;
  if (est_empty || ref_empty) return std::numeric_limits<double>::infinity();
  return hausdorff_rows(points_hat, est.retained, use_truth_est, points_true, ref.retained,
                        use_truth_ref);
}

double classification_error(const ClusterLabeling& predicted, const ClusterLabeling& truth) {
  return pruning_error(predicted, truth);
}

}  // namespace cclust
