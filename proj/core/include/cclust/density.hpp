#pragma once

#include <vector>

#include "cclust/kernel.hpp"
#include "cclust/linkage.hpp"
#include "cclust/types.hpp"

namespace cclust {

/// Plug-in KDE at one query: (1/(n h^q)) sum_i K((x_i - w)/h). Evaluating on
/// truth columns gives the oracle estimator. Contributions are added in
/// ascending point index; only strictly positive kernel values are added, so
/// the bucket accelerator reproduces the same doubles.
double kde(const CounterfactualMatrix& points, double h, const KernelSpec& kernel,
           const std::vector<double>& query, bool use_truth = false);

/// KDE at many queries (row-major, n_query x q), parallel over queries.
std::vector<double> kde_many(const CounterfactualMatrix& points, double h,
                             const KernelSpec& kernel, const std::vector<double>& queries,
                             std::size_t n_query, bool use_truth = false);

/// KDE of the sample at each sample point, via a grid-bucket accelerator
/// with bucket width h. Identical output to calling kde per point.
std::vector<double> kde_at_points(const CounterfactualMatrix& points, double h,
                                  const KernelSpec& kernel, bool use_truth = false);

/// Level-set clustering at one (h, t): points with density > t are retained,
/// connected components of the Rips graph (edges at distance <= h) become
/// clusters 1..k numbered by smallest member index, everything else is noise 0.
struct LevelSetClustering {
  double h = 0.0;
  double t = 0.0;
  std::vector<std::size_t> retained;  // ascending indices with density > t
  ClusterLabeling labels;             // length n, 0 for non-retained points
  std::vector<double> densities;      // length n, the p-hat values used
};

LevelSetClustering level_set_cluster(const CounterfactualMatrix& points, double h, double t,
                                     const KernelSpec& kernel, bool use_truth = false);

/// One clustering per level of a strictly increasing grid; densities are
/// computed once. Retained sets and components are nested across levels.
std::vector<LevelSetClustering> level_sweep(const CounterfactualMatrix& points, double h,
                                            const KernelSpec& kernel,
                                            const std::vector<double>& t_grid,
                                            bool use_truth = false);

/// Exact Hausdorff distance between finite nonempty point sets:
/// max of the two directed sup-inf distances over all pairs.
double hausdorff(const PointSet& a, const PointSet& b);

/// Hausdorff between selected rows of two matrices (points columns).
double hausdorff_rows(const CounterfactualMatrix& a, const std::vector<std::size_t>& rows_a,
                      bool truth_a, const CounterfactualMatrix& b,
                      const std::vector<std::size_t>& rows_b, bool truth_b);

/// Default bandwidth: n^(-1/(q+4)) scaled by the mean per-coordinate sample
/// standard deviation.
double default_bandwidth(const CounterfactualMatrix& points);

}  // namespace cclust
