#pragma once

#include <vector>

#include "cclust/split.hpp"
#include "cclust/types.hpp"

namespace cclust {

enum class RegressionMethod { knn, nadaraya_watson };

struct RegressionHyperparams {
  int k = 0;              // neighbor count (knn); 0 means the per-arm default
  double bandwidth = 0.0; // kernel bandwidth (nadaraya-watson); 0 means default
};

/// Per-arm outcome regression fitted on the arm's fit-split rows only.
/// Prediction is pure and never touches rows outside training_rows.
struct ArmRegressionModel {
  int arm = 0;
  RegressionMethod method = RegressionMethod::knn;
  int k = 0;
  double bandwidth = 0.0;
  std::vector<std::size_t> training_rows;  // indices into the original table
  std::vector<double> train_x;             // row-major copies, n_a * d
  std::vector<double> train_y;
  int d = 0;

  double predict(const double* query) const;
};

/// Fit one arm. knn: mean outcome of the k nearest covariate neighbors
/// (Euclidean, ties by lowest row index), default k = ceil(n_a^(2/3)).
/// nadaraya-watson: triangular-kernel weighted mean, default bandwidth =
/// the arm's median pairwise covariate distance; falls back to the nearest
/// neighbor when every weight vanishes.
ArmRegressionModel fit_arm(const ObservationTable& table, int arm, RegressionMethod method,
                           RegressionHyperparams hyper, const SplitPlan& split);

/// Project every project-split row into counterfactual mean vector space:
/// row i = (mu_1(X_i), ..., mu_q(X_i)), or per-arm contrasts vs arm 1.
/// Models must cover arms 1..q exactly.
CounterfactualMatrix project(const std::vector<ArmRegressionModel>& models,
                             const ObservationTable& table, const SplitPlan& split,
                             Parametrization parametrization);

struct ProjectionError {
  double mean_l2 = 0.0;                // (1/n) sum_i ||hat_mu_(i) - mu_(i)||_2
  std::vector<double> per_arm_l1;      // per column a: (1/n) sum_i |hat - true|
};

/// Requires matrix.truth.
ProjectionError empirical_projection_error(const CounterfactualMatrix& matrix);

}  // namespace cclust
