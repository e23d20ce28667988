#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cclust/types.hpp"

namespace cclust {

enum class SimVariant { voronoi10, gauss3 };

const char* to_string(SimVariant v);

struct SimConfig {
  std::size_t n = 2500;
  std::uint64_t seed = 1;
  SimVariant variant = SimVariant::voronoi10;
  double beta = 0.0;        // perturbation exponent, used by perturb()
  double nu = 0.0;          // background-noise fraction (voronoi only)
  double b_box = 1.0;       // coordinate bound recorded for boundedness checks
  double sigma_voronoi = 0.05;
  double min_center_sep = 0.5;  // 0 disables the separation requirement
  double sigma_gauss = 0.2;
};

// Ten uniform centers in [0,1]^3 (re-drawn until pairwise separation >=
// min_center_sep), then floor(n/10) points per center (remainder to the
// earliest centers) from an isotropic normal rejected until the draw lies in
// the center's own Voronoi cell intersected with [0,1]^3. Ties to two
// centers are re-drawn via the strict nearest-center test. A nu fraction of
// rows is then replaced by uniform-[0,1]^3 noise labeled 0. Truth columns
// hold the emitted coordinates.
std::pair<CounterfactualMatrix, ClusterLabeling> gen_voronoi(const SimConfig& config);

// Same draw; additionally writes the 10 x 3 accepted centers (row-major)
// when centers_out is non-null.
std::pair<CounterfactualMatrix, ClusterLabeling> gen_voronoi(const SimConfig& config,
                                                             std::vector<double>* centers_out);

// Mixture of three isotropic Gaussians in R^2 with means (0,0), (1.5,0),
// (0.75,1.3) and per-coordinate sd sigma_gauss; floor(n/3) points per
// component, remainder to the earliest.
std::pair<CounterfactualMatrix, ClusterLabeling> gen_gauss3(const SimConfig& config);

// Adds i.i.d. N(0, n^-beta) noise to every entry, storing the noisy values
// as points and the input points as truth. beta >= 50 is the exact-copy
// cutoff. variance_override > 0 replaces n^-beta.
CounterfactualMatrix perturb(const CounterfactualMatrix& matrix, double beta,
                             std::uint64_t seed, double variance_override = 0.0);

// Wraps a matrix with truth into an observation table: arms assigned round
// robin a_i = 1 + (i mod q), covariates X = the truth row, outcome
// Y = truth[a_i - 1] + noise_sd * N(0,1). Gives the fitting pipeline a
// table whose counterfactual means are exactly the truth columns.
ObservationTable make_observation_table(const CounterfactualMatrix& matrix, double noise_sd,
                                        std::uint64_t seed);

}  // namespace cclust
