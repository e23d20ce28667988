#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cclust/types.hpp"

namespace cclust {

// Robust-hierarchy error sweep: Voronoi data with nu background noise,
// entry-wise N(0, n^-beta) perturbation, robust clustering at each alpha,
// classification error against the generating labels. Replications are
// paired: the dataset seed depends on (rep, nu) only and the perturbation
// seed is shared across beta, so beta comparisons see the same draws scaled.
struct Fig2abConfig {
  std::vector<double> alphas{0.0, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> nus{0.01, 0.05};
  std::vector<double> betas{0.5, 2.0};
  std::size_t n = 2500;
  std::size_t reps = 20;
  std::size_t subsample_n = 250;
  std::size_t target_k = 10;
  std::uint64_t seed = 1;
};

struct Fig2abRow {
  double alpha = 0.0;
  double nu = 0.0;
  double beta = 0.0;
  double mean_error = 0.0;
  double sd_error = 0.0;
};

std::vector<Fig2abRow> run_fig2ab(const Fig2abConfig& config);

// Level-set recovery sweep: three-Gaussian data, perturbed points vs truth,
// level-set clustering at each t on both sides, Hausdorff distance between
// the retained sets. Reps where exactly one side retains nothing are
// skipped and counted.
struct Fig2cdConfig {
  std::vector<double> ts{0.05, 0.1};
  double h = 0.01;
  std::vector<std::size_t> n_grid{300, 1000, 3000};
  std::vector<double> betas{1.0, 2.0};
  std::size_t reps = 100;
  std::uint64_t seed = 1;
};

struct Fig2cdRow {
  double t = 0.0;
  std::size_t n = 0;
  double beta = 0.0;
  double mean_distance = 0.0;
  double sd_distance = 0.0;
  std::size_t reps_used = 0;
  std::size_t skipped = 0;
};

std::vector<Fig2cdRow> run_fig2cd(const Fig2cdConfig& config);

// Plot-ready CSV emitters; reruns with the same rows are byte-identical.
void write_fig2ab_csv(const std::string& path, const std::vector<Fig2abRow>& rows);
void write_fig2cd_csv(const std::string& path, const std::vector<Fig2cdRow>& rows);

// Spearman rank correlation with average ranks on ties. Returns 0 when
// either sequence is constant (no trend to speak of).
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cclust
