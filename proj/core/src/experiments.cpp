#include "cclust/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cclust/csv.hpp"
#include "cclust/density.hpp"
#include "cclust/kernel.hpp"
#include "cclust/metrics.hpp"
#include "cclust/parallel.hpp"
#include "cclust/rng.hpp"
#include "cclust/robust.hpp"
#include "cclust/simulate.hpp"

namespace cclust {

namespace {

// Sub-stream ids: one block per (rep, grid slot), a few purposes inside.
std::uint64_t stream_id(std::size_t rep, std::size_t slot, std::size_t purpose) {
  return (static_cast<std::uint64_t>(rep) * 64 + slot) * 4 + purpose;
}

void mean_sd(const double* vals, std::size_t count, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (count == 0) return;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += vals[i];
  mean = sum / static_cast<double>(count);
  if (count < 2) return;
  double ss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double d = vals[i] - mean;
    ss += d * d;
  }
  sd = std::sqrt(ss / static_cast<double>(count - 1));
}

}  // namespace

std::vector<Fig2abRow> run_fig2ab(const Fig2abConfig& config) {
  if (config.reps < 1) throw validation_error("reps must be >= 1");
  if (config.alphas.empty() || config.nus.empty() || config.betas.empty()) {
    throw validation_error("empty grid");
  }
  if (config.nus.size() > 64) throw validation_error("nu grid too large");
  for (double a : config.alphas) {
    if (a < 0.0 || a >= 1.0) throw validation_error("alpha outside [0,1)");
  }
  for (double nu : config.nus) {
    if (nu < 0.0 || nu >= 1.0) throw validation_error("nu outside [0,1)");
  }

  const std::size_t n_nu = config.nus.size();
  const std::size_t n_beta = config.betas.size();
  const std::size_t n_alpha = config.alphas.size();
  const std::size_t n_rows = n_nu * n_beta * n_alpha;
  auto row_index = [&](std::size_t inu, std::size_t ib, std::size_t ia) {
    return (inu * n_beta + ib) * n_alpha + ia;
  };

  std::vector<double> errors(n_rows * config.reps, 0.0);
  parallel_for(0, config.reps * n_nu, [&](std::size_t task) {
    const std::size_t rep = task / n_nu;
    const std::size_t inu = task % n_nu;
    SimConfig sim;
    sim.n = config.n;
    sim.nu = config.nus[inu];
    sim.seed = derive_seed(config.seed, stream_id(rep, inu, 0));
    auto [data, truth] = gen_voronoi(sim);
    const std::uint64_t perturb_seed = derive_seed(config.seed, stream_id(rep, inu, 1));
    const std::uint64_t cluster_seed = derive_seed(config.seed, stream_id(rep, inu, 2));
    for (std::size_t ib = 0; ib < n_beta; ++ib) {
      CounterfactualMatrix noisy = perturb(data, config.betas[ib], perturb_seed);
      for (std::size_t ia = 0; ia < n_alpha; ++ia) {
        GoodNeighborhoodParams params;
        params.alpha = config.alphas[ia];
        params.nu = config.nus[inu];
        params.subsample_n = config.subsample_n;
        auto [hier, labels] = robust_cluster(noisy, params, config.target_k, cluster_seed);
        errors[row_index(inu, ib, ia) * config.reps + rep] = pruning_error(labels, truth);
      }
    }
  });

  std::vector<Fig2abRow> rows;
  rows.reserve(n_rows);
  for (std::size_t inu = 0; inu < n_nu; ++inu) {
    for (std::size_t ib = 0; ib < n_beta; ++ib) {
      for (std::size_t ia = 0; ia < n_alpha; ++ia) {
        Fig2abRow row;
        row.alpha = config.alphas[ia];
        row.nu = config.nus[inu];
        row.beta = config.betas[ib];
        mean_sd(errors.data() + row_index(inu, ib, ia) * config.reps, config.reps,
                row.mean_error, row.sd_error);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<Fig2cdRow> run_fig2cd(const Fig2cdConfig& config) {
  if (config.reps < 1) throw validation_error("reps must be >= 1");
  if (config.ts.empty() || config.n_grid.empty() || config.betas.empty()) {
    throw validation_error("empty grid");
  }
  for (std::size_t i = 1; i < config.ts.size(); ++i) {
    if (!(config.ts[i - 1] < config.ts[i])) throw validation_error("t grid must increase");
  }
  if (!(config.h > 0.0)) throw validation_error("h must be positive");
  if (config.n_grid.size() > 64) throw validation_error("n grid too large");

  const std::size_t n_t = config.ts.size();
  const std::size_t n_n = config.n_grid.size();
  const std::size_t n_beta = config.betas.size();
  const KernelSpec kernel = make_triangular_kernel(2);

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n_t * n_n * n_beta * config.reps, 0.0);
  auto cell = [&](std::size_t it, std::size_t in, std::size_t ib, std::size_t rep) {
    return ((it * n_n + in) * n_beta + ib) * config.reps + rep;
  };

  parallel_for(0, config.reps * n_n * n_beta, [&](std::size_t task) {
    const std::size_t rep = task / (n_n * n_beta);
    const std::size_t rem = task % (n_n * n_beta);
    const std::size_t in = rem / n_beta;
    const std::size_t ib = rem % n_beta;
    SimConfig sim;
    sim.variant = SimVariant::gauss3;
    sim.n = config.n_grid[in];
    sim.seed = derive_seed(config.seed, stream_id(rep, in, 0));
    auto [data, truth_labels] = gen_gauss3(sim);
    CounterfactualMatrix noisy =
        perturb(data, config.betas[ib], derive_seed(config.seed, stream_id(rep, in, 1)));
    std::vector<LevelSetClustering> est = level_sweep(noisy, config.h, kernel, config.ts, false);
    std::vector<LevelSetClustering> ref = level_sweep(noisy, config.h, kernel, config.ts, true);
    for (std::size_t it = 0; it < n_t; ++it) {
      dist[cell(it, in, ib, rep)] =
          levelset_hausdorff(est[it], ref[it], noisy, noisy, false, true);
    }
  });

  std::vector<Fig2cdRow> rows;
  rows.reserve(n_t * n_beta * n_n);
  std::vector<double> used;
  for (std::size_t it = 0; it < n_t; ++it) {
    for (std::size_t ib = 0; ib < n_beta; ++ib) {
      for (std::size_t in = 0; in < n_n; ++in) {
        Fig2cdRow row;
        row.t = config.ts[it];
        row.n = config.n_grid[in];
        row.beta = config.betas[ib];
        used.clear();
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
          double d = dist[cell(it, in, ib, rep)];
          if (d == kInf) continue;
          used.push_back(d);
        }
        row.reps_used = used.size();
        row.skipped = config.reps - used.size();
        mean_sd(used.data(), used.size(), row.mean_distance, row.sd_distance);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_fig2ab_csv(const std::string& path, const std::vector<Fig2abRow>& rows) {
  std::string out = "alpha,nu,beta,mean_error,sd_error\n";
  for (const auto& r : rows) {
    out += format_double(r.alpha);
    out += ',';
    out += format_double(r.nu);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.mean_error);
    out += ',';
    out += format_double(r.sd_error);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_fig2cd_csv(const std::string& path, const std::vector<Fig2cdRow>& rows) {
  std::string out = "t,n,beta,mean_hausdorff,sd_hausdorff,reps_used,skipped\n";
  for (const auto& r : rows) {
    out += format_double(r.t);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.mean_distance);
    out += ',';
    out += format_double(r.sd_distance);
    out += ',';
    out += std::to_string(r.reps_used);
    out += ',';
    out += std::to_string(r.skipped);
    out += '\n';
  }
  write_text_file(path, out);
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw validation_error("sequences differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw validation_error("need at least two observations");
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (v[a] != v[b]) return v[a] < v[b];
      return a < b;
    });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  std::vector<double> rx = ranks(x), ry = ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cclust
