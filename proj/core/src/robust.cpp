#include "cclust/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cclust/parallel.hpp"
#include "cclust/rng.hpp"

namespace cclust {

namespace {

// Median of the values at the given (row, col) cross pairs of rho.
// Even counts average the two middle order statistics.
double median_cross(const std::vector<double>& rho, std::size_t n0,
                    const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                    std::vector<double>& scratch) {
  scratch.clear();
  scratch.reserve(a.size() * b.size());
  for (std::size_t i : a) {
    const double* row = rho.data() + i * n0;
    for (std::size_t j : b) scratch.push_back(row[j]);
  }
  const std::size_t c = scratch.size();
  auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(c / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  if (c % 2 == 1) return *mid;
  double hi = *mid;
  double lo = *std::max_element(scratch.begin(), mid);
  return (lo + hi) / 2.0;
}

// Greedy median-linkage agglomeration over a fixed dissimilarity matrix.
// Same pair selection and tie-break rule as agglomerate().
Dendrogram median_agglomerate(const std::vector<double>& rho, std::size_t n0) {
  struct Cluster {
    std::vector<std::size_t> members;
    std::size_t node_id = 0;
  };
  std::vector<Cluster> clusters(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    clusters[i].members = {i};
    clusters[i].node_id = i + 1;
  }
  std::vector<std::size_t> alive(n0);
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<double> cd = rho;
  std::vector<double> scratch;

  struct Best {
    std::size_t partner = 0;
    double dist = 0.0;
    bool valid = false;
  };
  std::vector<Best> best(n0);
  auto pair_key_less = [&](double d1, std::size_t a1, std::size_t b1, double d2, std::size_t a2,
                           std::size_t b2) {
    std::size_t lo1 = std::min(clusters[a1].members.front(), clusters[b1].members.front());
    std::size_t hi1 = std::max(clusters[a1].members.front(), clusters[b1].members.front());
    std::size_t lo2 = std::min(clusters[a2].members.front(), clusters[b2].members.front());
    std::size_t hi2 = std::max(clusters[a2].members.front(), clusters[b2].members.front());
    if (d1 != d2) return d1 < d2;
    if (lo1 != lo2) return lo1 < lo2;
    return hi1 < hi2;
  };
  auto refresh_best = [&](std::size_t slot) {
    Best b;
    for (std::size_t other : alive) {
      if (other == slot) continue;
      double d = cd[slot * n0 + other];
      if (!b.valid || pair_key_less(d, slot, other, b.dist, slot, b.partner)) {
        b = {other, d, true};
      }
    }
    best[slot] = b;
  };
  for (std::size_t s : alive) refresh_best(s);

  Dendrogram out;
  out.n_leaves = n0;
  out.merges.reserve(n0 - 1);
  for (std::size_t step = 0; step + 1 < n0; ++step) {
    std::size_t sa = alive[0];
    bool found = false;
    for (std::size_t slot : alive) {
      if (!best[slot].valid) continue;
      if (!found || pair_key_less(best[slot].dist, slot, best[slot].partner, best[sa].dist, sa,
                                  best[sa].partner)) {
        sa = slot;
        found = true;
      }
    }
    std::size_t sb = best[sa].partner;
    const double height = best[sa].dist;
    if (clusters[sb].members.front() < clusters[sa].members.front()) std::swap(sa, sb);

    out.merges.push_back({clusters[sa].node_id, clusters[sb].node_id, height});

    std::vector<std::size_t> merged;
    merged.reserve(clusters[sa].members.size() + clusters[sb].members.size());
    std::merge(clusters[sa].members.begin(), clusters[sa].members.end(),
               clusters[sb].members.begin(), clusters[sb].members.end(),
               std::back_inserter(merged));
    clusters[sa].members = std::move(merged);
    clusters[sa].node_id = n0 + 1 + step;
    clusters[sb].members.clear();
    alive.erase(std::find(alive.begin(), alive.end(), sb));

    for (std::size_t other : alive) {
      if (other == sa) continue;
      double d = median_cross(rho, n0, clusters[sa].members, clusters[other].members, scratch);
      cd[sa * n0 + other] = d;
      cd[other * n0 + sa] = d;
    }
    if (alive.size() > 1) {
      refresh_best(sa);
      for (std::size_t slot : alive) {
        if (slot == sa) continue;
        if (!best[slot].valid || best[slot].partner == sb || best[slot].partner == sa) {
          refresh_best(slot);
        } else {
          double d = cd[slot * n0 + sa];
          if (pair_key_less(d, slot, sa, best[slot].dist, slot, best[slot].partner)) {
            best[slot] = {sa, d, true};
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::pair<Hierarchy, ClusterLabeling> robust_cluster(const CounterfactualMatrix& points,
                                                     const GoodNeighborhoodParams& params,
                                                     std::size_t target_k, std::uint64_t seed) {
  const std::size_t n = points.n;
  const int q = points.q;
  if (!(params.alpha >= 0.0 && params.alpha < 1.0) || !(params.nu >= 0.0 && params.nu < 1.0) ||
      !(params.alpha + params.nu < 1.0)) {
    throw validation_error("alpha and nu must lie in [0,1) with alpha + nu < 1");
  }
  if (params.subsample_n < 2) throw validation_error("subsample_n must be >= 2");
  if (params.subsample_n > n) {
    throw validation_error("subsample_n exceeds the number of points");
  }
  const std::size_t n0 = params.subsample_n;
  if (target_k < 1 || target_k > n0) {
    throw validation_error("target_k outside 1..subsample_n");
  }

  Hierarchy hier;
  // Uniform subsample without replacement: Fisher-Yates prefix.
  {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < n0; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(perm[i], perm[j]);
    }
    hier.subsample.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n0));
    std::sort(hier.subsample.begin(), hier.subsample.end());
  }

  std::size_t t = params.t_override;
  if (t == 0) {
    t = static_cast<std::size_t>(
            std::ceil((params.alpha + params.nu) * static_cast<double>(n0))) +
        1;
  }
  if (t > n0) t = n0;
  hier.t = t;
  hier.m = t;

  // Subsample pairwise distances.
  std::vector<double> dsub(n0 * n0, 0.0);
  parallel_for(0, n0, [&](std::size_t i) {
    const double* xi = points.row(hier.subsample[i]);
    for (std::size_t j = 0; j < n0; ++j) {
      if (j == i) continue;
      const double* xj = points.row(hier.subsample[j]);
      double s = 0.0;
      for (int c = 0; c < q; ++c) {
        double diff = xi[c] - xj[c];
        s += diff * diff;
      }
      dsub[i * n0 + j] = std::sqrt(s);
    }
  });

  // Neighborhood smoothing: coordinate-wise median of the t nearest
  // subsample neighbors (self included, ties by position).
  std::vector<double> smoothed(n0 * static_cast<std::size_t>(q), 0.0);
  if (t == 1) {
    for (std::size_t i = 0; i < n0; ++i) {
      const double* xi = points.row(hier.subsample[i]);
      for (int c = 0; c < q; ++c) smoothed[i * static_cast<std::size_t>(q) + c] = xi[c];
    }
  } else {
    parallel_for(0, n0, [&](std::size_t i) {
      std::vector<std::pair<double, std::size_t>> ranked(n0);
      for (std::size_t j = 0; j < n0; ++j) ranked[j] = {dsub[i * n0 + j], j};
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(t),
                        ranked.end());
      std::vector<double> vals(t);
      for (int c = 0; c < q; ++c) {
        for (std::size_t r = 0; r < t; ++r) {
          vals[r] = points.row(hier.subsample[ranked[r].second])[c];
        }
        auto mid = vals.begin() + static_cast<std::ptrdiff_t>(t / 2);
        std::nth_element(vals.begin(), mid, vals.end());
        double med;
        if (t % 2 == 1) {
          med = *mid;
        } else {
          double hi = *mid;
          double lo = *std::max_element(vals.begin(), mid);
          med = (lo + hi) / 2.0;
        }
        smoothed[i * static_cast<std::size_t>(q) + c] = med;
      }
    });
  }

  // Dissimilarities between smoothed points.
  std::vector<double> rho(n0 * n0, 0.0);
  double rho_max = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = i + 1; j < n0; ++j) {
      double s = 0.0;
      for (int c = 0; c < q; ++c) {
        double diff = smoothed[i * static_cast<std::size_t>(q) + c] -
                      smoothed[j * static_cast<std::size_t>(q) + c];
        s += diff * diff;
      }
      double d = std::sqrt(s);
      rho[i * n0 + j] = d;
      rho[j * n0 + i] = d;
      if (d > rho_max) rho_max = d;
    }
  }

  hier.merges = median_agglomerate(rho, n0);
  if (rho_max == 0.0) {
    // All smoothed points coincide: one meaningful cluster only.
    hier.degenerate = true;
    hier.subsample_labels.assign(n0, 1);
  } else {
    hier.subsample_labels = cut(hier.merges, target_k).labels;
  }

  // Extension by majority vote over the m nearest subsample neighbors.
  ClusterLabeling full;
  full.labels.assign(n, 0);
  full.k_max = 0;
  for (int lab : hier.subsample_labels) full.k_max = std::max(full.k_max, lab);
  std::vector<bool> in_subsample(n, false);
  for (std::size_t i : hier.subsample) in_subsample[i] = true;
  for (std::size_t pos = 0; pos < n0; ++pos) {
    full.labels[hier.subsample[pos]] = hier.subsample_labels[pos];
  }
  const std::size_t m = hier.m;
  parallel_for(0, n, [&](std::size_t i) {
    if (in_subsample[i]) return;
    const double* xi = points.row(i);
    std::vector<std::pair<double, std::size_t>> ranked(n0);
    for (std::size_t j = 0; j < n0; ++j) {
      const double* xj = points.row(hier.subsample[j]);
      double s = 0.0;
      for (int c = 0; c < q; ++c) {
        double diff = xi[c] - xj[c];
        s += diff * diff;
      }
      ranked[j] = {s, j};
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m),
                      ranked.end());
    std::vector<std::size_t> votes(static_cast<std::size_t>(full.k_max) + 1, 0);
    for (std::size_t r = 0; r < m; ++r) {
      ++votes[static_cast<std::size_t>(hier.subsample_labels[ranked[r].second])];
    }
    int winner = 1;
    for (int lab = 2; lab <= full.k_max; ++lab) {
      if (votes[static_cast<std::size_t>(lab)] > votes[static_cast<std::size_t>(winner)]) {
        winner = lab;  // strict > keeps ties on the smaller label
      }
    }
    full.labels[i] = winner;
  });
  return {std::move(hier), std::move(full)};
}

std::vector<std::size_t> max_assignment(const std::vector<double>& score, std::size_t k) {
  if (score.size() != k * k) throw validation_error("assignment matrix must be k x k");
  // Hungarian algorithm with potentials on cost = -score.
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  for (std::size_t i = 1; i <= k; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, kInf);
    std::vector<bool> used(k + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        double cur = -score[(i0 - 1) * k + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(k, 0);
  for (std::size_t j = 1; j <= k; ++j) {
    if (p[j] >= 1) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double pruning_error(const ClusterLabeling& labeling, const ClusterLabeling& truth) {
  if (labeling.labels.size() != truth.labels.size()) {
    throw validation_error("labelings have different lengths");
  }
  const std::size_t n = labeling.labels.size();
  if (n == 0) throw validation_error("empty labelings");
  // Compact the label alphabets; 0 participates as an ordinary class.
  std::vector<int> pred_vals(labeling.labels), true_vals(truth.labels);
  std::sort(pred_vals.begin(), pred_vals.end());
  pred_vals.erase(std::unique(pred_vals.begin(), pred_vals.end()), pred_vals.end());
  std::sort(true_vals.begin(), true_vals.end());
  true_vals.erase(std::unique(true_vals.begin(), true_vals.end()), true_vals.end());
  const std::size_t k = std::max(pred_vals.size(), true_vals.size());
  auto index_of = [](const std::vector<int>& vals, int v) {
    return static_cast<std::size_t>(
        std::lower_bound(vals.begin(), vals.end(), v) - vals.begin());
  };
  std::vector<double> confusion(k * k, 0.0);  // rows: truth, cols: predicted
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = index_of(true_vals, truth.labels[i]);
    std::size_t c = index_of(pred_vals, labeling.labels[i]);
    confusion[r * k + c] += 1.0;
  }
  std::vector<std::size_t> assign = max_assignment(confusion, k);
  double matched = 0.0;
  for (std::size_t r = 0; r < k; ++r) matched += confusion[r * k + assign[r]];
  return 1.0 - matched / static_cast<double>(n);
}

}  // namespace cclust
