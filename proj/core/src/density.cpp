#include "cclust/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cclust/parallel.hpp"

namespace cclust {

namespace {

const double* matrix_data(const CounterfactualMatrix& m, bool use_truth) {
  if (use_truth) {
    if (!m.truth) throw validation_error("matrix has no truth columns");
    return m.truth->data();
  }
  return m.points.data();
}

double kde_over_indices(const double* data, int q, double h, double c,
                        const std::vector<std::size_t>& idx, std::size_t n_total,
                        const double* query) {
  // Ascending-index summation of strictly positive contributions only.
  double sum = 0.0;
  for (std::size_t i : idx) {
    const double* xi = data + i * static_cast<std::size_t>(q);
    double s = 0.0;
    for (int j = 0; j < q; ++j) {
      double diff = xi[j] - query[j];
      s += diff * diff;
    }
    double w = 1.0 - std::sqrt(s) / h;
    if (w > 0.0) sum += c * w;
  }
  return sum / (static_cast<double>(n_total) * std::pow(h, q));
}

}  // namespace

double kde(const CounterfactualMatrix& points, double h, const KernelSpec& kernel,
           const std::vector<double>& query, bool use_truth) {
  if (h <= 0.0) throw validation_error("bandwidth h must be positive");
  if (static_cast<int>(query.size()) != points.q) {
    throw validation_error("query dimension mismatch");
  }
  const double* data = matrix_data(points, use_truth);
  std::vector<std::size_t> all(points.n);
  for (std::size_t i = 0; i < points.n; ++i) all[i] = i;
  return kde_over_indices(data, points.q, h, kernel.normalizer, all, points.n, query.data());
}

std::vector<double> kde_many(const CounterfactualMatrix& points, double h,
                             const KernelSpec& kernel, const std::vector<double>& queries,
                             std::size_t n_query, bool use_truth) {
  if (h <= 0.0) throw validation_error("bandwidth h must be positive");
  const double* data = matrix_data(points, use_truth);
  const int q = points.q;
  std::vector<std::size_t> all(points.n);
  for (std::size_t i = 0; i < points.n; ++i) all[i] = i;
  std::vector<double> out(n_query, 0.0);
  parallel_for(0, n_query, [&](std::size_t r) {
    out[r] = kde_over_indices(data, q, h, kernel.normalizer, all, points.n,
                              queries.data() + r * static_cast<std::size_t>(q));
  });
  return out;
}

std::vector<double> kde_at_points(const CounterfactualMatrix& points, double h,
                                  const KernelSpec& kernel, bool use_truth) {
  if (h <= 0.0) throw validation_error("bandwidth h must be positive");
  const double* data = matrix_data(points, use_truth);
  const int q = points.q;
  const std::size_t n = points.n;

  // Grid buckets of width h; a kernel support ball only intersects the
  // query's bucket and its immediate neighbors.
  std::map<std::vector<long long>, std::vector<std::size_t>> buckets;
  std::vector<long long> key(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = data + i * static_cast<std::size_t>(q);
    for (int j = 0; j < q; ++j) {
      key[static_cast<std::size_t>(j)] = static_cast<long long>(std::floor(xi[j] / h));
    }
    buckets[key].push_back(i);
  }

  std::vector<double> out(n, 0.0);
  parallel_for(0, n, [&](std::size_t r) {
    const double* query = data + r * static_cast<std::size_t>(q);
    std::vector<long long> base(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
      base[static_cast<std::size_t>(j)] = static_cast<long long>(std::floor(query[j] / h));
    }
    // Enumerate the 3^q neighborhood.
    std::vector<std::size_t> candidates;
    std::vector<long long> probe(static_cast<std::size_t>(q));
    const long long total = static_cast<long long>(std::pow(3.0, q) + 0.5);
    for (long long code = 0; code < total; ++code) {
      long long c = code;
      for (int j = 0; j < q; ++j) {
        probe[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)] + (c % 3) - 1;
        c /= 3;
      }
      auto it = buckets.find(probe);
      if (it != buckets.end()) {
        candidates.insert(candidates.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    out[r] = kde_over_indices(data, q, h, kernel.normalizer, candidates, n, query);
  });
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> size;
  explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

LevelSetClustering cluster_at_level(const CounterfactualMatrix& points, double h, double t,
                                    const std::vector<double>& densities, bool use_truth) {
  const double* data = matrix_data(points, use_truth);
  const int q = points.q;
  LevelSetClustering out;
  out.h = h;
  out.t = t;
  out.densities = densities;
  for (std::size_t i = 0; i < points.n; ++i) {
    if (densities[i] > t) out.retained.push_back(i);
  }
  const std::size_t m = out.retained.size();
  UnionFind uf(m);
  const double h2 = h * h;
  // Edge rule: distance <= h, inclusive.
  for (std::size_t a = 0; a < m; ++a) {
    const double* xa = data + out.retained[a] * static_cast<std::size_t>(q);
    for (std::size_t b = a + 1; b < m; ++b) {
      const double* xb = data + out.retained[b] * static_cast<std::size_t>(q);
      double s = 0.0;
      for (int j = 0; j < q; ++j) {
        double diff = xa[j] - xb[j];
        s += diff * diff;
      }
      if (s <= h2) uf.unite(a, b);
    }
  }
  out.labels.labels.assign(points.n, 0);
  std::vector<int> root_label(m, 0);
  int next = 0;
  for (std::size_t a = 0; a < m; ++a) {
    std::size_t r = uf.find(a);
    if (root_label[r] == 0) root_label[r] = ++next;  // ascending => smallest member first
    out.labels.labels[out.retained[a]] = root_label[r];
  }
  out.labels.k_max = next;
  return out;
}

}  // namespace

LevelSetClustering level_set_cluster(const CounterfactualMatrix& points, double h, double t,
                                     const KernelSpec& kernel, bool use_truth) {
  if (h <= 0.0) throw validation_error("bandwidth h must be positive");
  if (t < 0.0) throw validation_error("level t must be >= 0");
  std::vector<double> densities = kde_at_points(points, h, kernel, use_truth);
  return cluster_at_level(points, h, t, densities, use_truth);
}

std::vector<LevelSetClustering> level_sweep(const CounterfactualMatrix& points, double h,
                                            const KernelSpec& kernel,
                                            const std::vector<double>& t_grid, bool use_truth) {
  if (h <= 0.0) throw validation_error("bandwidth h must be positive");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    if (!(t_grid[i] < t_grid[i + 1])) {
      throw validation_error("level grid must be strictly increasing");
    }
  }
  std::vector<double> densities = kde_at_points(points, h, kernel, use_truth);
  std::vector<LevelSetClustering> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t < 0.0) throw validation_error("level t must be >= 0");
    out.push_back(cluster_at_level(points, h, t, densities, use_truth));
  }
  return out;
}

namespace {

double directed_sq(const std::vector<const double*>& a, const std::vector<const double*>& b,
                   int q) {
  double worst = 0.0;
  for (const double* pa : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const double* pb : b) {
      double s = 0.0;
      for (int j = 0; j < q; ++j) {
        double diff = pa[j] - pb[j];
        s += diff * diff;
      }
      if (s < best) {
        best = s;
        if (best <= worst) break;  // cannot raise the supremum
      }
    }
    if (best > worst) worst = best;
  }
  return worst;
}

}  // namespace

double hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw validation_error("hausdorff of an empty set");
  const int q = static_cast<int>(a.front().size());
  for (const auto& p : a) {
    if (static_cast<int>(p.size()) != q) throw validation_error("point dimension mismatch");
  }
  for (const auto& p : b) {
    if (static_cast<int>(p.size()) != q) throw validation_error("point dimension mismatch");
  }
  std::vector<const double*> pa(a.size());
  std::vector<const double*> pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] = a[i].data();
  for (std::size_t i = 0; i < b.size(); ++i) pb[i] = b[i].data();
  return std::sqrt(std::max(directed_sq(pa, pb, q), directed_sq(pb, pa, q)));
}

double hausdorff_rows(const CounterfactualMatrix& a, const std::vector<std::size_t>& rows_a,
                      bool truth_a, const CounterfactualMatrix& b,
                      const std::vector<std::size_t>& rows_b, bool truth_b) {
  if (rows_a.empty() || rows_b.empty()) throw validation_error("hausdorff of an empty set");
  if (a.q != b.q) throw validation_error("matrix dimension mismatch");
  const double* da = matrix_data(a, truth_a);
  const double* db = matrix_data(b, truth_b);
  std::vector<const double*> pa(rows_a.size());
  std::vector<const double*> pb(rows_b.size());
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    pa[i] = da + rows_a[i] * static_cast<std::size_t>(a.q);
  }
  for (std::size_t i = 0; i < rows_b.size(); ++i) {
    pb[i] = db + rows_b[i] * static_cast<std::size_t>(b.q);
  }
  return std::sqrt(std::max(directed_sq(pa, pb, a.q), directed_sq(pb, pa, a.q)));
}

double default_bandwidth(const CounterfactualMatrix& points) {
  const std::size_t n = points.n;
  const int q = points.q;
  if (n < 2) throw validation_error("bandwidth default needs n >= 2");
  double sd_sum = 0.0;
  for (int j = 0; j < q; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += points.row(i)[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double diff = points.row(i)[j] - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n - 1);
    sd_sum += std::sqrt(var);
  }
  const double scale = sd_sum / static_cast<double>(q);
  const double rate = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(q) + 4.0));
  return scale > 0.0 ? scale * rate : rate;
}

}  // namespace cclust
