#include "cclust/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>

#include "cclust/parallel.hpp"

namespace cclust {

double point_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw validation_error("point dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double diff = x[j] - y[j];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double linkage_distance(const PointSet& s1, const PointSet& s2, LinkageKind kind) {
  if (s1.empty() || s2.empty()) throw validation_error("linkage distance of an empty set");
  switch (kind) {
    case LinkageKind::single: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : s1)
        for (const auto& q : s2) best = std::min(best, point_distance(p, q));
      return best;
    }
    case LinkageKind::complete: {
      double best = 0.0;
      for (const auto& p : s1)
        for (const auto& q : s2) best = std::max(best, point_distance(p, q));
      return best;
    }
    case LinkageKind::average: {
      double sum = 0.0;
      for (const auto& p : s1)
        for (const auto& q : s2) sum += point_distance(p, q);
      return sum / (static_cast<double>(s1.size()) * static_cast<double>(s2.size()));
    }
  }
  throw validation_error("unknown linkage kind");
}

namespace {

struct Cluster {
  std::vector<std::size_t> members;  // sorted ascending
  std::size_t node_id = 0;           // dendrogram node id (1-based)
  bool alive = false;
};

// Canonical cluster-pair average: outer loop over the cluster with the
// smaller minimum member, members ascending. Every evaluation of the same
// pair performs the identical sequence of additions.
double average_from_matrix(const std::vector<double>& dpt, std::size_t n,
                           const Cluster& a, const Cluster& b) {
  const Cluster& first = a.members.front() < b.members.front() ? a : b;
  const Cluster& second = a.members.front() < b.members.front() ? b : a;
  double sum = 0.0;
  for (std::size_t i : first.members) {
    const double* row = dpt.data() + i * n;
    for (std::size_t j : second.members) sum += row[j];
  }
  return sum / (static_cast<double>(a.members.size()) * static_cast<double>(b.members.size()));
}

}  // namespace

Dendrogram agglomerate(const CounterfactualMatrix& points, LinkageKind kind) {
  const std::size_t n = points.n;
  if (n < 2) throw validation_error("agglomerate needs at least 2 points");
  const int q = points.q;

  // Pairwise point distances, full square for fast row scans.
  std::vector<double> dpt(n * n, 0.0);
  parallel_for(0, n, [&](std::size_t i) {
    const double* xi = points.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* xj = points.row(j);
      double s = 0.0;
      for (int c = 0; c < q; ++c) {
        double diff = xi[c] - xj[c];
        s += diff * diff;
      }
      dpt[i * n + j] = std::sqrt(s);
    }
  });

  std::vector<Cluster> clusters(n);
  for (std::size_t i = 0; i < n; ++i) {
    clusters[i].members = {i};
    clusters[i].node_id = i + 1;
    clusters[i].alive = true;
  }
  std::vector<std::size_t> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = i;

  // Cluster-level distances, slot-indexed like `clusters`. Single/complete
  // merge by exact min/max of cached entries; average is recomputed
  // canonically from dpt whenever a pair changes.
  std::vector<double> cd = dpt;

  // Per-slot cached best partner (slot, distance). A stale entry is only
  // refreshed when its partner dies, which keeps the scan cost near O(n^2).
  struct Best {
    std::size_t partner = 0;
    double dist = 0.0;
    bool valid = false;
  };
  std::vector<Best> best(n);

  auto pair_key_less = [&](double d1, std::size_t a1, std::size_t b1, double d2, std::size_t a2,
                           std::size_t b2) {
    // Compare (distance, min member of first cluster, min member of second),
    // clusters oriented so the smaller min member comes first.
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
      double d = cd[slot * n + other];
      if (!b.valid || pair_key_less(d, slot, other, b.dist, slot, b.partner)) {
        b.partner = other;
        b.dist = d;
        b.valid = true;
      }
    }
    best[slot] = b;
  };
  for (std::size_t slot : alive) refresh_best(slot);

  Dendrogram out;
  out.n_leaves = n;
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    // Pick the globally best cached pair.
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
    // Orient so the smaller min member is the left child and keeps the slot.
    if (clusters[sb].members.front() < clusters[sa].members.front()) std::swap(sa, sb);

    Dendrogram::Merge m;
    m.left = clusters[sa].node_id;
    m.right = clusters[sb].node_id;
    m.height = height;
    out.merges.push_back(m);

    // Merge sb into sa.
    std::vector<std::size_t> merged;
    merged.reserve(clusters[sa].members.size() + clusters[sb].members.size());
    std::merge(clusters[sa].members.begin(), clusters[sa].members.end(),
               clusters[sb].members.begin(), clusters[sb].members.end(),
               std::back_inserter(merged));
    clusters[sa].members = std::move(merged);
    clusters[sa].node_id = n + 1 + step;
    clusters[sb].alive = false;
    clusters[sb].members.clear();
    alive.erase(std::find(alive.begin(), alive.end(), sb));

    for (std::size_t other : alive) {
      if (other == sa) continue;
      double d;
      switch (kind) {
        case LinkageKind::single:
          d = std::min(cd[sa * n + other], cd[sb * n + other]);
          break;
        case LinkageKind::complete:
          d = std::max(cd[sa * n + other], cd[sb * n + other]);
          break;
        case LinkageKind::average:
        default:
          d = average_from_matrix(dpt, n, clusters[sa], clusters[other]);
          break;
      }
      cd[sa * n + other] = d;
      cd[other * n + sa] = d;
    }

    if (alive.size() > 1) {
      refresh_best(sa);
      for (std::size_t slot : alive) {
        if (slot == sa) continue;
        // Refresh entries pointing at a dead slot or at sa (its distance moved).
        if (!best[slot].valid || best[slot].partner == sb || best[slot].partner == sa) {
          refresh_best(slot);
        } else {
          // The new cluster may beat the cached partner.
          double d = cd[slot * n + sa];
          if (pair_key_less(d, slot, sa, best[slot].dist, slot, best[slot].partner)) {
            best[slot] = {sa, d, true};
          }
        }
      }
    }
  }
  return out;
}

ClusterLabeling cut(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t n = dendrogram.n_leaves;
  if (k < 1 || k > n) throw validation_error("cut level k outside 1..n");
  // Union-find over node ids; apply the first n-k merges.
  std::vector<std::size_t> parent(n + dendrogram.merges.size() + 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  const std::size_t applied = n - k;
  for (std::size_t r = 0; r < applied; ++r) {
    const auto& m = dendrogram.merges[r];
    const std::size_t id = n + 1 + r;
    parent[find(m.left)] = id;
    parent[find(m.right)] = id;
  }
  // Components numbered 1..k in order of smallest member index.
  ClusterLabeling lab;
  lab.labels.assign(n, 0);
  std::vector<int> root_label(parent.size(), 0);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i + 1);
    if (root_label[r] == 0) root_label[r] = ++next;
    lab.labels[i] = root_label[r];
  }
  lab.k_max = next;
  return lab;
}

}  // namespace cclust
