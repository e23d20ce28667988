// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failing criteria. Every check uses fixed seeds, so reruns print identical
// lines. Criterion 10 shells out to the CLI named by CCLUST_BIN.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cclust/density.hpp"
#include "cclust/experiments.hpp"
#include "cclust/kernel.hpp"
#include "cclust/linkage.hpp"
#include "cclust/metrics.hpp"
#include "cclust/regression.hpp"
#include "cclust/rng.hpp"
#include "cclust/robust.hpp"
#include "cclust/simulate.hpp"

using namespace cclust;
using Clock = std::chrono::steady_clock;

namespace {

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

CounterfactualMatrix make_matrix(std::vector<double> pts, std::size_t n, int q) {
  CounterfactualMatrix m;
  m.points = std::move(pts);
  m.n = n;
  m.q = q;
  return m;
}

// ---- criterion 1: linkage stability bound ---------------------------------

bool criterion_linkage_bound(std::string& detail) {
  auto t0 = Clock::now();
  Rng rng(101);
  const LinkageKind kinds[] = {LinkageKind::single, LinkageKind::average,
                               LinkageKind::complete};
  int violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    int q = 1 + static_cast<int>(rng.below(3));
    auto draw_set = [&](std::size_t count) {
      PointSet s(count, std::vector<double>(static_cast<std::size_t>(q)));
      for (auto& p : s)
        for (double& v : p) v = rng.uniform(-2.0, 2.0);
      return s;
    };
    PointSet s1 = draw_set(1 + rng.below(8));
    PointSet s2 = draw_set(1 + rng.below(8));
    double eps = rng.uniform(0.0, 0.5);
    auto wobble = [&](const PointSet& s) {
      PointSet out = s;
      for (auto& p : out)
        for (double& v : p) v += rng.uniform(-eps, eps);
      return out;
    };
    PointSet s1_hat = wobble(s1);
    PointSet s2_hat = wobble(s2);
    for (LinkageKind kind : kinds) {
      LinkageGap g = prop1_gap(s1, s2, s1_hat, s2_hat, kind);
      if (g.gap > g.bound + 1e-12) ++violations;
      if (g.gap != std::abs(g.exact - g.estimated)) ++violations;
      worst_slack = std::min(worst_slack, g.bound - g.gap);
    }
  }
  double dt = secs_since(t0);
  detail = fmt("%d violations in 1000 trials x 3 kinds, min slack %.3e, %.1fs",
               violations, worst_slack, dt);
  return violations == 0 && dt < 60.0;
}

// ---- criterion 2: agglomerate vs recompute-everything reference ------------

Dendrogram naive_agglomerate(const CounterfactualMatrix& m, LinkageKind kind) {
  struct Cluster {
    std::vector<std::size_t> members;
    std::size_t node_id;
  };
  std::vector<Cluster> live;
  for (std::size_t i = 0; i < m.n; ++i) live.push_back({{i}, i + 1});
  auto points_of = [&](const Cluster& c) {
    PointSet s;
    for (std::size_t i : c.members) {
      const double* r = m.row(i);
      s.push_back(std::vector<double>(r, r + m.q));
    }
    return s;
  };
  Dendrogram out;
  out.n_leaves = m.n;
  for (std::size_t step = 0; live.size() > 1; ++step) {
    std::size_t best_a = 0, best_b = 1;
    double best_d = 0.0;
    bool have = false;
    for (std::size_t a = 0; a < live.size(); ++a) {
      for (std::size_t b = a + 1; b < live.size(); ++b) {
        // Canonical argument order: cluster with the smaller min member first.
        const Cluster& first = live[a].members[0] < live[b].members[0] ? live[a] : live[b];
        const Cluster& second = live[a].members[0] < live[b].members[0] ? live[b] : live[a];
        double d = linkage_distance(points_of(first), points_of(second), kind);
        std::size_t lo = first.members[0], hi = second.members[0];
        std::size_t cur_lo = std::min(live[best_a].members[0], live[best_b].members[0]);
        std::size_t cur_hi = std::max(live[best_a].members[0], live[best_b].members[0]);
        if (!have || d < best_d ||
            (d == best_d && (lo < cur_lo || (lo == cur_lo && hi < cur_hi)))) {
          have = true;
          best_d = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (live[best_b].members[0] < live[best_a].members[0]) std::swap(best_a, best_b);
    out.merges.push_back({live[best_a].node_id, live[best_b].node_id, best_d});
    std::vector<std::size_t> merged;
    std::merge(live[best_a].members.begin(), live[best_a].members.end(),
               live[best_b].members.begin(), live[best_b].members.end(),
               std::back_inserter(merged));
    live[best_a].members = std::move(merged);
    live[best_a].node_id = m.n + 1 + step;
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return out;
}

bool criterion_linkage_oracle(std::string& detail) {
  Rng rng(202);
  const LinkageKind kinds[] = {LinkageKind::single, LinkageKind::average,
                               LinkageKind::complete};
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.below(49);
    int q = 1 + static_cast<int>(rng.below(3));
    std::vector<double> pts(n * static_cast<std::size_t>(q));
    // Coarse grid forces frequent exact distance ties.
    for (double& v : pts) v = std::floor(rng.uniform(-3.0, 3.0) * 4.0) / 4.0;
    CounterfactualMatrix m = make_matrix(std::move(pts), n, q);
    for (LinkageKind kind : kinds) {
      Dendrogram fast = agglomerate(m, kind);
      Dendrogram slow = naive_agglomerate(m, kind);
      bool same = fast.n_leaves == slow.n_leaves && fast.merges.size() == slow.merges.size();
      for (std::size_t i = 0; same && i < fast.merges.size(); ++i) {
        same = fast.merges[i].left == slow.merges[i].left &&
               fast.merges[i].right == slow.merges[i].right &&
               fast.merges[i].height == slow.merges[i].height;
      }
      if (!same) ++mismatches;
    }
  }
  detail = fmt("%d mismatches in 200 instances x 3 kinds (n <= 50, exact heights)",
               mismatches);
  return mismatches == 0;
}

// ---- criterion 3: Hausdorff vs brute force + metric axioms -----------------

double brute_hausdorff(const PointSet& a, const PointSet& b) {
  auto directed = [](const PointSet& x, const PointSet& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : y) best = std::min(best, point_distance(p, r));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

bool criterion_hausdorff(std::string& detail) {
  Rng rng(303);
  auto draw_set = [&](int q) {
    PointSet s(1 + rng.below(30), std::vector<double>(static_cast<std::size_t>(q)));
    for (auto& p : s)
      for (double& v : p) v = rng.uniform(-5.0, 5.0);
    return s;
  };
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int q = 1 + static_cast<int>(rng.below(3));
    PointSet a = draw_set(q), b = draw_set(q);
    if (hausdorff(a, b) != brute_hausdorff(a, b)) ++bad;
  }
  for (int trial = 0; trial < 500; ++trial) {
    int q = 1 + static_cast<int>(rng.below(3));
    PointSet a = draw_set(q), b = draw_set(q), c = draw_set(q);
    double ab = hausdorff(a, b), ba = hausdorff(b, a);
    double bc = hausdorff(b, c), ac = hausdorff(a, c);
    if (ab != ba) ++bad;
    if (hausdorff(a, a) != 0.0) ++bad;
    if (ac > ab + bc + 1e-12) ++bad;
  }
  detail = fmt("%d violations in 500 oracle pairs + 500 axiom triples", bad);
  return bad == 0;
}

// ---- criterion 4: KDE mass + plug-in sup-gap bound -------------------------

bool criterion_kde(std::string& detail) {
  bool ok = true;
  double worst_mass_err = 0.0;
  for (int q = 1; q <= 3; ++q) {
    Rng rng(400 + static_cast<std::uint64_t>(q));
    const std::size_t n = 150;
    std::vector<double> pts(n * static_cast<std::size_t>(q));
    for (double& v : pts) v = rng.uniform();
    CounterfactualMatrix m = make_matrix(std::move(pts), n, q);
    KernelSpec spec = make_triangular_kernel(q);
    const double h = 0.3;
    // Data lie in [0,1]^q and the kernel support has radius h, so the box
    // [-h, 1+h]^q carries all of the mass.
    const std::size_t draws = 1000000;
    std::vector<double> queries(draws * static_cast<std::size_t>(q));
    for (double& v : queries) v = rng.uniform(-h, 1.0 + h);
    std::vector<double> dens = kde_many(m, h, spec, queries, draws);
    double mean = 0.0;
    for (double d : dens) mean += d;
    mean /= static_cast<double>(draws);
    double mass = mean * std::pow(1.0 + 2.0 * h, q);
    worst_mass_err = std::max(worst_mass_err, std::abs(mass - 1.0));
    if (mass < 0.98 || mass > 1.02) ok = false;
  }

  Rng rng(404);
  int gap_violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int q = 1 + static_cast<int>(rng.below(3));
    std::size_t n = 30 + rng.below(120);
    std::vector<double> truth(n * static_cast<std::size_t>(q));
    for (double& v : truth) v = rng.uniform(-1.0, 1.0);
    double scale = rng.uniform(0.0, 0.15);
    std::vector<double> est = truth;
    double mean_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row_sq = 0.0;
      for (int a = 0; a < q; ++a) {
        double delta = scale * rng.normal();
        est[i * static_cast<std::size_t>(q) + static_cast<std::size_t>(a)] += delta;
        row_sq += delta * delta;
      }
      mean_err += std::sqrt(row_sq);
    }
    mean_err /= static_cast<double>(n);
    CounterfactualMatrix m = make_matrix(std::move(est), n, q);
    m.truth = std::move(truth);
    KernelSpec spec = make_triangular_kernel(q);
    double h = rng.uniform(0.2, 0.6);
    double bound = spec.lipschitz / std::pow(h, q + 1) * std::min(mean_err, h);
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<double> w(static_cast<std::size_t>(q));
      for (double& v : w) v = rng.uniform(-1.5, 1.5);
      double gap = std::abs(kde(m, h, spec, w, false) - kde(m, h, spec, w, true));
      if (gap > bound + 1e-12) ++gap_violations;
    }
  }
  detail = fmt("max |mass - 1| = %.4f at 1e6 draws (q = 1..3), %d sup-gap violations "
               "in 100 datasets x 10 probes",
               worst_mass_err, gap_violations);
  return ok && gap_violations == 0;
}

// ---- criterion 5: level-set nesting across increasing thresholds -----------

bool criterion_level_nesting(std::string& detail) {
  Rng rng(505);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int q = 1 + static_cast<int>(rng.below(3));
    std::size_t n = 20 + rng.below(80);
    std::vector<double> pts(n * static_cast<std::size_t>(q));
    for (double& v : pts) v = rng.uniform();
    CounterfactualMatrix m = make_matrix(std::move(pts), n, q);
    KernelSpec spec = make_triangular_kernel(q);
    double h = rng.uniform(0.05, 0.3);
    std::vector<double> grid(4);
    grid[0] = rng.uniform(0.0, 0.4);
    for (int j = 1; j < 4; ++j) grid[static_cast<std::size_t>(j)] =
        grid[static_cast<std::size_t>(j - 1)] + rng.uniform(0.01, 0.5);
    auto sweep = level_sweep(m, h, spec, grid);
    for (std::size_t j = 1; j < sweep.size(); ++j) {
      // Higher threshold retains a subset of the points.
      if (!std::includes(sweep[j - 1].retained.begin(), sweep[j - 1].retained.end(),
                         sweep[j].retained.begin(), sweep[j].retained.end()))
        ++violations;
      // Components only split as the threshold rises; together at a higher
      // level implies together at every lower level.
      const auto& hi = sweep[j].labels.labels;
      for (std::size_t i = 0; i < sweep.size() && i < j; ++i) {
        const auto& lo = sweep[i].labels.labels;
        for (std::size_t u = 0; u < n; ++u) {
          if (hi[u] == 0) continue;
          for (std::size_t v = u + 1; v < n; ++v) {
            if (hi[v] == 0) continue;
            if (hi[u] == hi[v] && lo[u] != lo[v]) ++violations;
          }
        }
      }
    }
  }
  detail = fmt("%d nesting violations in 100 trials x 4-level grids", violations);
  return violations == 0;
}

// ---- criterion 6: mean l2 projection error vs per-arm l1 sum ---------------

bool criterion_projection_error(std::string& detail) {
  Rng rng(606);
  int violations = 0;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.below(100);
    int q = 1 + static_cast<int>(rng.below(4));
    std::vector<double> truth(n * static_cast<std::size_t>(q));
    for (double& v : truth) v = rng.uniform(-3.0, 3.0);
    std::vector<double> est = truth;
    double scale = rng.uniform(0.0, 0.5);
    for (double& v : est) v += scale * rng.normal();
    CounterfactualMatrix m = make_matrix(std::move(est), n, q);
    m.truth = std::move(truth);
    ProjectionError e = empirical_projection_error(m);
    double l1_sum = 0.0;
    for (double a : e.per_arm_l1) l1_sum += a;
    if (e.mean_l2 > l1_sum + 1e-12) ++violations;
    ++checked;
  }
  // Same inequality on generator output run through the perturbation step.
  for (int trial = 0; trial < 20; ++trial) {
    SimConfig sim;
    sim.n = 300;
    sim.seed = 700 + static_cast<std::uint64_t>(trial);
    auto [data, labels] = gen_voronoi(sim);
    CounterfactualMatrix noisy = perturb(data, rng.uniform(0.25, 2.0), sim.seed + 1);
    ProjectionError e = empirical_projection_error(noisy);
    double l1_sum = 0.0;
    for (double a : e.per_arm_l1) l1_sum += a;
    if (e.mean_l2 > l1_sum + 1e-12) ++violations;
    ++checked;
  }
  detail = fmt("%d violations in %d simulated matrices", violations, checked);
  return violations == 0;
}

// ---- criterion 7: classification error rises with alpha, worse at low beta -

bool criterion_fig2ab(std::string& detail) {
  auto t0 = Clock::now();
  Fig2abConfig cfg;
  auto rows = run_fig2ab(cfg);
  double min_rho = 1.0;
  for (double nu : cfg.nus) {
    for (double beta : cfg.betas) {
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        if (r.nu == nu && r.beta == beta) {
          xs.push_back(r.alpha);
          ys.push_back(r.mean_error);
        }
      }
      min_rho = std::min(min_rho, spearman_rho(xs, ys));
    }
  }
  double mean_low = 0.0, mean_high = 0.0;
  std::size_t n_low = 0, n_high = 0;
  for (const auto& r : rows) {
    if (r.beta == cfg.betas[0]) {
      mean_low += r.mean_error;
      ++n_low;
    } else {
      mean_high += r.mean_error;
      ++n_high;
    }
  }
  mean_low /= static_cast<double>(n_low);
  mean_high /= static_cast<double>(n_high);
  double dt = secs_since(t0);
  detail = fmt("min Spearman rho(alpha, error) = %.3f over 4 groups, "
               "mean error %.4f (beta=%.1f) vs %.4f (beta=%.1f), %.1fs",
               min_rho, mean_low, cfg.betas[0], mean_high, cfg.betas[1], dt);
  return min_rho >= 0.0 && mean_low > mean_high && dt < 600.0;
}

// ---- criterion 8: level-set Hausdorff distance falls with n ----------------

bool criterion_fig2cd(std::string& detail) {
  auto t0 = Clock::now();
  Fig2cdConfig cfg;
  auto rows = run_fig2cd(cfg);
  double max_rho = -1.0;
  std::size_t total_skipped = 0;
  bool all_used = true;
  for (const auto& r : rows) {
    total_skipped += r.skipped;
    if (r.reps_used == 0) all_used = false;
  }
  for (double t : cfg.ts) {
    for (double beta : cfg.betas) {
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        if (r.t == t && r.beta == beta) {
          xs.push_back(static_cast<double>(r.n));
          ys.push_back(r.mean_distance);
        }
      }
      max_rho = std::max(max_rho, spearman_rho(xs, ys));
    }
  }
  double dt = secs_since(t0);
  detail = fmt("max Spearman rho(n, distance) = %.3f over 4 groups, "
               "%zu skipped reps, %.1fs",
               max_rho, total_skipped, dt);
  return max_rho <= 0.0 && all_used && dt < 900.0;
}

// ---- criterion 9: robust hierarchy recovers the Voronoi truth --------------

bool criterion_recovery(std::string& detail) {
  int exact = 0;
  double worst_clean = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    SimConfig sim;
    sim.n = 2500;
    sim.nu = 0.0;
    sim.seed = s;
    auto [data, truth] = gen_voronoi(sim);
    GoodNeighborhoodParams params;
    auto [hier, labels] = robust_cluster(data, params, 10, derive_seed(s, 7));
    double e = pruning_error(labels, truth);
    if (e == 0.0) ++exact;
    worst_clean = std::max(worst_clean, e);
  }
  double noisy_sum = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    SimConfig sim;
    sim.n = 2500;
    sim.nu = 0.05;
    sim.seed = s;
    auto [data, truth] = gen_voronoi(sim);
    GoodNeighborhoodParams params;
    params.nu = 0.05;
    auto [hier, labels] = robust_cluster(data, params, 10, derive_seed(s, 7));
    noisy_sum += pruning_error(labels, truth);
  }
  double noisy_mean = noisy_sum / 20.0;
  detail = fmt("clean exact %d/20 (worst %.4f), nu=0.05 mean error %.4f",
               exact, worst_clean, noisy_mean);
  return exact == 20 && noisy_mean <= 0.10;
}

// ---- criterion 10: CLI reruns are byte-identical ---------------------------

int run_cli(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion_cli_determinism(std::string& detail) {
  const char* bin = std::getenv("CCLUST_BIN");
  if (bin == nullptr) {
    detail = "CCLUST_BIN not set";
    return false;
  }
  std::string b(bin);
  auto dir = std::filesystem::temp_directory_path() / "cclust_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  int pairs_equal = 0, pairs_total = 0;
  bool ran_ok = true;
  auto compare = [&](const std::string& a, const std::string& c) {
    ++pairs_total;
    std::string sa = slurp(at(a)), sc = slurp(at(c));
    if (!sa.empty() && sa == sc) ++pairs_equal;
  };

  for (const char* pre : {"a", "b"}) {
    std::string p(pre);
    ran_ok &= run_cli(b + " simulate voronoi --n 400 --seed 9 --nu 0.05 --out " +
                      at(p + "v")) == 0;
    ran_ok &= run_cli(b + " simulate gauss3 --n 240 --seed 11 --beta 1 --out " + at(p + "g") +
                      " --table-out " + at(p + "g_table.csv") + " --outcome-sd 0.05") == 0;
    ran_ok &= run_cli(b + " fit --in " + at(p + "g_table.csv") +
                      " --method knn --k 8 --fraction 0.5 --seed 3 --out " + at(p + "f")) == 0;
    ran_ok &= run_cli(b + " cluster hier --in " + at(p + "f.csv") +
                      " --linkage average --k 3 --out " + at(p + "h")) == 0;
    ran_ok &= run_cli(b + " cluster robust-hier --in " + at(p + "v.csv") +
                      " --alpha 0.05 --nu 0.05 --subsample 100 --k 10 --seed 3 --out " +
                      at(p + "r")) == 0;
    ran_ok &= run_cli(b + " cluster density --in " + at(p + "f.csv") +
                      " --h 0.25 --t 0.05 --out " + at(p + "d")) == 0;
  }
  compare("av.csv", "bv.csv");
  compare("av_labels.csv", "bv_labels.csv");
  compare("av_truth.csv", "bv_truth.csv");
  compare("ag.csv", "bg.csv");
  compare("ag_table.csv", "bg_table.csv");
  compare("af.csv", "bf.csv");
  compare("ah_labels.csv", "bh_labels.csv");
  compare("ar_labels.csv", "br_labels.csv");
  compare("ad_labels.csv", "bd_labels.csv");
  detail = fmt("%d/%d rerun outputs byte-identical across 6 CLI pipelines%s",
               pairs_equal, pairs_total, ran_ok ? "" : " (a pipeline exited nonzero)");
  return ran_ok && pairs_equal == pairs_total;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*check)(std::string&);
  };
  const Criterion criteria[] = {
      {"linkage stability bound", criterion_linkage_bound},
      {"agglomeration oracle equivalence", criterion_linkage_oracle},
      {"Hausdorff oracle + metric axioms", criterion_hausdorff},
      {"KDE mass + plug-in sup-gap bound", criterion_kde},
      {"level-set nesting", criterion_level_nesting},
      {"projection error inequality", criterion_projection_error},
      {"error trend in alpha and beta", criterion_fig2ab},
      {"Hausdorff trend in n", criterion_fig2cd},
      {"robust Voronoi recovery", criterion_recovery},
      {"CLI rerun determinism", criterion_cli_determinism},
  };
  int failures = 0;
  int idx = 0;
  for (const auto& c : criteria) {
    ++idx;
    std::string detail;
    bool ok = c.check(detail);
    if (!ok) ++failures;
    std::printf("criterion %2d %s  %s: %s\n", idx, ok ? "PASS" : "FAIL", c.name,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
  return failures;
}
