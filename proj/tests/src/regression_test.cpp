#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cclust/regression.hpp"
#include "cclust/rng.hpp"

using namespace cclust;

namespace {

// Table whose rows alternate arms; covariates filled by the caller.
ObservationTable alternating_table(std::size_t n, int q, int d) {
  ObservationTable t;
  t.q = q;
  t.d = d;
  t.y.assign(n, 0.0);
  t.a.resize(n);
  t.x.assign(n * static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.a[i] = 1 + static_cast<int>(i % static_cast<std::size_t>(q));
  }
  return t;
}

SplitPlan whole_table_fit_split(std::size_t n) {
  // Fit on even rows, project the odd ones; deterministic and balanced.
  SplitPlan p;
  for (std::size_t i = 0; i < n; ++i) {
    (i % 2 == 0 ? p.fit_indices : p.project_indices).push_back(i);
  }
  return p;
}

}  // namespace

TEST_CASE("constant outcomes predict the constant") {
  ObservationTable t = alternating_table(20, 2, 1);
  for (std::size_t i = 0; i < 20; ++i) {
    t.y[i] = 3.0;
    t.x[i] = static_cast<double>(i);
  }
  SplitPlan split = whole_table_fit_split(20);
  for (auto method : {RegressionMethod::knn, RegressionMethod::nadaraya_watson}) {
    ArmRegressionModel m = fit_arm(t, 1, method, {}, split);
    double query = 4.2;
    CHECK(m.predict(&query) == 3.0);
  }
}

TEST_CASE("one neighbor at an exact training covariate returns its outcome") {
  ObservationTable t = alternating_table(10, 1, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    t.y[i] = static_cast<double>(i) * 7.0;
    t.x[i] = static_cast<double>(i);
  }
  SplitPlan split = whole_table_fit_split(10);
  RegressionHyperparams hyper;
  hyper.k = 1;
  ArmRegressionModel m = fit_arm(t, 1, RegressionMethod::knn, hyper, split);
  double query = 6.0;  // row 6 is in the fit split
  CHECK(m.predict(&query) == 42.0);
}

TEST_CASE("two neighbors at 0 and 1 average to 1 at the midpoint") {
  ObservationTable t;
  t.q = 1;
  t.d = 1;
  t.y = {0.0, 2.0};
  t.a = {1, 1};
  t.x = {0.0, 1.0};
  SplitPlan split;
  split.fit_indices = {0, 1};
  RegressionHyperparams hyper;
  hyper.k = 2;
  ArmRegressionModel m = fit_arm(t, 1, RegressionMethod::knn, hyper, split);
  double query = 0.5;
  CHECK(m.predict(&query) == 1.0);
}

TEST_CASE("nadaraya-watson weights follow the triangular kernel") {
  ObservationTable t;
  t.q = 1;
  t.d = 1;
  t.y = {0.0, 2.0};
  t.a = {1, 1};
  t.x = {0.0, 1.0};
  SplitPlan split;
  split.fit_indices = {0, 1};
  RegressionHyperparams hyper;
  hyper.bandwidth = 2.0;
  ArmRegressionModel m = fit_arm(t, 1, RegressionMethod::nadaraya_watson, hyper, split);
  double query = 0.0;  // weights 1 and 1 - 0.5
  CHECK(m.predict(&query) == doctest::Approx(2.0 * 0.5 / 1.5).epsilon(1e-15));
}

TEST_CASE("fit_arm rejects bad inputs") {
  ObservationTable t = alternating_table(6, 2, 1);
  SplitPlan split = whole_table_fit_split(6);
  CHECK_THROWS_AS(fit_arm(t, 3, RegressionMethod::knn, {}, split), validation_error);
  RegressionHyperparams too_big;
  too_big.k = 10;
  CHECK_THROWS_AS(fit_arm(t, 1, RegressionMethod::knn, too_big, split), validation_error);
  SplitPlan empty_fit;
  empty_fit.project_indices = {0, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(fit_arm(t, 1, RegressionMethod::knn, {}, empty_fit), validation_error);
}

TEST_CASE("constant per-arm models project to constant rows and contrasts") {
  ObservationTable t = alternating_table(16, 2, 1);
  for (std::size_t i = 0; i < 16; ++i) {
    t.y[i] = t.a[i] == 1 ? 0.0 : 1.0;
    t.x[i] = static_cast<double>(i % 4);
  }
  SplitPlan split;
  for (std::size_t i = 0; i < 16; ++i) {
    // Pairs keep both arms present on each side of the split.
    (i % 4 <= 1 ? split.fit_indices : split.project_indices).push_back(i);
  }
  std::vector<ArmRegressionModel> models = {
      fit_arm(t, 1, RegressionMethod::knn, {}, split),
      fit_arm(t, 2, RegressionMethod::knn, {}, split)};
  CounterfactualMatrix levels = project(models, t, split, Parametrization::levels);
  REQUIRE(levels.n == split.project_indices.size());
  REQUIRE(levels.q == 2);
  for (std::size_t i = 0; i < levels.n; ++i) {
    CHECK(levels.row(i)[0] == 0.0);
    CHECK(levels.row(i)[1] == 1.0);
  }
  CounterfactualMatrix contrasts = project(models, t, split, Parametrization::contrasts);
  REQUIRE(contrasts.q == 1);
  CHECK(contrasts.parametrization == Parametrization::contrasts);
  for (std::size_t i = 0; i < contrasts.n; ++i) {
    CHECK(contrasts.row(i)[0] == 1.0);
  }
}

TEST_CASE("identical arms give the all-zero contrast diagonal") {
  ObservationTable t = alternating_table(20, 2, 2);
  Rng rng(3);
  for (std::size_t i = 0; i < 20; ++i) {
    t.x[i * 2] = rng.uniform();
    t.x[i * 2 + 1] = rng.uniform();
    t.y[i] = t.x[i * 2] + t.x[i * 2 + 1];
  }
  // Make both arms see the same four training points.
  for (std::size_t i = 0; i < 20; i += 4) {
    t.y[i + 1] = t.y[i];
    t.x[(i + 1) * 2] = t.x[i * 2];
    t.x[(i + 1) * 2 + 1] = t.x[i * 2 + 1];
  }
  SplitPlan split;
  for (std::size_t i = 0; i < 20; ++i) {
    (i % 4 <= 1 ? split.fit_indices : split.project_indices).push_back(i);
  }
  RegressionHyperparams hyper;
  hyper.k = 3;
  std::vector<ArmRegressionModel> models = {
      fit_arm(t, 1, RegressionMethod::knn, hyper, split),
      fit_arm(t, 2, RegressionMethod::knn, hyper, split)};
  CounterfactualMatrix contrasts = project(models, t, split, Parametrization::contrasts);
  for (std::size_t i = 0; i < contrasts.n; ++i) {
    CHECK(contrasts.row(i)[0] == 0.0);
  }
}

TEST_CASE("knn projection matches a hand-rolled per-row oracle") {
  Rng rng(41);
  ObservationTable t = alternating_table(60, 2, 2);
  for (std::size_t i = 0; i < 60; ++i) {
    t.x[i * 2] = rng.uniform(-1, 1);
    t.x[i * 2 + 1] = rng.uniform(-1, 1);
    t.y[i] = 2.0 * t.x[i * 2] - t.x[i * 2 + 1] + 0.1 * rng.normal();
  }
  SplitPlan split = make_split(60, 0.5, 9);
  RegressionHyperparams hyper;
  hyper.k = 4;
  std::vector<ArmRegressionModel> models = {
      fit_arm(t, 1, RegressionMethod::knn, hyper, split),
      fit_arm(t, 2, RegressionMethod::knn, hyper, split)};
  CounterfactualMatrix m = project(models, t, split, Parametrization::levels);

  for (std::size_t r = 0; r < split.project_indices.size(); ++r) {
    const double* query = &t.x[split.project_indices[r] * 2];
    for (int arm = 1; arm <= 2; ++arm) {
      // Oracle: rank this arm's fit rows by (squared distance, row index),
      // then average the outcomes of the best k in ascending row order.
      std::vector<std::pair<double, std::size_t>> ranked;
      for (std::size_t idx : split.fit_indices) {
        if (t.a[idx] != arm) continue;
        double dx = t.x[idx * 2] - query[0];
        double dy = t.x[idx * 2 + 1] - query[1];
        ranked.push_back({dx * dx + dy * dy, idx});
      }
      std::sort(ranked.begin(), ranked.end());
      std::vector<std::size_t> chosen;
      for (int j = 0; j < 4; ++j) chosen.push_back(ranked[j].second);
      std::sort(chosen.begin(), chosen.end());
      double sum = 0.0;
      for (std::size_t idx : chosen) sum += t.y[idx];
      CHECK(m.row(r)[arm - 1] == sum / 4.0);
    }
  }
}

TEST_CASE("fitting never touches project rows and predictions stay in range") {
  Rng rng(43);
  ObservationTable t = alternating_table(80, 3, 1);
  for (std::size_t i = 0; i < 80; ++i) {
    t.x[i] = rng.uniform(0, 10);
    t.y[i] = rng.uniform(-5, 5);
  }
  SplitPlan split = make_split(80, 0.5, 21);
  for (int arm = 1; arm <= 3; ++arm) {
    ArmRegressionModel m = fit_arm(t, arm, RegressionMethod::knn, {}, split);
    double lo = 1e300, hi = -1e300;
    for (std::size_t row : m.training_rows) {
      CHECK(t.a[row] == arm);
      CHECK(std::binary_search(split.fit_indices.begin(), split.fit_indices.end(), row));
      lo = std::min(lo, t.y[row]);
      hi = std::max(hi, t.y[row]);
    }
    for (int trial = 0; trial < 50; ++trial) {
      double query = rng.uniform(0, 10);
      double pred = m.predict(&query);
      CHECK(pred >= lo);
      CHECK(pred <= hi);
    }
  }
}

TEST_CASE("projection error matches hand values and the norm inequality") {
  CounterfactualMatrix m;
  m.n = 3;
  m.q = 1;
  m.points = {0.5, 1.5, 2.5};
  m.truth = std::vector<double>{0.0, 1.0, 2.0};
  ProjectionError err = empirical_projection_error(m);
  CHECK(err.mean_l2 == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(err.per_arm_l1.size() == 1);
  CHECK(err.per_arm_l1[0] == doctest::Approx(0.5).epsilon(1e-15));

  m.points = *m.truth;
  err = empirical_projection_error(m);
  CHECK(err.mean_l2 == 0.0);
  CHECK(err.per_arm_l1[0] == 0.0);

  CounterfactualMatrix no_truth;
  no_truth.n = 1;
  no_truth.q = 1;
  no_truth.points = {1.0};
  CHECK_THROWS_AS(empirical_projection_error(no_truth), validation_error);

  // Row-wise ||.||_2 <= ||.||_1 makes the aggregate inequality exact.
  Rng rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    CounterfactualMatrix r;
    r.n = 1 + rng.below(40);
    r.q = 1 + static_cast<int>(rng.below(4));
    r.truth.emplace();
    for (std::size_t i = 0; i < r.n * static_cast<std::size_t>(r.q); ++i) {
      r.truth->push_back(rng.normal());
      r.points.push_back(r.truth->back() + 0.3 * rng.normal());
    }
    ProjectionError e = empirical_projection_error(r);
    double l1_total = 0.0;
    for (double v : e.per_arm_l1) l1_total += v;
    CHECK(e.mean_l2 <= l1_total + 1e-12);
  }
}
