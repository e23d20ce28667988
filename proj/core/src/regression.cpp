#include "cclust/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cclust/parallel.hpp"

namespace cclust {

namespace {

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

double ArmRegressionModel::predict(const double* query) const {
  const std::size_t m = train_y.size();
  if (method == RegressionMethod::knn) {
    // Rank training rows by (distance, original row index); average the top k.
    std::vector<std::pair<double, std::size_t>> ranked(m);
    for (std::size_t i = 0; i < m; ++i) {
      ranked[i] = {sq_dist(train_x.data() + i * static_cast<std::size_t>(d), query, d), i};
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(kk),
                      ranked.end());
    std::vector<std::size_t> chosen(kk);
    for (std::size_t i = 0; i < kk; ++i) chosen[i] = ranked[i].second;
    std::sort(chosen.begin(), chosen.end());  // canonical summation order
    double sum = 0.0;
    for (std::size_t i : chosen) sum += train_y[i];
    return sum / static_cast<double>(kk);
  }
  // Nadaraya-Watson with the triangular radial kernel; the normalizing
  // constant cancels between numerator and denominator.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double dist = std::sqrt(sq_dist(train_x.data() + i * static_cast<std::size_t>(d), query, d));
    double w = 1.0 - dist / bandwidth;
    if (w > 0.0) {
      num += w * train_y[i];
      den += w;
    }
  }
  if (den > 0.0) return num / den;
  // Every training point is outside the bandwidth: fall back to the nearest
  // neighbor so predictions stay within the observed outcome range.
  std::size_t best = 0;
  double best_d = sq_dist(train_x.data(), query, d);
  for (std::size_t i = 1; i < m; ++i) {
    double dist = sq_dist(train_x.data() + i * static_cast<std::size_t>(d), query, d);
    if (dist < best_d) {
      best_d = dist;
      best = i;
    }
  }
  return train_y[best];
}

ArmRegressionModel fit_arm(const ObservationTable& table, int arm, RegressionMethod method,
                           RegressionHyperparams hyper, const SplitPlan& split) {
  if (arm < 1 || arm > table.q) {
    throw validation_error("arm " + std::to_string(arm) + " outside {1.." +
                           std::to_string(table.q) + "}");
  }
  ArmRegressionModel model;
  model.arm = arm;
  model.method = method;
  model.d = table.d;
  for (std::size_t idx : split.fit_indices) {
    if (table.a[idx] != arm) continue;
    model.training_rows.push_back(idx);
    const double* xi = table.row(idx);
    model.train_x.insert(model.train_x.end(), xi, xi + table.d);
    model.train_y.push_back(table.y[idx]);
  }
  const std::size_t n_a = model.train_y.size();
  if (n_a == 0) {
    throw validation_error("arm " + std::to_string(arm) + " absent from fit split");
  }
  if (method == RegressionMethod::knn) {
    int k = hyper.k;
    if (k <= 0) k = static_cast<int>(std::ceil(std::pow(static_cast<double>(n_a), 2.0 / 3.0)));
    if (static_cast<std::size_t>(k) > n_a) {
      throw validation_error("k=" + std::to_string(k) + " exceeds " + std::to_string(n_a) +
                             " fit rows in arm " + std::to_string(arm));
    }
    model.k = k;
  } else {
    double bw = hyper.bandwidth;
    if (bw <= 0.0) {
      // Default: lower median of all pairwise training distances.
      std::vector<double> dists;
      dists.reserve(n_a * (n_a - 1) / 2);
      for (std::size_t i = 0; i < n_a; ++i) {
        for (std::size_t j = i + 1; j < n_a; ++j) {
          dists.push_back(std::sqrt(sq_dist(model.train_x.data() + i * static_cast<std::size_t>(table.d),
                                            model.train_x.data() + j * static_cast<std::size_t>(table.d),
                                            table.d)));
        }
      }
      if (dists.empty()) {
        bw = 1.0;
      } else {
        auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        bw = *mid;
        if (bw <= 0.0) bw = 1.0;  // all training points identical
      }
    }
    model.bandwidth = bw;
  }
  return model;
}

CounterfactualMatrix project(const std::vector<ArmRegressionModel>& models,
                             const ObservationTable& table, const SplitPlan& split,
                             Parametrization parametrization) {
  const int q = table.q;
  if (static_cast<int>(models.size()) != q) {
    throw validation_error("need exactly one model per arm 1.." + std::to_string(q));
  }
  std::vector<const ArmRegressionModel*> by_arm(static_cast<std::size_t>(q), nullptr);
  for (const auto& m : models) {
    if (m.arm < 1 || m.arm > q || by_arm[static_cast<std::size_t>(m.arm - 1)] != nullptr) {
      throw validation_error("missing or duplicate arm model");
    }
    by_arm[static_cast<std::size_t>(m.arm - 1)] = &m;
  }
  CounterfactualMatrix out;
  out.parametrization = parametrization;
  out.n = split.project_indices.size();
  out.q = parametrization == Parametrization::levels ? q : q - 1;
  if (out.q < 1) throw validation_error("contrasts need q >= 2 arms");
  out.points.assign(out.n * static_cast<std::size_t>(out.q), 0.0);

  parallel_for(0, out.n, [&](std::size_t r) {
    const double* query = table.row(split.project_indices[r]);
    double* dst = out.points.data() + r * static_cast<std::size_t>(out.q);
    if (parametrization == Parametrization::levels) {
      for (int a = 0; a < q; ++a) dst[a] = by_arm[static_cast<std::size_t>(a)]->predict(query);
    } else {
      const double mu1 = by_arm[0]->predict(query);
      for (int a = 1; a < q; ++a) {
        dst[a - 1] = by_arm[static_cast<std::size_t>(a)]->predict(query) - mu1;
      }
    }
  });
  for (double v : out.points) {
    if (!std::isfinite(v)) throw numeric_error("non-finite projection value");
  }
  return out;
}

ProjectionError empirical_projection_error(const CounterfactualMatrix& matrix) {
  if (!matrix.truth) throw validation_error("projection error requires truth columns");
  ProjectionError err;
  err.per_arm_l1.assign(static_cast<std::size_t>(matrix.q), 0.0);
  const std::size_t n = matrix.n;
  double sum_l2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = matrix.row(i);
    const double* t = matrix.truth_row(i);
    double s = 0.0;
    for (int j = 0; j < matrix.q; ++j) {
      double diff = p[j] - t[j];
      s += diff * diff;
      err.per_arm_l1[static_cast<std::size_t>(j)] += std::abs(diff);
    }
    sum_l2 += std::sqrt(s);
  }
  err.mean_l2 = sum_l2 / static_cast<double>(n);
  for (double& v : err.per_arm_l1) v /= static_cast<double>(n);
  return err;
}

}  // namespace cclust
