#include "cclust/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cclust/rng.hpp"

namespace cclust {

const char* to_string(SimVariant v) {
  switch (v) {
    case SimVariant::voronoi10:
      return "voronoi10";
    case SimVariant::gauss3:
      return "gauss3";
  }
  return "?";
}

namespace {

constexpr std::size_t kVoronoiCenters = 10;
constexpr int kVoronoiDim = 3;

// Draws centers uniformly, re-drawing any that lands within min_sep of an
// earlier one; after 200 failed tries for a single center the whole set
// restarts so the accepted configuration stays exchangeable.
std::vector<double> draw_centers(Rng& rng, double min_sep) {
  std::vector<double> centers(kVoronoiCenters * kVoronoiDim);
  const double min_sep_sq = min_sep * min_sep;
  while (true) {
    bool restart = false;
    for (std::size_t c = 0; c < kVoronoiCenters && !restart; ++c) {
      int tries = 0;
      while (true) {
        for (int j = 0; j < kVoronoiDim; ++j) {
          centers[c * kVoronoiDim + j] = rng.uniform();
        }
        bool ok = true;
        if (min_sep > 0.0) {
          for (std::size_t p = 0; p < c; ++p) {
            double s = 0.0;
            for (int j = 0; j < kVoronoiDim; ++j) {
              double diff = centers[c * kVoronoiDim + j] - centers[p * kVoronoiDim + j];
              s += diff * diff;
            }
            if (s < min_sep_sq) {
              ok = false;
              break;
            }
          }
        }
        if (ok) break;
        if (++tries >= 200) {
          restart = true;
          break;
        }
      }
    }
    if (!restart) return centers;
  }
}

}  // namespace

std::pair<CounterfactualMatrix, ClusterLabeling> gen_voronoi(const SimConfig& config) {
  return gen_voronoi(config, nullptr);
}

std::pair<CounterfactualMatrix, ClusterLabeling> gen_voronoi(const SimConfig& config,
                                                             std::vector<double>* centers_out) {
  if (config.n < 10) throw validation_error("voronoi10 needs n >= 10");
  if (!(config.nu >= 0.0 && config.nu < 1.0)) throw validation_error("nu must lie in [0,1)");
  if (!(config.sigma_voronoi > 0.0)) throw validation_error("sigma_voronoi must be positive");
  if (config.min_center_sep < 0.0 || config.min_center_sep > 1.0) {
    throw validation_error("min_center_sep must lie in [0,1]");
  }
  const std::size_t n = config.n;
  Rng rng(config.seed);
  std::vector<double> centers = draw_centers(rng, config.min_center_sep);
  if (centers_out) *centers_out = centers;

  std::vector<std::size_t> counts(kVoronoiCenters, n / kVoronoiCenters);
  for (std::size_t c = 0; c < n % kVoronoiCenters; ++c) ++counts[c];

  CounterfactualMatrix m;
  m.n = n;
  m.q = kVoronoiDim;
  m.parametrization = Parametrization::levels;
  m.points.resize(n * kVoronoiDim);
  ClusterLabeling truth;
  truth.labels.assign(n, 0);
  truth.k_max = static_cast<int>(kVoronoiCenters);

  std::size_t row = 0;
  for (std::size_t c = 0; c < kVoronoiCenters; ++c) {
    const double* mu = centers.data() + c * kVoronoiDim;
    for (std::size_t r = 0; r < counts[c]; ++r, ++row) {
      double* x = m.points.data() + row * kVoronoiDim;
      while (true) {
        bool in_box = true;
        for (int j = 0; j < kVoronoiDim; ++j) {
          x[j] = mu[j] + config.sigma_voronoi * rng.normal();
          if (x[j] < 0.0 || x[j] > 1.0) in_box = false;
        }
        if (!in_box) continue;
        // Strictly nearest to its own center; exact ties force a redraw.
        double own = 0.0;
        for (int j = 0; j < kVoronoiDim; ++j) {
          double diff = x[j] - mu[j];
          own += diff * diff;
        }
        bool nearest = true;
        for (std::size_t p = 0; p < kVoronoiCenters; ++p) {
          if (p == c) continue;
          double s = 0.0;
          for (int j = 0; j < kVoronoiDim; ++j) {
            double diff = x[j] - centers[p * kVoronoiDim + j];
            s += diff * diff;
          }
          if (s <= own) {
            nearest = false;
            break;
          }
        }
        if (nearest) break;
      }
      truth.labels[row] = static_cast<int>(c) + 1;
    }
  }

  const std::size_t n_noise = static_cast<std::size_t>(std::llround(config.nu * static_cast<double>(n)));
  if (n_noise > 0) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < n_noise; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(perm[i], perm[j]);
    }
    std::sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_noise));
    for (std::size_t i = 0; i < n_noise; ++i) {
      double* x = m.points.data() + perm[i] * kVoronoiDim;
      for (int j = 0; j < kVoronoiDim; ++j) x[j] = rng.uniform();
      truth.labels[perm[i]] = 0;
    }
  }

  m.truth = m.points;
  return {std::move(m), std::move(truth)};
}

std::pair<CounterfactualMatrix, ClusterLabeling> gen_gauss3(const SimConfig& config) {
  if (config.n < 3) throw validation_error("gauss3 needs n >= 3");
  if (!(config.sigma_gauss > 0.0)) throw validation_error("sigma_gauss must be positive");
  static const double kMeans[3][2] = {{0.0, 0.0}, {1.5, 0.0}, {0.75, 1.3}};
  const std::size_t n = config.n;
  Rng rng(config.seed);

  std::vector<std::size_t> counts(3, n / 3);
  for (std::size_t c = 0; c < n % 3; ++c) ++counts[c];

  CounterfactualMatrix m;
  m.n = n;
  m.q = 2;
  m.parametrization = Parametrization::levels;
  m.points.resize(n * 2);
  ClusterLabeling truth;
  truth.labels.assign(n, 0);
  truth.k_max = 3;

  std::size_t row = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < counts[c]; ++r, ++row) {
      m.points[row * 2 + 0] = kMeans[c][0] + config.sigma_gauss * rng.normal();
      m.points[row * 2 + 1] = kMeans[c][1] + config.sigma_gauss * rng.normal();
      truth.labels[row] = static_cast<int>(c) + 1;
    }
  }
  m.truth = m.points;
  return {std::move(m), std::move(truth)};
}

CounterfactualMatrix perturb(const CounterfactualMatrix& matrix, double beta,
                             std::uint64_t seed, double variance_override) {
  if (beta < 0.0) throw validation_error("beta must be nonnegative");
  if (matrix.n == 0) throw validation_error("empty matrix");
  CounterfactualMatrix out = matrix;
  out.truth = matrix.points;
  if (beta >= 50.0 && variance_override <= 0.0) return out;
  double variance = variance_override > 0.0
                        ? variance_override
                        : std::pow(static_cast<double>(matrix.n), -beta);
  const double sd = std::sqrt(variance);
  Rng rng(seed);
  for (double& v : out.points) v += sd * rng.normal();
  return out;
}

ObservationTable make_observation_table(const CounterfactualMatrix& matrix, double noise_sd,
                                        std::uint64_t seed) {
  if (!matrix.truth) throw validation_error("observation table needs truth columns");
  if (noise_sd < 0.0) throw validation_error("noise_sd must be nonnegative");
  const std::size_t n = matrix.n;
  const int q = matrix.q;
  ObservationTable t;
  t.q = q;
  t.d = q;
  t.y.resize(n);
  t.a.resize(n);
  t.x.resize(n * static_cast<std::size_t>(q));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double* mu = matrix.truth_row(i);
    int arm = 1 + static_cast<int>(i % static_cast<std::size_t>(q));
    t.a[i] = arm;
    for (int c = 0; c < q; ++c) t.x[i * static_cast<std::size_t>(q) + c] = mu[c];
    t.y[i] = mu[arm - 1] + noise_sd * rng.normal();
  }
  return t;
}

}  // namespace cclust
