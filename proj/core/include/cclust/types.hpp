#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cclust {

/// Raised when input data violates a documented contract (bad table, bad
/// flag value, mismatched shapes). CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a computation degenerates numerically (NaN/Inf where finite
/// values are required). CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raw sample of (outcome, arm, covariates) rows.
/// Arms are 1-based: every label lies in {1..q}.
struct ObservationTable {
  std::vector<double> y;  // outcome per row
  std::vector<int> a;     // treatment arm per row, in {1..q}
  std::vector<double> x;  // row-major covariates, n*d entries
  int q = 0;              // arm count
  int d = 0;              // covariate dimension

  std::size_t n() const { return y.size(); }
  const double* row(std::size_t i) const { return x.data() + i * static_cast<std::size_t>(d); }
};

/// How counterfactual mean vectors are laid out per row.
enum class Parametrization {
  levels,    // (mu_1, ..., mu_q), q columns
  contrasts  // (mu_2 - mu_1, ..., mu_q - mu_1), q - 1 columns
};

/// n x q matrix of projected points, one row per unit. `truth` carries the
/// noiseless rows in simulations and is absent on real data.
struct CounterfactualMatrix {
  std::vector<double> points;               // row-major, n*q entries
  std::optional<std::vector<double>> truth; // same shape when present
  Parametrization parametrization = Parametrization::levels;
  std::size_t n = 0;
  int q = 0;  // columns actually stored (q - 1 in contrasts mode)

  const double* row(std::size_t i) const { return points.data() + i * static_cast<std::size_t>(q); }
  const double* truth_row(std::size_t i) const { return truth->data() + i * static_cast<std::size_t>(q); }
};

/// Flat clustering. Label 0 is reserved for noise/unassigned points;
/// labels 1..k_max are cluster ids, each with at least one member.
struct ClusterLabeling {
  std::vector<int> labels;
  int k_max = 0;
};

/// Set-distance flavor used by agglomerative clustering.
enum class LinkageKind { single, average, complete };

inline const char* to_string(LinkageKind k) {
  switch (k) {
    case LinkageKind::single: return "single";
    case LinkageKind::average: return "average";
    case LinkageKind::complete: return "complete";
  }
  return "?";
}

}  // namespace cclust
