#include "cclust/validate.hpp"

#include <cmath>

namespace cclust {

ValidationReport validate_table(const ObservationTable& table) {
  ValidationReport rep;
  rep.arm_counts.assign(table.q > 0 ? static_cast<std::size_t>(table.q) : 0, 0);
  if (table.q < 1) {
    rep.issues.push_back("arm count q must be >= 1");
    return rep;
  }
  if (table.d < 1) {
    rep.issues.push_back("covariate dimension d must be >= 1");
    return rep;
  }
  const std::size_t n = table.n();
  if (table.a.size() != n) {
    rep.issues.push_back("arm column length mismatch");
    return rep;
  }
  if (table.x.size() != n * static_cast<std::size_t>(table.d)) {
    rep.issues.push_back("covariate storage length mismatch");
    return rep;
  }
  bool arm_range_reported = false;
  bool bad_y_reported = false;
  bool bad_x_reported = false;
  for (std::size_t i = 0; i < n; ++i) {
    const int a = table.a[i];
    if (a < 1 || a > table.q) {
      if (!arm_range_reported) {
        rep.issues.push_back("arm out of range at row " + std::to_string(i));
        arm_range_reported = true;
      }
    } else {
      ++rep.arm_counts[static_cast<std::size_t>(a - 1)];
    }
    if (!std::isfinite(table.y[i]) && !bad_y_reported) {
      rep.issues.push_back("non-finite outcome at row " + std::to_string(i));
      bad_y_reported = true;
    }
    const double* xi = table.row(i);
    for (int j = 0; j < table.d; ++j) {
      if (!std::isfinite(xi[j])) {
        if (!bad_x_reported) {
          rep.issues.push_back("non-finite covariate at row " + std::to_string(i) +
                               " column x" + std::to_string(j + 1));
          bad_x_reported = true;
        }
        break;
      }
    }
  }
  for (int a = 1; a <= table.q; ++a) {
    if (rep.arm_counts[static_cast<std::size_t>(a - 1)] == 0) {
      rep.issues.push_back("empty arm " + std::to_string(a));
    }
  }
  rep.ok = rep.issues.empty();
  return rep;
}

void require_valid(const ObservationTable& table) {
  ValidationReport rep = validate_table(table);
  if (!rep.ok) throw validation_error(rep.issues.front());
}

}  // namespace cclust
