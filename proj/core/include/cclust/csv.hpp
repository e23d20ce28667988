#pragma once

#include <string>
#include <vector>

#include "cclust/types.hpp"

namespace cclust {

/// Format a double with 17 significant digits, enough to round-trip exactly.
std::string format_double(double v);

/// Parse a double; throws validation_error on garbage or trailing junk.
double parse_double(const std::string& s, const std::string& context);

/// ObservationTable CSV: header `y,a,x1,...,xd`, one row per unit.
ObservationTable read_table_csv(const std::string& path);
void write_table_csv(const std::string& path, const ObservationTable& table);

/// CounterfactualMatrix CSV: header `mu1,...,muq` in levels mode or
/// `tau2,...,tauq` in contrasts mode. Truth columns are not serialized;
/// simulations write a second file for the truth matrix.
CounterfactualMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const CounterfactualMatrix& matrix,
                      bool write_truth = false);

/// ClusterLabeling CSV: header `label`, one integer per row, 0 = noise.
ClusterLabeling read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const ClusterLabeling& labeling);

/// Write a whole text file (used for JSON reports); throws on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cclust
