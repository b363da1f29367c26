#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace htmsp {

/// n_ij = items of class i assigned to cluster j, with row/column/grand totals.
struct ConfusionCounts {
  std::vector<std::vector<std::int64_t>> n_ij;
  std::vector<std::int64_t> n_i;
  std::vector<std::int64_t> n_j;
  std::int64_t n = 0;

  /// Builds totals from a (classes x clusters) count matrix.
  static ConfusionCounts from_matrix(std::vector<std::vector<std::int64_t>> matrix);
  /// Square matrix from paired true/assigned indices in [0, k).
  static ConfusionCounts from_labels(std::span<const std::size_t> truth,
                                     std::span<const std::size_t> assigned, std::size_t k);
};

struct F1Report {
  std::vector<std::vector<double>> recall;
  std::vector<std::vector<double>> precision;
  std::vector<std::vector<double>> f;
  std::vector<double> best_f;  // max_j F(i, j)
  double f1 = 0.0;
  std::vector<std::string> warnings;
};

/// Clustering F-measure: recall n_ij/n_i, precision n_ij/n_j, harmonic F
/// (0 when P + R = 0 or the cluster is empty) and the class-size weighted
/// sum of each class's best F. Classes with n_i = 0 get weight 0.
F1Report f1_report(const ConfusionCounts& counts);

}  // namespace htmsp
