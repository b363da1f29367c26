#include "htmsp/f1_metrics.hpp"

#include <algorithm>

#include "htmsp/errors.hpp"

namespace htmsp {

ConfusionCounts ConfusionCounts::from_matrix(std::vector<std::vector<std::int64_t>> matrix) {
  ConfusionCounts c;
  const std::size_t clusters = matrix.empty() ? 0 : matrix.front().size();
  c.n_i.assign(matrix.size(), 0);
  c.n_j.assign(clusters, 0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != clusters) throw InputError("confusion matrix rows have unequal length");
    for (std::size_t j = 0; j < clusters; ++j) {
      if (matrix[i][j] < 0) throw InputError("confusion counts must be non-negative");
      c.n_i[i] += matrix[i][j];
      c.n_j[j] += matrix[i][j];
    }
    c.n += c.n_i[i];
  }
  c.n_ij = std::move(matrix);
  return c;
}

ConfusionCounts ConfusionCounts::from_labels(std::span<const std::size_t> truth,
                                             std::span<const std::size_t> assigned, std::size_t k) {
  if (truth.size() != assigned.size()) throw InputError("label sequences differ in length");
  std::vector<std::vector<std::int64_t>> m(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= k || assigned[i] >= k) throw InputError("label index out of range");
    ++m[truth[i]][assigned[i]];
  }
  return from_matrix(std::move(m));
}

F1Report f1_report(const ConfusionCounts& counts) {
  if (counts.n <= 0) throw ComputationError("F1 requires at least one item");
  const std::size_t classes = counts.n_ij.size();
  const std::size_t clusters = counts.n_j.size();
  F1Report r;
  r.recall.assign(classes, std::vector<double>(clusters, 0.0));
  r.precision.assign(classes, std::vector<double>(clusters, 0.0));
  r.f.assign(classes, std::vector<double>(clusters, 0.0));
  r.best_f.assign(classes, 0.0);
  double weighted = 0.0;  // divided by n once, so a perfect matrix gives exactly 1
  for (std::size_t i = 0; i < classes; ++i) {
    if (counts.n_i[i] == 0) {
      r.warnings.push_back("class " + std::to_string(i) + " has no items; excluded from F1");
      continue;
    }
    for (std::size_t j = 0; j < clusters; ++j) {
      const double nij = static_cast<double>(counts.n_ij[i][j]);
      const double rec = nij / static_cast<double>(counts.n_i[i]);
      const double prec = counts.n_j[j] > 0 ? nij / static_cast<double>(counts.n_j[j]) : 0.0;
      r.recall[i][j] = rec;
      r.precision[i][j] = prec;
      r.f[i][j] = prec + rec > 0.0 ? 2.0 * rec * prec / (prec + rec) : 0.0;
    }
    if (clusters > 0) r.best_f[i] = *std::max_element(r.f[i].begin(), r.f[i].end());
    weighted += static_cast<double>(counts.n_i[i]) * r.best_f[i];
  }
  r.f1 = weighted / static_cast<double>(counts.n);
  return r;
}

}  // namespace htmsp
