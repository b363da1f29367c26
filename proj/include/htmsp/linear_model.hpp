#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "htmsp/features.hpp"

namespace htmsp {

/// One-vs-rest linear classifier: score_k(x) = weights[k] . x + biases[k].
struct LinearModel {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;

  std::size_t dimension() const { return weights.empty() ? 0 : weights.front().size(); }
  bool operator==(const LinearModel&) const = default;
};

struct SvmHyper {
  double lambda = 1e-4;
  int epochs = 50;
  std::uint64_t seed = 1;
};

/// Pegasos-style stochastic subgradient descent on the hinge loss, one binary
/// problem per class. Features are centered on the training mean (folded back
/// into the bias) and augmented with a constant bias feature. `classes` fixes
/// the class order; when empty, labels are ordered by first appearance.
LinearModel train_classifier(std::span<const SdrHistogram> features, const SvmHyper& hyper,
                             std::vector<std::string> classes = {});

std::vector<double> class_scores(const LinearModel& model, std::span<const double> x);

/// Index of the highest score; ties go to the earlier class.
std::size_t predict_index(const LinearModel& model, std::span<const double> x);

std::string predict(const LinearModel& model, const SdrHistogram& feature);

}  // namespace htmsp
