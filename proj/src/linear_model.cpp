#include "htmsp/linear_model.hpp"

#include <algorithm>
#include <numeric>

#include "htmsp/errors.hpp"
#include "htmsp/random.hpp"

namespace htmsp {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LinearModel train_classifier(std::span<const SdrHistogram> features, const SvmHyper& hyper,
                             std::vector<std::string> classes) {
  if (features.empty()) throw ConfigError("classifier training needs at least one sample");
  if (!(hyper.lambda > 0.0) || hyper.epochs <= 0) {
    throw ConfigError("classifier hyper-parameters: lambda and epochs must be positive");
  }
  const std::size_t dim = features.front().counts.size();
  for (const auto& f : features) {
    if (!f.label) throw InputError("training feature without a label");
    if (f.counts.size() != dim) throw InputError("training features have unequal dimensions");
  }
  if (classes.empty()) {
    for (const auto& f : features) {
      if (std::find(classes.begin(), classes.end(), *f.label) == classes.end()) classes.push_back(*f.label);
    }
  }
  std::vector<int> label_index(features.size());
  std::vector<char> seen(classes.size(), 0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto it = std::find(classes.begin(), classes.end(), *features[i].label);
    if (it == classes.end()) throw InputError("label '" + *features[i].label + "' not in class list");
    label_index[i] = static_cast<int>(it - classes.begin());
    seen[label_index[i]] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) < 2) {
    throw ConfigError("classifier training needs at least two classes present");
  }

  const std::size_t n = features.size();
  const std::size_t aug = dim + 1;
  std::vector<double> mean(dim, 0.0);
  for (const auto& f : features) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += f.counts[d];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<double> data(n * aug);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) data[i * aug + d] = features[i].counts[d] - mean[d];
    data[i * aug + dim] = 1.0;
  }

  // one visiting order per epoch, shared by all binary problems
  std::vector<std::vector<std::size_t>> orders(hyper.epochs);
  Rng rng(hyper.seed);
  for (auto& order : orders) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_range(order.begin(), order.end(), rng);
  }

  LinearModel model;
  model.classes = classes;
  model.weights.assign(classes.size(), std::vector<double>(dim, 0.0));
  model.biases.assign(classes.size(), 0.0);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    // w = scale * v
    std::vector<double> v(aug, 0.0);
    double scale = 1.0;
    std::uint64_t t = 0;
    for (const auto& order : orders) {
      for (std::size_t i : order) {
        ++t;
        const std::span<const double> x(&data[i * aug], aug);
        const double y = label_index[i] == static_cast<int>(k) ? 1.0 : -1.0;
        const double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
        const double margin = y * scale * dot(v, x);
        const double shrink = 1.0 - 1.0 / static_cast<double>(t);
        if (shrink <= 0.0) {
          std::fill(v.begin(), v.end(), 0.0);
          scale = 1.0;
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * y / scale;
          for (std::size_t d = 0; d < aug; ++d) v[d] += step * x[d];
        }
        if (scale < 1e-9) {
          for (auto& e : v) e *= scale;
          scale = 1.0;
        }
      }
    }
    auto& w = model.weights[k];
    for (std::size_t d = 0; d < dim; ++d) w[d] = scale * v[d];
    model.biases[k] = scale * v[dim] - dot(w, mean);
  }
  return model;
}

std::vector<double> class_scores(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) {
    throw InputError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                     std::to_string(model.dimension()));
  }
  std::vector<double> scores(model.classes.size());
  for (std::size_t k = 0; k < scores.size(); ++k) scores[k] = dot(model.weights[k], x) + model.biases[k];
  return scores;
}

std::size_t predict_index(const LinearModel& model, std::span<const double> x) {
  const auto scores = class_scores(model, x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

std::string predict(const LinearModel& model, const SdrHistogram& feature) {
  return model.classes[predict_index(model, feature.counts)];
}

}  // namespace htmsp
