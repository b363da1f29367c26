#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "htmsp/errors.hpp"
#include "htmsp/f1_metrics.hpp"
#include "htmsp/features.hpp"
#include "htmsp/linear_model.hpp"
#include "htmsp/random.hpp"

using namespace htmsp;

namespace {

SdrHistogram labeled(std::vector<double> x, std::string label) { return {std::move(x), std::move(label)}; }

// Clustering F-measure evaluated straight from a count matrix.
double f1_oracle(const std::vector<std::vector<std::int64_t>>& m) {
  const std::size_t k = m.size(), c = m[0].size();
  std::vector<double> ni(k, 0), nj(c, 0);
  double n = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      ni[i] += m[i][j];
      nj[j] += m[i][j];
      n += m[i][j];
    }
  double total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (ni[i] == 0) continue;
    double best = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (nj[j] == 0 || m[i][j] == 0) continue;
      const double r = m[i][j] / ni[i], p = m[i][j] / nj[j];
      best = std::max(best, 2 * r * p / (r + p));
    }
    total += ni[i] / n * best;
  }
  return total;
}

std::vector<std::vector<std::int64_t>> random_matrix(Rng& rng) {
  const auto k = 1 + uniform_below(rng, 7);
  const auto c = 1 + uniform_below(rng, 7);
  std::vector<std::vector<std::int64_t>> m(k, std::vector<std::int64_t>(c));
  std::int64_t total = 0;
  for (auto& row : m)
    for (auto& v : row) {
      v = uniform_unit(rng) < 0.3 ? 0 : static_cast<std::int64_t>(uniform_below(rng, 20));
      total += v;
    }
  if (total == 0) m[0][0] = 1;
  return m;
}

}  // namespace

TEST(Histogram, AlwaysActiveColumnIsOne) {
  std::vector<std::vector<int>> seq(32, std::vector<int>{3});
  const auto h = accumulate_histogram(seq, 5, 32);
  EXPECT_EQ(h.counts, (std::vector<double>{0, 0, 0, 1.0, 0}));
}

TEST(Histogram, EmptyActivityIsZero) {
  std::vector<std::vector<int>> seq(32);
  EXPECT_EQ(accumulate_histogram(seq, 4, 32).counts, std::vector<double>(4, 0.0));
}

TEST(Histogram, QuarterActivity) {
  std::vector<std::vector<int>> seq(32);
  for (int t = 0; t < 32; t += 4) seq[t] = {1};
  EXPECT_DOUBLE_EQ(accumulate_histogram(seq, 2, 32).counts[1], 0.25);
}

TEST(Histogram, RejectsOutOfRangeAndBadFrameCounts) {
  std::vector<std::vector<int>> seq{{0, 4}};
  EXPECT_THROW(accumulate_histogram(seq, 4, 1), InputError);
  seq = {{-1}};
  EXPECT_THROW(accumulate_histogram(seq, 4, 1), InputError);
  seq = {{0}, {1}};
  EXPECT_THROW(accumulate_histogram(seq, 4, 1), InputError);
  EXPECT_THROW(accumulate_histogram(seq, 4, 0), InputError);
}

TEST(Histogram, EncoderBitsAndConcatenation) {
  HistogramAccumulator acc(4);
  acc.add_bits(BinaryFrame(std::vector<std::uint8_t>{1, 0, 1, 0}));
  acc.add_bits(BinaryFrame(std::vector<std::uint8_t>{1, 1, 0, 0}));
  auto a = acc.finish();
  EXPECT_EQ(a.counts, (std::vector<double>{1.0, 0.5, 0.5, 0.0}));
  EXPECT_THROW(acc.add_bits(BinaryFrame(3)), InputError);
  a.label = "cube";
  const std::vector<SdrHistogram> parts{a, SdrHistogram{{0.25}, std::nullopt}};
  const auto joined = concatenate(parts);
  EXPECT_EQ(joined.counts, (std::vector<double>{1.0, 0.5, 0.5, 0.0, 0.25}));
  EXPECT_EQ(joined.label, "cube");
}

TEST(HistogramProperty, ConservesActivations) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = 1 + static_cast<int>(uniform_below(rng, 64));
    const int frames = 1 + static_cast<int>(uniform_below(rng, 40));
    std::vector<std::vector<int>> seq(frames);
    std::size_t distinct = 0;
    for (auto& active : seq) {
      std::vector<bool> on(dim);
      const auto k = uniform_below(rng, static_cast<std::uint64_t>(dim) + 1);
      for (std::uint64_t i = 0; i < k; ++i) {
        const int c = static_cast<int>(uniform_below(rng, dim));
        active.push_back(c);
        if (!on[c]) ++distinct;
        on[c] = true;
      }
    }
    const auto h = accumulate_histogram(seq, dim, frames);
    double mass = 0;
    for (double v : h.counts) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      mass += v * frames;
    }
    ASSERT_NEAR(mass, static_cast<double>(distinct), 1e-9) << "trial " << trial;
  }
}

TEST(Classifier, SeparableSingletons) {
  const std::vector<SdrHistogram> data{labeled({1.0, 0.0}, "a"), labeled({0.0, 1.0}, "b")};
  const auto model = train_classifier(data, {});
  EXPECT_EQ(model.classes, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(predict(model, data[0]), "a");
  EXPECT_EQ(predict(model, data[1]), "b");
}

TEST(Classifier, DeterministicForSeed) {
  Rng rng(4);
  std::vector<SdrHistogram> data;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> x(8);
    for (auto& v : x) v = uniform_unit(rng);
    data.push_back(labeled(x, i % 3 == 0 ? "x" : (i % 3 == 1 ? "y" : "z")));
  }
  SvmHyper h;
  h.seed = 9;
  EXPECT_EQ(train_classifier(data, h), train_classifier(data, h));
  auto other = h;
  other.seed = 10;
  EXPECT_NE(train_classifier(data, h).weights, train_classifier(data, other).weights);
}

TEST(Classifier, SixGaussianBlobs) {
  Rng rng(2024);
  std::normal_distribution<double> noise(0.0, 0.04);
  const int dim = 24, per_class = 30;
  std::vector<std::vector<double>> centers(6, std::vector<double>(dim));
  for (auto& c : centers)
    for (auto& v : c) v = uniform_unit(rng);
  std::vector<SdrHistogram> data;
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> x(dim);
      for (int d = 0; d < dim; ++d) x[d] = centers[k][d] + noise(rng);
      data.push_back(labeled(x, "c" + std::to_string(k)));
    }
  // Every point is strictly nearer its own center, so the blobs are separable.
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto own = s / per_class;
    auto dist = [&](std::size_t k) {
      double d2 = 0;
      for (int d = 0; d < dim; ++d) d2 += std::pow(data[s].counts[d] - centers[k][d], 2);
      return d2;
    };
    for (std::size_t k = 0; k < 6; ++k)
      if (k != own) ASSERT_LT(dist(own), dist(k));
  }
  const auto model = train_classifier(data, {});
  int correct = 0;
  for (const auto& x : data) correct += predict(model, x) == *x.label;
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(data.size()), 0.95);
}

TEST(Classifier, InputErrors) {
  const std::vector<SdrHistogram> one_class{labeled({1.0}, "a"), labeled({0.5}, "a")};
  EXPECT_THROW(train_classifier(one_class, {}), ConfigError);
  const std::vector<SdrHistogram> ragged{labeled({1.0}, "a"), labeled({0.5, 0.1}, "b")};
  EXPECT_THROW(train_classifier(ragged, {}), InputError);
  const std::vector<SdrHistogram> unlabeled{labeled({1.0}, "a"), SdrHistogram{{0.5}, std::nullopt}};
  EXPECT_THROW(train_classifier(unlabeled, {}), InputError);
  EXPECT_THROW(train_classifier(std::vector<SdrHistogram>{}, {}), ConfigError);
}

TEST(Predict, ZeroVectorPicksLargestBias) {
  LinearModel m{{"a", "b", "c"}, {{1, 2}, {3, 4}, {5, 6}}, {0.1, 0.7, -0.2}};
  EXPECT_EQ(predict(m, SdrHistogram{{0, 0}, std::nullopt}), "b");
}

TEST(Predict, TiesGoToEarlierClass) {
  LinearModel m{{"c0", "c1", "c2", "c3", "c4"}, std::vector<std::vector<double>>(5, {0.0}), {0, 0, 1, 0, 1}};
  EXPECT_EQ(predict_index(m, std::vector<double>{0.3}), 2u);
}

TEST(Predict, DimensionMismatch) {
  LinearModel m{{"a", "b"}, {{1, 2}, {3, 4}}, {0, 0}};
  EXPECT_THROW(predict(m, SdrHistogram{{1.0}, std::nullopt}), InputError);
}

TEST(F1, DiagonalIsExactlyOne) {
  const auto r = f1_report(ConfusionCounts::from_matrix({{20, 0, 0, 0, 0, 0},
                                                          {0, 20, 0, 0, 0, 0},
                                                          {0, 0, 20, 0, 0, 0},
                                                          {0, 0, 0, 20, 0, 0},
                                                          {0, 0, 0, 0, 20, 0},
                                                          {0, 0, 0, 0, 0, 20}}));
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(F1, HandEvaluatedTwoByTwo) {
  const auto r = f1_report(ConfusionCounts::from_matrix({{1, 1}, {0, 2}}));
  EXPECT_NEAR(r.best_f[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.best_f[1], 0.8, 1e-12);
  EXPECT_NEAR(r.f1, 0.7333333333333333, 1e-9);
  EXPECT_NEAR(r.recall[0][1], 0.5, 1e-12);
  EXPECT_NEAR(r.precision[0][1], 1.0 / 3.0, 1e-12);
}

TEST(F1, EmptyClusterScoresZero) {
  const auto r = f1_report(ConfusionCounts::from_matrix({{3, 0}, {2, 0}}));
  EXPECT_EQ(r.f[0][1], 0.0);
  EXPECT_EQ(r.f[1][1], 0.0);
  EXPECT_NEAR(r.f1, f1_oracle({{3, 0}, {2, 0}}), 1e-12);
}

TEST(F1, EmptyClassWarnsAndEmptyMatrixFails) {
  const auto r = f1_report(ConfusionCounts::from_matrix({{4, 0}, {0, 0}}));
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_THROW(f1_report(ConfusionCounts::from_matrix({{0, 0}, {0, 0}})), ComputationError);
  EXPECT_THROW(ConfusionCounts::from_matrix({{1, 2}, {3}}), InputError);
}

TEST(F1, FromLabels) {
  const std::vector<std::size_t> truth{0, 0, 1, 1}, assigned{0, 1, 1, 1};
  const auto c = ConfusionCounts::from_labels(truth, assigned, 2);
  EXPECT_EQ(c.n_ij, (std::vector<std::vector<std::int64_t>>{{1, 1}, {0, 2}}));
  EXPECT_EQ(c.n, 4);
  const std::vector<std::size_t> bad{0, 2, 1, 1};
  EXPECT_THROW(ConfusionCounts::from_labels(truth, bad, 2), InputError);
}

TEST(F1Property, BoundedMatchesOracleAndIgnoresClusterOrder) {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    auto m = random_matrix(rng);
    const double f1 = f1_report(ConfusionCounts::from_matrix(m)).f1;
    ASSERT_GE(f1, 0.0);
    ASSERT_LE(f1, 1.0);
    ASSERT_NEAR(f1, f1_oracle(m), 1e-12);
    std::vector<std::size_t> perm(m[0].size());
    std::iota(perm.begin(), perm.end(), 0);
    shuffle_range(perm.begin(), perm.end(), rng);
    auto permuted = m;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < perm.size(); ++j) permuted[i][j] = m[i][perm[j]];
    ASSERT_NEAR(f1_report(ConfusionCounts::from_matrix(permuted)).f1, f1, 1e-12);
  }
}
