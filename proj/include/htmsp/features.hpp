#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htmsp/binary_frame.hpp"

namespace htmsp {

/// Per-video activation frequency of every column (or input bit), each in [0, 1].
struct SdrHistogram {
  std::vector<double> counts;
  std::optional<std::string> label;
};

/// counts[c] = (frames in which column c is active) / frames.
SdrHistogram accumulate_histogram(std::span<const std::vector<int>> sdr_sequence, int num_columns,
                                  int frames);

/// Running form of accumulate_histogram, usable frame by frame.
class HistogramAccumulator {
 public:
  explicit HistogramAccumulator(int dimension) : hits_(dimension, 0) {}

  void add_active(std::span<const int> active);
  /// Encoder bits used directly as the activation pattern.
  void add_bits(const BinaryFrame& frame);
  int frames() const { return frames_; }
  SdrHistogram finish(int frames) const;
  SdrHistogram finish() const { return finish(frames_); }

 private:
  std::vector<int> hits_;
  std::vector<int> stamp_;
  int frames_ = 0;
};

/// Concatenates histograms (multi-instance feature fusion).
SdrHistogram concatenate(std::span<const SdrHistogram> parts);

}  // namespace htmsp
