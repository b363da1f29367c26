#pragma once

#include <vector>

#include "htmsp/binary_frame.hpp"
#include "htmsp/gray_frame.hpp"

namespace htmsp {

struct EncoderConfig {
  int target_width = 240;
  int target_height = 134;
  int block_size = 11;
  double bias_c = 2.0;
  /// <= 0 selects 0.3 * ((block_size - 1) * 0.5 - 1) + 0.8.
  double gaussian_sigma = 0.0;

  double effective_sigma() const;
  int output_size() const { return target_width * target_height; }
  void validate() const;

  bool operator==(const EncoderConfig&) const = default;
};

/// Normalized 1-D Gaussian window of length block_size.
std::vector<double> gaussian_window(int block_size, double sigma);

/// Area-averaging resample to the target dimensions. Upscaling is rejected.
GrayFrame downscale(const GrayFrame& frame, const EncoderConfig& config);

/// Bit = 1 iff pixel > (Gaussian-weighted neighborhood mean - bias_c), with
/// edge-replicated borders. Frame dimensions must equal the target dimensions.
BinaryFrame adaptive_threshold(const GrayFrame& frame, const EncoderConfig& config);

/// downscale (when needed) followed by adaptive_threshold.
BinaryFrame encode_frame(const GrayFrame& frame, const EncoderConfig& config);

}  // namespace htmsp
