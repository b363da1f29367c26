#include "htmsp/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

struct Tap {
  int index;
  double weight;
};

// Source coverage of each destination cell along one axis.
std::vector<std::vector<Tap>> area_taps(int src, int dst) {
  std::vector<std::vector<Tap>> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    const double lo = d * scale;
    const double hi = (d + 1) * scale;
    for (int s = static_cast<int>(std::floor(lo)); s < src && s < hi; ++s) {
      const double w = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
      if (w > 0.0) taps[d].push_back({s, w / scale});
    }
  }
  return taps;
}

}  // namespace

double EncoderConfig::effective_sigma() const {
  return gaussian_sigma > 0.0 ? gaussian_sigma : 0.3 * ((block_size - 1) * 0.5 - 1.0) + 0.8;
}

void EncoderConfig::validate() const {
  if (target_width <= 0 || target_height <= 0) {
    throw ConfigError("invalid EncoderConfig: target dimensions must be positive");
  }
  if (block_size < 3 || block_size % 2 == 0) {
    throw ConfigError("invalid EncoderConfig: block_size must be odd and >= 3");
  }
  if (!(effective_sigma() > 0.0)) throw ConfigError("invalid EncoderConfig: gaussian_sigma must be positive");
}

std::vector<double> gaussian_window(int block_size, double sigma) {
  std::vector<double> w(block_size);
  const double center = (block_size - 1) * 0.5;
  double sum = 0.0;
  for (int i = 0; i < block_size; ++i) {
    const double d = i - center;
    w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

GrayFrame downscale(const GrayFrame& frame, const EncoderConfig& config) {
  const int tw = config.target_width;
  const int th = config.target_height;
  if (tw > frame.width || th > frame.height) {
    throw InputError("downscale cannot enlarge " + std::to_string(frame.width) + "x" +
                     std::to_string(frame.height) + " to " + std::to_string(tw) + "x" +
                     std::to_string(th));
  }
  if (tw == frame.width && th == frame.height) return frame;

  const auto xt = area_taps(frame.width, tw);
  const auto yt = area_taps(frame.height, th);
  GrayFrame out(tw, th);
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      double acc = 0.0;
      for (const auto& ty : yt[y]) {
        double row = 0.0;
        for (const auto& tx : xt[x]) row += tx.weight * frame.at(tx.index, ty.index);
        acc += ty.weight * row;
      }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

BinaryFrame adaptive_threshold(const GrayFrame& frame, const EncoderConfig& config) {
  if (frame.width != config.target_width || frame.height != config.target_height) {
    throw InputError("adaptive_threshold expects a " + std::to_string(config.target_width) + "x" +
                     std::to_string(config.target_height) + " frame");
  }
  const int w = frame.width;
  const int h = frame.height;
  const auto window = gaussian_window(config.block_size, config.effective_sigma());
  const int half = config.block_size / 2;

  std::vector<double> horizontal(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        acc += window[k + half] * frame.at(std::clamp(x + k, 0, w - 1), y);
      }
      horizontal[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  BinaryFrame out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int k = -half; k <= half; ++k) {
        mean += window[k + half] * horizontal[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
      }
      out.set(static_cast<std::size_t>(y) * w + x, frame.at(x, y) > mean - config.bias_c);
    }
  }
  return out;
}

BinaryFrame encode_frame(const GrayFrame& frame, const EncoderConfig& config) {
  return adaptive_threshold(downscale(frame, config), config);
}

}  // namespace htmsp
