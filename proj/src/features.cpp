#include "htmsp/features.hpp"

#include <string>

#include "htmsp/errors.hpp"

namespace htmsp {

void HistogramAccumulator::add_active(std::span<const int> active) {
  const int dim = static_cast<int>(hits_.size());
  if (stamp_.size() != hits_.size()) stamp_.assign(hits_.size(), -1);
  for (int c : active) {
    if (c < 0 || c >= dim) {
      throw InputError("active column " + std::to_string(c) + " outside [0, " + std::to_string(dim) + ")");
    }
    if (stamp_[c] == frames_) continue;  // duplicate within one frame
    stamp_[c] = frames_;
    ++hits_[c];
  }
  ++frames_;
}

void HistogramAccumulator::add_bits(const BinaryFrame& frame) {
  if (frame.size() != hits_.size()) throw InputError("frame size does not match histogram dimension");
  const auto bits = frame.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) hits_[i] += bits[i];
  ++frames_;
}

SdrHistogram HistogramAccumulator::finish(int frames) const {
  if (frames <= 0) throw InputError("histogram needs a positive frame count");
  if (frames < frames_) throw InputError("histogram frame count smaller than frames accumulated");
  SdrHistogram h;
  h.counts.resize(hits_.size());
  for (std::size_t i = 0; i < hits_.size(); ++i) h.counts[i] = static_cast<double>(hits_[i]) / frames;
  return h;
}

SdrHistogram accumulate_histogram(std::span<const std::vector<int>> sdr_sequence, int num_columns,
                                  int frames) {
  HistogramAccumulator acc(num_columns);
  for (const auto& active : sdr_sequence) acc.add_active(active);
  return acc.finish(frames);
}

SdrHistogram concatenate(std::span<const SdrHistogram> parts) {
  SdrHistogram out;
  for (const auto& p : parts) {
    out.counts.insert(out.counts.end(), p.counts.begin(), p.counts.end());
    if (!out.label && p.label) out.label = p.label;
  }
  return out;
}

}  // namespace htmsp
