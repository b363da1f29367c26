#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace htmsp {

/// Encoded input frame, one byte (0 or 1) per input bit, row-major.
class BinaryFrame {
 public:
  BinaryFrame() = default;
  explicit BinaryFrame(std::size_t size) : bits_(size, 0) {}
  explicit BinaryFrame(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;

  bool operator==(const BinaryFrame&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Compact storage for encoded frames kept in memory across passes.
class PackedBits {
 public:
  PackedBits() = default;
  explicit PackedBits(const BinaryFrame& frame);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void unpack_into(BinaryFrame& out) const;
  BinaryFrame unpack() const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t BinaryFrame::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

inline PackedBits::PackedBits(const BinaryFrame& frame)
    : size_(frame.size()), words_((frame.size() + 63) / 64, 0) {
  for (std::size_t i = 0; i < size_; ++i) {
    if (frame.test(i)) words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
}

inline void PackedBits::unpack_into(BinaryFrame& out) const {
  if (out.size() != size_) out = BinaryFrame(size_);
  for (std::size_t i = 0; i < size_; ++i) out.set(i, test(i));
}

inline BinaryFrame PackedBits::unpack() const {
  BinaryFrame out(size_);
  unpack_into(out);
  return out;
}

}  // namespace htmsp
