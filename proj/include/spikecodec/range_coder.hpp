#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace spikecodec {

// Carryless byte-oriented range coder. 32-bit low/range; bytes are
// shifted out while the top byte of low is settled, with range forced
// down when it drops under 2^16 so the invariant never needs a carry.
class RangeEncoder {
public:
  // Narrows to [cum_low, cum_low + freq) out of total. Requires
  // 0 < freq, cum_low + freq <= total <= 2^16.
  void encode(uint32_t cum_low, uint32_t freq, uint32_t total);

  // Binary path: p0 is the probability of a zero bit in 1/2^16 units.
  void encode_bit(int bit, uint32_t p0);

  // Flushes the remaining state; the stream is always at least 4 bytes.
  std::vector<uint8_t> finish();

private:
  void normalize();

  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
public:
  // The buffer must outlive the decoder. Reads past the end decode as
  // zero bytes, so truncation surfaces as symbol garbage, not UB.
  RangeDecoder(const uint8_t* data, size_t size);

  // Scaled position of the code point inside [0, total); pass the result
  // through a cumulative-frequency search, then call decode_update with
  // the matched interval.
  uint32_t decode_target(uint32_t total);
  void decode_update(uint32_t cum_low, uint32_t freq, uint32_t total);

  int decode_bit(uint32_t p0);

  size_t consumed() const { return pos_; }

private:
  void normalize();
  uint8_t next_byte();

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Adaptive order-0 frequency model. Every symbol starts at weight 1,
// gains 32 per occurrence, and the table halves (keeping weights >= 1)
// when the total reaches 2^16, which also bounds totals for the coder.
class AdaptiveModel {
public:
  explicit AdaptiveModel(int alphabet);

  void encode(RangeEncoder& rc, int symbol);
  int decode(RangeDecoder& rc);  // throws FormatError on a bad target

  int alphabet() const { return static_cast<int>(freq_.size()); }

private:
  void bump(int symbol);

  std::vector<uint32_t> freq_;
  uint32_t total_ = 0;
};

// Adaptive binary model: 16-bit probability of zero, shift-5 update.
class BinaryModel {
public:
  void encode(RangeEncoder& rc, int bit);
  int decode(RangeDecoder& rc);

  uint32_t p0() const { return p0_; }

private:
  void update(int bit);

  uint32_t p0_ = 1u << 15;
};

// Whole-sequence helpers over one adaptive order-0 model. Symbols must
// lie in [0, alphabet). The byte stream is headerless; the caller keeps
// count and alphabet. An empty sequence is a valid (flush-only) stream.
std::vector<uint8_t> rc_encode(const std::vector<int>& symbols, int alphabet);
std::vector<int> rc_decode(const std::vector<uint8_t>& bytes, size_t count,
                           int alphabet);

}  // namespace spikecodec
