#include "spikecodec/range_coder.hpp"

#include <stdexcept>

namespace spikecodec {

namespace {
constexpr uint32_t kTop = 1u << 24;
constexpr uint32_t kBot = 1u << 16;
constexpr uint32_t kRescale = 1u << 16;
constexpr uint32_t kIncrement = 32;
}  // namespace

// Renormalization ships the top byte while low and low+range agree on
// it; when range alone drops under 2^16 the interval is clipped to the
// current low-aligned slice so the loop always makes progress. Pending
// carries are impossible by construction.
void RangeEncoder::normalize() {
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeEncoder::encode(uint32_t cum_low, uint32_t freq, uint32_t total) {
  range_ /= total;
  low_ += cum_low * range_;
  range_ *= freq;
  normalize();
}

void RangeEncoder::encode_bit(int bit, uint32_t p0) {
  const uint32_t split = (range_ >> 16) * p0;
  if (bit == 0) {
    range_ = split;
  } else {
    low_ += split;
    range_ -= split;
  }
  normalize();
}

std::vector<uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(const uint8_t* data, size_t size)
    : data_(data), size_(size) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  return pos_ < size_ ? data_[pos_++] : 0;
}

void RangeDecoder::normalize() {
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

uint32_t RangeDecoder::decode_target(uint32_t total) {
  range_ /= total;
  const uint32_t t = (code_ - low_) / range_;
  if (t >= total) throw FormatError("range decoder: target out of range");
  return t;
}

void RangeDecoder::decode_update(uint32_t cum_low, uint32_t freq,
                                 uint32_t total) {
  (void)total;  // range was already divided in decode_target
  low_ += cum_low * range_;
  range_ *= freq;
  normalize();
}

int RangeDecoder::decode_bit(uint32_t p0) {
  const uint32_t split = (range_ >> 16) * p0;
  const int bit = (code_ - low_ >= split) ? 1 : 0;
  if (bit == 0) {
    range_ = split;
  } else {
    low_ += split;
    range_ -= split;
  }
  normalize();
  return bit;
}

AdaptiveModel::AdaptiveModel(int alphabet) {
  if (alphabet < 1 || alphabet > 8192)
    throw std::invalid_argument("adaptive model: alphabet out of range");
  freq_.assign(alphabet, 1);
  total_ = static_cast<uint32_t>(alphabet);
}

void AdaptiveModel::bump(int symbol) {
  freq_[symbol] += kIncrement;
  total_ += kIncrement;
  if (total_ >= kRescale) {
    total_ = 0;
    for (auto& f : freq_) {
      f = (f >> 1) | 1;
      total_ += f;
    }
  }
}

void AdaptiveModel::encode(RangeEncoder& rc, int symbol) {
  uint32_t cum = 0;
  for (int s = 0; s < symbol; ++s) cum += freq_[s];
  rc.encode(cum, freq_[symbol], total_);
  bump(symbol);
}

int AdaptiveModel::decode(RangeDecoder& rc) {
  const uint32_t target = rc.decode_target(total_);
  uint32_t cum = 0;
  int symbol = 0;
  const int n = static_cast<int>(freq_.size());
  while (symbol < n && cum + freq_[symbol] <= target) cum += freq_[symbol++];
  if (symbol >= n) throw FormatError("range decoder: corrupt symbol stream");
  rc.decode_update(cum, freq_[symbol], total_);
  bump(symbol);
  return symbol;
}

void BinaryModel::update(int bit) {
  if (bit == 0)
    p0_ += (65536u - p0_) >> 5;
  else
    p0_ -= p0_ >> 5;
  if (p0_ < 32) p0_ = 32;
  if (p0_ > 65504) p0_ = 65504;
}

void BinaryModel::encode(RangeEncoder& rc, int bit) {
  rc.encode_bit(bit, p0_);
  update(bit);
}

int BinaryModel::decode(RangeDecoder& rc) {
  const int bit = rc.decode_bit(p0_);
  update(bit);
  return bit;
}

std::vector<uint8_t> rc_encode(const std::vector<int>& symbols, int alphabet) {
  AdaptiveModel model(alphabet);
  RangeEncoder rc;
  for (int s : symbols) {
    if (s < 0 || s >= alphabet)
      throw std::invalid_argument("rc_encode: symbol outside alphabet");
    model.encode(rc, s);
  }
  return rc.finish();
}

std::vector<int> rc_decode(const std::vector<uint8_t>& bytes, size_t count,
                           int alphabet) {
  AdaptiveModel model(alphabet);
  RangeDecoder rc(bytes.data(), bytes.size());
  std::vector<int> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(model.decode(rc));
  return out;
}

}  // namespace spikecodec
