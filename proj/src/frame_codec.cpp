#include "spikecodec/frame_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bytes.hpp"
#include "spikecodec/range_coder.hpp"

namespace spikecodec {

double quant_step_for_quality(int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("frame codec: quality must lie in [1, 100]");
  // Halves every 10 quality points; 0.04 at the midpoint.
  return 0.04 * std::exp2((50.0 - quality) / 10.0);
}

namespace {

struct DctTables {
  // m[u][n] = c_u cos((2n+1) u pi / 16), the orthonormal basis.
  double m[8][8];
  DctTables() {
    for (int u = 0; u < 8; ++u) {
      const double c = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
      for (int n = 0; n < 8; ++n)
        m[u][n] = c * std::cos(std::numbers::pi * (2 * n + 1) * u / 16.0);
    }
  }
};
const DctTables kDct;

void dct_forward(const double in[64], double out[64]) {
  double tmp[64];
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += kDct.m[u][y] * in[y * 8 + x];
      tmp[u * 8 + x] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += kDct.m[v][x] * tmp[u * 8 + x];
      out[u * 8 + v] = s;
    }
}

void dct_inverse(const double in[64], double out[64]) {
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += kDct.m[u][y] * in[u * 8 + v];
      tmp[y * 8 + v] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int v = 0; v < 8; ++v) s += kDct.m[v][x] * tmp[y * 8 + v];
      out[y * 8 + x] = s;
    }
}

constexpr std::array<uint8_t, 64> make_zigzag() {
  std::array<uint8_t, 64> zz{};
  int idx = 0;
  for (int s = 0; s < 15; ++s) {
    if (s % 2 == 0) {
      for (int y = std::min(s, 7); y >= 0 && s - y <= 7; --y)
        zz[idx++] = static_cast<uint8_t>(y * 8 + (s - y));
    } else {
      for (int x = std::min(s, 7); x >= 0 && s - x <= 7; --x)
        zz[idx++] = static_cast<uint8_t>((s - x) * 8 + x);
    }
  }
  return zz;
}
constexpr auto kZigzag = make_zigzag();

// Symbol layout per coefficient: 0..30 encode values -15..15, 31 is the
// escape; escaped values follow as a sign-folded u32 in 4 bytes.
constexpr int kDirectMax = 15;
constexpr int kEscape = 31;
constexpr int kCoefAlphabet = 32;
constexpr int kScaleLevels = 16;

inline uint32_t fold_sign(int32_t v) {
  return (static_cast<uint32_t>(v) << 1) ^ static_cast<uint32_t>(v >> 31);
}
inline int32_t unfold_sign(uint32_t m) {
  return static_cast<int32_t>(m >> 1) ^ -static_cast<int32_t>(m & 1);
}

inline double scale_of_level(int level) {
  return 0.5 + (level + 0.5) / 16.0;
}

// Coded after the last block; a truncated body decodes from zero
// padding and almost surely misses this value.
constexpr int kSentinel = 0xA5;

// 8x8 gather with edge clamping for blocks that overhang the frame.
void gather_block(const double* pix, int w, int h, int by, int bx,
                  double out[64]) {
  for (int y = 0; y < 8; ++y) {
    const int sy = std::min(by * 8 + y, h - 1);
    for (int x = 0; x < 8; ++x) {
      const int sx = std::min(bx * 8 + x, w - 1);
      out[y * 8 + x] = pix[static_cast<size_t>(sy) * w + sx];
    }
  }
}

struct BlockSymbols {
  std::array<int32_t, 64> q;
  uint8_t level = 0;
};

}  // namespace

std::vector<uint8_t> encode_frame(const SceneFrame& frame, int quality,
                                  const SaliencyMap* saliency) {
  const double base_step = quant_step_for_quality(quality);
  if (frame.width <= 0 || frame.height <= 0)
    throw std::invalid_argument("frame codec: empty frame");
  if (frame.width > 65535 || frame.height > 65535)
    throw std::invalid_argument("frame codec: frame dimensions exceed 65535");
  const bool roi = saliency != nullptr;
  if (roi && (saliency->width != frame.width || saliency->height != frame.height))
    throw std::invalid_argument("frame codec: saliency shape mismatch");

  const int w = frame.width, h = frame.height;
  const int bw = (w + 7) / 8, bh = (h + 7) / 8;
  const int nb = bw * bh;

  std::vector<BlockSymbols> blocks(nb);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int by = b / bw, bx = b % bw;
    double pix[64], coef[64];
    gather_block(frame.pix.data(), w, h, by, bx, pix);

    double step = base_step;
    if (roi) {
      double sal[64];
      gather_block(saliency->val.data(), w, h, by, bx, sal);
      double mean = 0.0;
      for (double v : sal) mean += v;
      mean /= 64.0;
      const double scale = std::clamp(1.5 - mean, 0.5, 1.5);
      const int level = std::clamp(static_cast<int>((scale - 0.5) * 16.0), 0,
                                   kScaleLevels - 1);
      blocks[b].level = static_cast<uint8_t>(level);
      // Quantize with the level the decoder will see, not the raw scale.
      step = base_step * scale_of_level(level);
    }

    dct_forward(pix, coef);
    for (int j = 0; j < 64; ++j)
      blocks[b].q[j] =
          static_cast<int32_t>(std::lround(coef[kZigzag[j]] / step));
  }

  std::vector<uint8_t> out;
  detail::put_u16(out, static_cast<uint16_t>(w));
  detail::put_u16(out, static_cast<uint16_t>(h));
  detail::put_u8(out, static_cast<uint8_t>(quality));
  detail::put_u8(out, roi ? 1 : 0);

  RangeEncoder rc;
  std::vector<AdaptiveModel> pos(64, AdaptiveModel(kCoefAlphabet));
  std::vector<AdaptiveModel> esc(4, AdaptiveModel(256));
  AdaptiveModel level_model(kScaleLevels);

  for (int b = 0; b < nb; ++b) {
    if (roi) level_model.encode(rc, blocks[b].level);
    for (int j = 0; j < 64; ++j) {
      const int32_t v = blocks[b].q[j];
      if (v >= -kDirectMax && v <= kDirectMax) {
        pos[j].encode(rc, v + kDirectMax);
      } else {
        pos[j].encode(rc, kEscape);
        const uint32_t m = fold_sign(v);
        for (int k = 0; k < 4; ++k)
          esc[k].encode(rc, static_cast<int>((m >> (8 * k)) & 0xFF));
      }
    }
  }
  esc[0].encode(rc, kSentinel);
  auto coded = rc.finish();
  out.insert(out.end(), coded.begin(), coded.end());
  return out;
}

SceneFrame decode_frame(const std::vector<uint8_t>& bytes) {
  detail::Reader rd{bytes.data(), bytes.size()};
  const int w = rd.u16();
  const int h = rd.u16();
  const int quality = rd.u8();
  const int roi = rd.u8();
  if (w == 0 || h == 0) throw FormatError("frame payload: zero dimensions");
  if (quality < 1 || quality > 100)
    throw FormatError("frame payload: quality out of range");
  if (roi > 1) throw FormatError("frame payload: bad region flag");
  const double base_step = quant_step_for_quality(quality);

  const int bw = (w + 7) / 8, bh = (h + 7) / 8;
  const int nb = bw * bh;

  RangeDecoder rc(bytes.data() + rd.pos, bytes.size() - rd.pos);
  std::vector<AdaptiveModel> pos(64, AdaptiveModel(kCoefAlphabet));
  std::vector<AdaptiveModel> esc(4, AdaptiveModel(256));
  AdaptiveModel level_model(kScaleLevels);

  std::vector<BlockSymbols> blocks(nb);
  for (int b = 0; b < nb; ++b) {
    if (roi) blocks[b].level = static_cast<uint8_t>(level_model.decode(rc));
    for (int j = 0; j < 64; ++j) {
      const int sym = pos[j].decode(rc);
      if (sym < kEscape) {
        blocks[b].q[j] = sym - kDirectMax;
      } else {
        uint32_t m = 0;
        for (int k = 0; k < 4; ++k)
          m |= static_cast<uint32_t>(esc[k].decode(rc)) << (8 * k);
        blocks[b].q[j] = unfold_sign(m);
      }
    }
  }

  if (esc[0].decode(rc) != kSentinel)
    throw FormatError("frame payload: damaged stream");

  SceneFrame frame(w, h);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int by = b / bw, bx = b % bw;
    const double step =
        roi ? base_step * scale_of_level(blocks[b].level) : base_step;
    double coef[64], pix[64];
    for (int j = 0; j < 64; ++j) coef[kZigzag[j]] = blocks[b].q[j] * step;
    dct_inverse(coef, pix);
    for (int y = 0; y < 8; ++y) {
      const int fy = by * 8 + y;
      if (fy >= h) break;
      for (int x = 0; x < 8; ++x) {
        const int fx = bx * 8 + x;
        if (fx >= w) break;
        frame.pix[static_cast<size_t>(fy) * w + fx] =
            std::clamp(pix[y * 8 + x], 0.0, 1.0);
      }
    }
  }
  return frame;
}

}  // namespace spikecodec
