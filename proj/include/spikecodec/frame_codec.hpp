#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace spikecodec {

// Per-pixel importance in [0, 1]; higher means finer quantization when
// region weighting is enabled.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> val;

  SaliencyMap() = default;
  SaliencyMap(int w, int h)
      : width(w), height(h), val(static_cast<size_t>(w) * h, 0.0) {}

  double at(int y, int x) const {
    return val[static_cast<size_t>(y) * width + x];
  }
};

// Base uniform quantizer step for a quality in [1, 100]; halves every
// 10 quality points.
double quant_step_for_quality(int quality);

// 8x8 block transform coder: orthonormal DCT, uniform scalar
// quantization, zigzag scan, adaptive range coding. When saliency is
// given, each block's step is scaled by a factor derived from the
// block's mean saliency; the factor is coded in the stream so decoding
// needs nothing else. Frame dimensions are coded too; edge blocks are
// edge-padded. Throws std::invalid_argument on quality outside [1, 100],
// an empty frame, or a saliency shape mismatch.
std::vector<uint8_t> encode_frame(const SceneFrame& frame, int quality,
                                  const SaliencyMap* saliency = nullptr);

// Throws FormatError when the payload is malformed.
SceneFrame decode_frame(const std::vector<uint8_t>& bytes);

}  // namespace spikecodec
