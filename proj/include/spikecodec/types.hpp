#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikecodec {

// File or bitstream contents do not match the declared format.
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// No keyframe window fits inside the stream.
class ScheduleEmptyError : public std::runtime_error {
public:
  explicit ScheduleEmptyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Two fields share no position where both are defined.
class EmptyIntersectionError : public std::runtime_error {
public:
  explicit EmptyIntersectionError(const std::string& msg) : std::runtime_error(msg) {}
};

// One luminance frame, row-major, values in [0, 1].
struct SceneFrame {
  int width = 0;
  int height = 0;
  std::vector<double> pix;

  SceneFrame() = default;
  SceneFrame(int w, int h, double fill = 0.0)
      : width(w), height(h), pix(static_cast<size_t>(w) * h, fill) {}

  double& at(int y, int x) { return pix[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return pix[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return pix.size(); }
};

// Frames share one width/height; index is the frame period count.
struct SceneSequence {
  int width = 0;
  int height = 0;
  std::vector<SceneFrame> frames;

  int n_frames() const { return static_cast<int>(frames.size()); }
};

// Binary spike planes, plane-major then row-major, one byte per pixel.
struct SpikeStream {
  int width = 0;
  int height = 0;
  int n_frames = 0;
  std::vector<uint8_t> bits;

  SpikeStream() = default;
  SpikeStream(int w, int h, int n)
      : width(w), height(h), n_frames(n),
        bits(static_cast<size_t>(w) * h * n, 0) {}

  size_t plane_size() const { return static_cast<size_t>(width) * height; }
  uint8_t at(int n, int y, int x) const {
    return bits[(static_cast<size_t>(n) * height + y) * width + x];
  }
  uint8_t& at(int n, int y, int x) {
    return bits[(static_cast<size_t>(n) * height + y) * width + x];
  }

  bool operator==(const SpikeStream& o) const {
    return width == o.width && height == o.height && n_frames == o.n_frames &&
           bits == o.bits;
  }
};

// Per-frame inter-spike interval, plane-major; 0 marks positions outside
// any enclosing interval (before the first spike or after the last).
struct IsiField {
  int width = 0;
  int height = 0;
  int n_frames = 0;
  std::vector<int32_t> val;

  IsiField() = default;
  IsiField(int w, int h, int n)
      : width(w), height(h), n_frames(n),
        val(static_cast<size_t>(w) * h * n, 0) {}

  size_t plane_size() const { return static_cast<size_t>(width) * height; }
  int32_t at(int n, int y, int x) const {
    return val[(static_cast<size_t>(n) * height + y) * width + x];
  }
  int32_t& at(int n, int y, int x) {
    return val[(static_cast<size_t>(n) * height + y) * width + x];
  }
};

// Reciprocal of the interval at each defined position, 0 elsewhere.
struct FiringRateField {
  int width = 0;
  int height = 0;
  int n_frames = 0;
  std::vector<double> val;

  FiringRateField() = default;
  FiringRateField(int w, int h, int n)
      : width(w), height(h), n_frames(n),
        val(static_cast<size_t>(w) * h * n, 0.0) {}

  double at(int n, int y, int x) const {
    return val[(static_cast<size_t>(n) * height + y) * width + x];
  }
};

}  // namespace spikecodec
