#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "spikecodec/spike_model.hpp"
#include "spikecodec/types.hpp"

// Deterministic synthetic inputs shared across the test binaries.
namespace testgen {

using namespace spikecodec;

inline SceneSequence constant_scene(int w, int h, int n, double value) {
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.assign(n, SceneFrame(w, h, value));
  return seq;
}

// Multi-octave value noise: smooth, spatially correlated, mapped into
// [lo, hi]. Stands in for a natural image.
inline SceneFrame natural_frame(int w, int h, uint64_t seed, double lo = 0.1,
                                double hi = 0.95) {
  SceneFrame f(w, h);
  struct Octave {
    int cell;
    double weight;
  };
  const Octave octs[] = {{32, 1.0}, {16, 0.5}, {8, 0.25}};
  auto lattice = [&](int o, int lx, int ly) {
    const uint64_t key = (static_cast<uint64_t>(o) << 48) ^
                         (static_cast<uint64_t>(lx) << 24) ^
                         static_cast<uint64_t>(ly);
    return uniform_unit(mix64(mix64(seed) ^ mix64(key)));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0.0, wsum = 0.0;
      for (int o = 0; o < 3; ++o) {
        const int cell = octs[o].cell;
        const int lx = x / cell, ly = y / cell;
        const double fx = static_cast<double>(x % cell) / cell;
        const double fy = static_cast<double>(y % cell) / cell;
        const double v00 = lattice(o, lx, ly), v10 = lattice(o, lx + 1, ly);
        const double v01 = lattice(o, lx, ly + 1),
                     v11 = lattice(o, lx + 1, ly + 1);
        const double b = (v00 * (1 - fx) + v10 * fx) * (1 - fy) +
                         (v01 * (1 - fx) + v11 * fx) * fy;
        v += octs[o].weight * b;
        wsum += octs[o].weight;
      }
      f.at(y, x) = v / wsum;
    }
  }
  const auto [mn, mx] = std::minmax_element(f.pix.begin(), f.pix.end());
  // Copy before the loop: the iterators alias the values being rewritten.
  const double base = *mn;
  const double span = *mx - base > 0 ? *mx - base : 1.0;
  for (double& v : f.pix) v = lo + (v - base) / span * (hi - lo);
  return f;
}

inline SceneSequence static_scene(int w, int h, int n, uint64_t seed) {
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.assign(n, natural_frame(w, h, seed));
  return seq;
}

// Bright Gaussian blob drifting over a dim textured background.
inline SceneSequence moving_scene(int w, int h, int n, uint64_t seed) {
  const SceneFrame bg = natural_frame(w, h, seed, 0.08, 0.35);
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.reserve(n);
  for (int t = 0; t < n; ++t) {
    SceneFrame f = bg;
    const double cx = std::fmod(0.1 * w + 0.35 * t, static_cast<double>(w));
    const double cy = h / 2.0 + 0.15 * h * std::sin(t * 0.05);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x - cx, dy = y - cy;
        const double g = 0.6 * std::exp(-(dx * dx + dy * dy) / (2.0 * 36.0));
        f.at(y, x) = std::clamp(f.at(y, x) + g, 0.0, 1.0);
      }
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

// Vertical bright bar stepping right every `step_frames` frames.
inline SceneSequence bar_scene(int w, int h, int n, int step_frames,
                               double bg = 0.15, double fg = 0.9,
                               int bar_w = 6) {
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.reserve(n);
  for (int t = 0; t < n; ++t) {
    SceneFrame f(w, h, bg);
    const int pos = (t / step_frames) % (w - bar_w);
    for (int y = 0; y < h; ++y)
      for (int x = pos; x < pos + bar_w; ++x) f.at(y, x) = fg;
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

inline SpikeStream random_stream(int w, int h, int n, double density,
                                 uint64_t seed) {
  SpikeStream empty(w, h, n);
  return inject_spurious_spikes(empty, density, seed);
}

inline SpikeStream single_pixel_stream(int n, const std::vector<int>& times) {
  SpikeStream s(1, 1, n);
  for (int t : times) s.at(t, 0, 0) = 1;
  return s;
}

// Fires the scalar update over a luminance trace; the oracle used
// against the full simulator.
inline std::vector<uint8_t> scalar_trace(const std::vector<double>& lum,
                                         double tau0,
                                         const SimulatorConfig& cfg) {
  std::vector<uint8_t> fired(lum.size(), 0);
  double tau = tau0;
  for (size_t i = 0; i < lum.size(); ++i) {
    const auto r = step(tau, lum[i], cfg);
    tau = r.tau;
    fired[i] = r.fired ? 1 : 0;
  }
  return fired;
}

// Unique scratch directory, removed on destruction.
struct TmpDir {
  std::filesystem::path path;
  explicit TmpDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("spikecodec_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace testgen
