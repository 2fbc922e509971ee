#include "spikecodec/representation.hpp"

#include <algorithm>
#include <stdexcept>

namespace spikecodec {

IsiField spikes_to_isi(const SpikeStream& stream) {
  IsiField field(stream.width, stream.height, stream.n_frames);
  const int w = stream.width, h = stream.height, n = stream.n_frames;
  const size_t plane = stream.plane_size();

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t off = static_cast<size_t>(y) * w + x;
      int prev = -1;
      for (int f = 0; f < n; ++f) {
        if (!stream.bits[static_cast<size_t>(f) * plane + off]) continue;
        if (prev >= 0) {
          const int32_t v = f - prev;
          for (int m = prev; m < f; ++m)
            field.val[static_cast<size_t>(m) * plane + off] = v;
        }
        prev = f;
      }
    }
  }
  return field;
}

IsiRepr spikes_to_isi_repr(const SpikeStream& stream) {
  IsiRepr repr;
  repr.width = stream.width;
  repr.height = stream.height;
  repr.n_frames = stream.n_frames;
  const size_t plane = stream.plane_size();
  repr.first_spike.assign(plane, -1);
  repr.intervals.assign(plane, {});

  const int n = stream.n_frames;
  const int64_t np = static_cast<int64_t>(plane);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < np; ++i) {
    int prev = -1;
    for (int f = 0; f < n; ++f) {
      if (!stream.bits[static_cast<size_t>(f) * plane + i]) continue;
      if (prev < 0)
        repr.first_spike[i] = f;
      else
        repr.intervals[i].push_back(f - prev);
      prev = f;
    }
  }
  return repr;
}

SpikeStream isi_repr_to_spikes(const IsiRepr& repr) {
  if (repr.width <= 0 || repr.height <= 0 || repr.n_frames < 0)
    throw std::invalid_argument("interval form: bad dimensions");
  const size_t plane = static_cast<size_t>(repr.width) * repr.height;
  if (repr.first_spike.size() != plane || repr.intervals.size() != plane)
    throw std::invalid_argument("interval form: per-pixel arrays mismatch");

  SpikeStream out(repr.width, repr.height, repr.n_frames);
  const int64_t np = static_cast<int64_t>(plane);
  // Exceptions cannot cross the parallel region; collect a violation
  // code instead and throw after the loop.
  int bad = 0;
#pragma omp parallel for schedule(static) reduction(max : bad)
  for (int64_t i = 0; i < np; ++i) {
    int t = repr.first_spike[i];
    if (t < 0) {
      if (!repr.intervals[i].empty()) bad = std::max(bad, 1);
      continue;
    }
    if (t >= repr.n_frames) {
      bad = std::max(bad, 2);
      continue;
    }
    out.bits[static_cast<size_t>(t) * plane + i] = 1;
    for (int32_t gap : repr.intervals[i]) {
      if (gap <= 0) {
        bad = std::max(bad, 3);
        break;
      }
      t += gap;
      if (t >= repr.n_frames) {
        bad = std::max(bad, 2);
        break;
      }
      out.bits[static_cast<size_t>(t) * plane + i] = 1;
    }
  }
  switch (bad) {
    case 1:
      throw std::invalid_argument(
          "interval form: gaps listed for a pixel with no first spike");
    case 2:
      throw std::invalid_argument("interval form: spike time out of range");
    case 3:
      throw std::invalid_argument("interval form: non-positive gap");
    default:
      break;
  }
  return out;
}

FiringRateField firing_rate(const IsiField& field) {
  FiringRateField out(field.width, field.height, field.n_frames);
  const int64_t total = static_cast<int64_t>(field.val.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < total; ++i)
    out.val[i] = field.val[i] > 0 ? 1.0 / field.val[i] : 0.0;
  return out;
}

namespace {

// Spikes of one pixel inside [a, b), divided by the span and rescaled to
// a luminance estimate.
inline double counting_estimate(const SpikeStream& s, size_t off, int a, int b,
                                double alpha, double theta) {
  int count = 0;
  const size_t plane = s.plane_size();
  for (int f = a; f < b; ++f)
    count += s.bits[static_cast<size_t>(f) * plane + off];
  double est = theta * count / (alpha * (b - a));
  return std::clamp(est, 0.0, 1.0);
}

}  // namespace

SceneFrame reconstruct_tfi(const SpikeStream& stream, int k,
                           const SimulatorConfig& cfg) {
  validate(cfg);
  if (k < 0 || k >= stream.n_frames)
    throw std::invalid_argument("reconstruct: frame index out of range");

  const int w = stream.width, h = stream.height, n = stream.n_frames;
  const size_t plane = stream.plane_size();
  const int fa = std::max(0, k - 15), fb = std::min(n, k + 16);

  SceneFrame out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t off = static_cast<size_t>(y) * w + x;
      // t_a: latest spike at or before k; t_b: the spike after it.
      int ta = -1;
      for (int f = k; f >= 0; --f) {
        if (stream.bits[static_cast<size_t>(f) * plane + off]) {
          ta = f;
          break;
        }
      }
      int tb = -1;
      if (ta >= 0) {
        for (int f = ta + 1; f < n; ++f) {
          if (stream.bits[static_cast<size_t>(f) * plane + off]) {
            tb = f;
            break;
          }
        }
      }
      double est;
      if (ta >= 0 && tb > ta) {
        est = std::clamp(cfg.theta / (cfg.alpha * (tb - ta)), 0.0, 1.0);
      } else {
        est = counting_estimate(stream, off, fa, fb, cfg.alpha, cfg.theta);
      }
      out.pix[off] = est;
    }
  }
  return out;
}

SceneFrame reconstruct_tfp(const SpikeStream& stream, int k, int w,
                           const SimulatorConfig& cfg) {
  validate(cfg);
  if (w <= 0 || w % 2 == 0)
    throw std::invalid_argument("reconstruct: window must be odd and positive");
  if (k < 0 || k >= stream.n_frames)
    throw std::invalid_argument("reconstruct: frame index out of range");

  const int hw = w / 2;
  const int fa = std::max(0, k - hw), fb = std::min(stream.n_frames, k + hw + 1);
  const int width = stream.width, height = stream.height;

  SceneFrame out(width, height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t off = static_cast<size_t>(y) * width + x;
      out.pix[off] = counting_estimate(stream, off, fa, fb, cfg.alpha, cfg.theta);
    }
  }
  return out;
}

KeyframeSchedule keyframe_schedule(int n_frames, int d, int s, int r) {
  if (d <= 0) throw std::invalid_argument("schedule: d must be positive");
  if (s < 0 || r < 0)
    throw std::invalid_argument("schedule: s and r must be non-negative");
  if (n_frames < 0) throw std::invalid_argument("schedule: negative length");

  KeyframeSchedule sch;
  sch.d = d;
  sch.s = s;
  sch.r = r;
  sch.half_window = r * d + s;
  const int hw = sch.half_window;
  // Smallest multiple of d whose window starts at frame 0 or later.
  int k = ((hw + d - 1) / d) * d;
  for (; k + hw < n_frames; k += d) sch.keyframes.push_back(k);
  return sch;
}

}  // namespace spikecodec
