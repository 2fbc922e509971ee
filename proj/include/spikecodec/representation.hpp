#pragma once

#include "spike_model.hpp"
#include "types.hpp"

namespace spikecodec {

// Lossless per-pixel form: the first spike frame plus the gap sequence.
// first_spike is -1 where a pixel never fires (its interval list is empty).
struct IsiRepr {
  int width = 0;
  int height = 0;
  int n_frames = 0;
  std::vector<int32_t> first_spike;
  std::vector<std::vector<int32_t>> intervals;
};

struct KeyframeSchedule {
  int d = 7;
  int s = 6;
  int r = 2;
  int half_window = 20;  // r * d + s
  std::vector<int> keyframes;

  bool empty() const { return keyframes.empty(); }
};

// The interval field: position n between consecutive spikes at t_a < t_b
// carries t_b - t_a for all n in [t_a, t_b). The spike frame itself
// belongs to the interval it opens.
IsiField spikes_to_isi(const SpikeStream& stream);

// Exact mutual inverses; round trips are bit identical both ways.
IsiRepr spikes_to_isi_repr(const SpikeStream& stream);
SpikeStream isi_repr_to_spikes(const IsiRepr& repr);

FiringRateField firing_rate(const IsiField& field);

// Luminance estimate at frame k from the interval enclosing k:
// theta / (alpha * isi), clamped to [0, 1]. Pixels with no enclosing
// interval fall back to the counting estimate with window 31.
SceneFrame reconstruct_tfi(const SpikeStream& stream, int k,
                           const SimulatorConfig& cfg);

// Counting estimate: spikes in the centered window of odd length w
// (clipped to the stream) over the covered span, scaled by theta/alpha,
// clamped to [0, 1]. Throws std::invalid_argument on even or
// non-positive w, or k outside the stream.
SceneFrame reconstruct_tfp(const SpikeStream& stream, int k, int w,
                           const SimulatorConfig& cfg);

// Keyframes are the multiples of d whose surrounding window of
// half-width r*d + s lies inside [0, n_frames). Throws
// std::invalid_argument on d <= 0, s < 0, or r < 0.
KeyframeSchedule keyframe_schedule(int n_frames, int d, int s, int r);

}  // namespace spikecodec
