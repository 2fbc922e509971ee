#pragma once

#include <map>
#include <optional>

#include "representation.hpp"
#include "types.hpp"

namespace spikecodec {

enum class ReprTag : uint8_t { Spike, Isi, Scene };

// One frame of a representation, normalized to [0, 1] so the same
// predictability scans apply to spikes, intervals, and scenes alike.
struct RepresentationGrid {
  int width = 0;
  int height = 0;
  std::vector<double> val;
  ReprTag tag = ReprTag::Scene;

  double at(int y, int x) const {
    return val[static_cast<size_t>(y) * width + x];
  }
};

RepresentationGrid scene_grid(const SceneFrame& frame);
RepresentationGrid spike_grid(const SpikeStream& stream, int frame);

// Intervals are mapped through 1/isi (a firing rate in [0, 1]) so that
// large-interval outliers do not dominate variance; sentinels map to 0.
RepresentationGrid isi_grid(const IsiField& field, int frame);

// Mean squared error of predicting each interior pixel from the mean of
// its (2r+1)^2 neighborhood. The center is excluded from the predictor
// unless include_center. Throws std::invalid_argument when the grid is
// smaller than (2r+1) on either side or r <= 0.
double neighborhood_variance(const RepresentationGrid& grid, int r,
                             bool include_center = false);

// H(center | quantized neighborhood mean) in bits, from the joint
// histogram over interior pixels. Never exceeds the unconditional
// entropy of the same binning (checked on every run). Bin counts must
// be >= 2.
double conditional_entropy(const RepresentationGrid& grid, int r,
                           int value_bins, int cond_bins,
                           bool include_center = false);

struct IsiStats {
  std::map<int32_t, int64_t> histogram;  // interval -> occurrence count
  int64_t count = 0;
  std::optional<double> q1, median, q3;
};

// Each spike-to-spike interval is counted once regardless of length.
// Quartiles use linear interpolation between order statistics; empty
// fields give a zero histogram and absent quartiles.
IsiStats isi_distribution(const IsiField& field);

// Single-pixel trajectory for one accumulator start value.
struct StateTrace {
  double tau0 = 0.0;
  std::vector<double> tau;     // post-update accumulator per frame
  std::vector<uint8_t> fired;  // spike flag per frame
  std::vector<int32_t> isi;    // enclosing interval per frame, 0 outside
};

// Runs the same luminance trace from several start values. Throws
// std::invalid_argument when a start value is outside [0, theta) or the
// trace is empty.
std::vector<StateTrace> initial_state_sweep(
    const std::vector<double>& lum_trace, const SimulatorConfig& cfg,
    const std::vector<double>& taus);

}  // namespace spikecodec
