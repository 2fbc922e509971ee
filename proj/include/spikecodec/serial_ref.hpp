#pragma once

#include "analysis.hpp"
#include "spike_model.hpp"
#include "types.hpp"

// Plain serial implementations of the parallel kernels, kept as the
// comparison baseline for tests and benchmarks. These stay deliberately
// naive; do not optimize them.
namespace spikecodec::ref {

SpikeStream simulate(const SceneSequence& scene, const SimulatorConfig& cfg);

IsiField spikes_to_isi(const SpikeStream& stream);

double neighborhood_variance(const RepresentationGrid& grid, int r,
                             bool include_center = false);

double conditional_entropy(const RepresentationGrid& grid, int r,
                           int value_bins, int cond_bins,
                           bool include_center = false);

double sequence_mse(const SceneSequence& a, const SceneSequence& b);

}  // namespace spikecodec::ref
