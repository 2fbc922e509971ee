#pragma once

#include "types.hpp"

namespace spikecodec {

enum class ResetMode : uint8_t { Hard = 0, Soft = 1 };

// How each pixel's accumulator starts: a shared constant in [0, theta),
// or an independent uniform draw from [0, theta) seeded per pixel.
struct InitPolicy {
  enum class Kind : uint8_t { Constant, UniformRandom };
  Kind kind = Kind::Constant;
  double value = 0.0;
  uint64_t seed = 0;

  static InitPolicy constant(double v) { return {Kind::Constant, v, 0}; }
  static InitPolicy uniform_random(uint64_t seed) {
    return {Kind::UniformRandom, 0.0, seed};
  }
};

struct SimulatorConfig {
  double alpha = 1.0;  // luminance-to-charge gain per frame period
  double theta = 2.0;  // firing threshold
  ResetMode reset = ResetMode::Hard;
  InitPolicy init = {};
};

// Throws std::invalid_argument on non-finite or non-positive alpha/theta,
// or a constant init value outside [0, theta).
void validate(const SimulatorConfig& cfg);

struct StepResult {
  double tau;
  bool fired;
};

// One accumulate/compare/reset update for a single accumulator.
// Firing happens exactly when the accumulated value reaches theta.
// Hard reset returns to 0; soft reset keeps the overshoot (reduced
// modulo theta so the post state is always < theta).
StepResult step(double tau, double luminance, const SimulatorConfig& cfg);

// Runs every pixel through all frames. Output plane n holds the spikes
// fired during frame n. Throws std::invalid_argument on an empty frame
// list, mismatched frame shapes, or an invalid config.
SpikeStream simulate(const SceneSequence& scene, const SimulatorConfig& cfg);

// theta / (alpha * luminance); infinity at zero luminance.
double expected_isi(double luminance, const SimulatorConfig& cfg);

// alpha * luminance / theta, the reciprocal of the expected interval.
double expected_firing_rate(double luminance, const SimulatorConfig& cfg);

// Flips each zero bit to one independently with probability p (seeded,
// deterministic). Existing spikes are never removed. Throws
// std::invalid_argument unless 0 <= p <= 1.
SpikeStream inject_spurious_spikes(const SpikeStream& stream, double p,
                                   uint64_t seed);

// splitmix64 finalizer; the per-index substream helpers below hash the
// seed and index independently so draw order never matters.
uint64_t mix64(uint64_t x);

// Uniform double in [0, 1) from the top 53 bits of a hash.
double uniform_unit(uint64_t h);

// The draw for stream position `index` under `seed`.
double per_index_unit(uint64_t seed, uint64_t index);

}  // namespace spikecodec
