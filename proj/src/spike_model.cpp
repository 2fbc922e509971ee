#include "spikecodec/spike_model.hpp"

#include <cmath>
#include <stdexcept>

namespace spikecodec {

uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform_unit(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double per_index_unit(uint64_t seed, uint64_t index) {
  // The index-th output of a splitmix stream rooted at the hashed seed;
  // any position can be drawn without generating the ones before it.
  return uniform_unit(mix64(mix64(seed) + (index + 1) * 0x9E3779B97F4A7C15ull));
}

void validate(const SimulatorConfig& cfg) {
  if (!std::isfinite(cfg.alpha) || cfg.alpha <= 0.0)
    throw std::invalid_argument("simulator: alpha must be finite and positive");
  if (!std::isfinite(cfg.theta) || cfg.theta <= 0.0)
    throw std::invalid_argument("simulator: theta must be finite and positive");
  if (cfg.init.kind == InitPolicy::Kind::Constant) {
    if (!std::isfinite(cfg.init.value) || cfg.init.value < 0.0 ||
        cfg.init.value >= cfg.theta)
      throw std::invalid_argument(
          "simulator: constant init state must lie in [0, theta)");
  }
}

namespace {

inline double step_soft(double t, double theta) {
  t -= theta;
  while (t >= theta) t -= theta;
  return t;
}

}  // namespace

StepResult step(double tau, double luminance, const SimulatorConfig& cfg) {
  double t = tau + cfg.alpha * luminance;
  if (t < cfg.theta) return {t, false};
  if (cfg.reset == ResetMode::Hard) return {0.0, true};
  return {step_soft(t, cfg.theta), true};
}

SpikeStream simulate(const SceneSequence& scene, const SimulatorConfig& cfg) {
  validate(cfg);
  if (scene.frames.empty())
    throw std::invalid_argument("simulate: empty frame list");
  const int w = scene.width, h = scene.height;
  if (w <= 0 || h <= 0)
    throw std::invalid_argument("simulate: non-positive scene dimensions");
  for (const auto& f : scene.frames)
    if (f.width != w || f.height != h)
      throw std::invalid_argument("simulate: frames disagree on dimensions");

  const int n = scene.n_frames();
  const double alpha = cfg.alpha, theta = cfg.theta;
  const bool hard = cfg.reset == ResetMode::Hard;

  SpikeStream out(w, h, n);
  const size_t plane = out.plane_size();

  std::vector<double> tau(plane);
  if (cfg.init.kind == InitPolicy::Kind::Constant) {
    std::fill(tau.begin(), tau.end(), cfg.init.value);
  } else {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      const size_t row = static_cast<size_t>(y) * w;
      for (int x = 0; x < w; ++x)
        tau[row + x] = theta * per_index_unit(cfg.init.seed, row + x);
    }
  }

  // Frame-outer sweep keeps the scene reads sequential and the
  // accumulator array hot; every pixel is independent, so the row split
  // cannot change the result.
  for (int f = 0; f < n; ++f) {
    const double* src = scene.frames[f].pix.data();
    uint8_t* dst = out.bits.data() + static_cast<size_t>(f) * plane;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      const size_t row = static_cast<size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const size_t i = row + x;
        double t = tau[i] + alpha * src[i];
        if (t >= theta) {
          dst[i] = 1;
          t = hard ? 0.0 : step_soft(t, theta);
        }
        tau[i] = t;
      }
    }
  }
  return out;
}

double expected_isi(double luminance, const SimulatorConfig& cfg) {
  return cfg.theta / (cfg.alpha * luminance);
}

double expected_firing_rate(double luminance, const SimulatorConfig& cfg) {
  return cfg.alpha * luminance / cfg.theta;
}

SpikeStream inject_spurious_spikes(const SpikeStream& stream, double p,
                                   uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("inject: probability must lie in [0, 1]");
  SpikeStream out = stream;
  const size_t total = out.bits.size();
  const int64_t n = static_cast<int64_t>(total);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    if (out.bits[i] == 0 &&
        per_index_unit(seed, static_cast<uint64_t>(i)) < p)
      out.bits[i] = 1;
  }
  return out;
}

}  // namespace spikecodec
