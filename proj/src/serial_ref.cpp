#include "spikecodec/serial_ref.hpp"

#include <cmath>
#include <stdexcept>

namespace spikecodec::ref {

SpikeStream simulate(const SceneSequence& scene, const SimulatorConfig& cfg) {
  spikecodec::validate(cfg);
  if (scene.frames.empty())
    throw std::invalid_argument("simulate: empty frame list");
  const int w = scene.width, h = scene.height, n = scene.n_frames();
  for (const auto& f : scene.frames)
    if (f.width != w || f.height != h)
      throw std::invalid_argument("simulate: frames disagree on dimensions");

  SpikeStream out(w, h, n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t off = static_cast<size_t>(y) * w + x;
      double tau = cfg.init.kind == InitPolicy::Kind::Constant
                       ? cfg.init.value
                       : cfg.theta * per_index_unit(cfg.init.seed, off);
      for (int f = 0; f < n; ++f) {
        const auto res = step(tau, scene.frames[f].pix[off], cfg);
        tau = res.tau;
        if (res.fired) out.at(f, y, x) = 1;
      }
    }
  }
  return out;
}

IsiField spikes_to_isi(const SpikeStream& stream) {
  IsiField field(stream.width, stream.height, stream.n_frames);
  for (int y = 0; y < stream.height; ++y) {
    for (int x = 0; x < stream.width; ++x) {
      std::vector<int> times;
      for (int f = 0; f < stream.n_frames; ++f)
        if (stream.at(f, y, x)) times.push_back(f);
      for (size_t i = 1; i < times.size(); ++i) {
        const int32_t v = times[i] - times[i - 1];
        for (int m = times[i - 1]; m < times[i]; ++m) field.at(m, y, x) = v;
      }
    }
  }
  return field;
}

namespace {

double predictor(const RepresentationGrid& g, int y, int x, int r,
                 bool include_center) {
  double sum = 0.0;
  int cnt = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (!include_center && dy == 0 && dx == 0) continue;
      sum += g.at(y + dy, x + dx);
      ++cnt;
    }
  }
  return sum / cnt;
}

}  // namespace

double neighborhood_variance(const RepresentationGrid& grid, int r,
                             bool include_center) {
  if (r <= 0) throw std::invalid_argument("analysis: radius must be positive");
  if (grid.width < 2 * r + 1 || grid.height < 2 * r + 1)
    throw std::invalid_argument("analysis: grid smaller than the window");
  double acc = 0.0;
  int64_t cnt = 0;
  for (int y = r; y < grid.height - r; ++y) {
    for (int x = r; x < grid.width - r; ++x) {
      const double d = grid.at(y, x) - predictor(grid, y, x, r, include_center);
      acc += d * d;
      ++cnt;
    }
  }
  return acc / cnt;
}

double conditional_entropy(const RepresentationGrid& grid, int r,
                           int value_bins, int cond_bins,
                           bool include_center) {
  if (r <= 0) throw std::invalid_argument("analysis: radius must be positive");
  if (grid.width < 2 * r + 1 || grid.height < 2 * r + 1)
    throw std::invalid_argument("analysis: grid smaller than the window");
  if (value_bins < 2 || cond_bins < 2)
    throw std::invalid_argument("analysis: bin counts must be at least 2");

  auto bin_of = [](double v, int bins) {
    int b = static_cast<int>(v * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    return b;
  };

  std::vector<int64_t> joint(static_cast<size_t>(value_bins) * cond_bins, 0);
  for (int y = r; y < grid.height - r; ++y) {
    for (int x = r; x < grid.width - r; ++x) {
      const int cb = bin_of(predictor(grid, y, x, r, include_center), cond_bins);
      const int vb = bin_of(grid.at(y, x), value_bins);
      ++joint[static_cast<size_t>(cb) * value_bins + vb];
    }
  }
  int64_t n = 0;
  for (int64_t c : joint) n += c;
  double cond = 0.0;
  for (int cb = 0; cb < cond_bins; ++cb) {
    int64_t nc = 0;
    for (int vb = 0; vb < value_bins; ++vb)
      nc += joint[static_cast<size_t>(cb) * value_bins + vb];
    if (nc == 0) continue;
    for (int vb = 0; vb < value_bins; ++vb) {
      const int64_t c = joint[static_cast<size_t>(cb) * value_bins + vb];
      if (c == 0) continue;
      const double p_joint = static_cast<double>(c) / n;
      const double p_cond = static_cast<double>(c) / nc;
      cond -= p_joint * std::log2(p_cond);
    }
  }
  return cond;
}

double sequence_mse(const SceneSequence& a, const SceneSequence& b) {
  if (a.n_frames() != b.n_frames() || a.width != b.width ||
      a.height != b.height)
    throw std::invalid_argument("mse: sequence shapes differ");
  if (a.n_frames() == 0) throw std::invalid_argument("mse: empty sequences");
  double acc = 0.0;
  int64_t cnt = 0;
  for (int f = 0; f < a.n_frames(); ++f) {
    for (size_t i = 0; i < a.frames[f].pix.size(); ++i) {
      const double d = a.frames[f].pix[i] - b.frames[f].pix[i];
      acc += d * d;
      ++cnt;
    }
  }
  return acc / cnt;
}

}  // namespace spikecodec::ref
