#include "spikecodec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spikecodec {

RepresentationGrid scene_grid(const SceneFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0)
    throw std::invalid_argument("grid: empty frame");
  return {frame.width, frame.height, frame.pix, ReprTag::Scene};
}

RepresentationGrid spike_grid(const SpikeStream& stream, int frame) {
  if (frame < 0 || frame >= stream.n_frames)
    throw std::invalid_argument("grid: frame index out of range");
  RepresentationGrid g;
  g.width = stream.width;
  g.height = stream.height;
  g.tag = ReprTag::Spike;
  const size_t plane = stream.plane_size();
  g.val.resize(plane);
  const uint8_t* src = stream.bits.data() + static_cast<size_t>(frame) * plane;
  for (size_t i = 0; i < plane; ++i) g.val[i] = src[i] ? 1.0 : 0.0;
  return g;
}

RepresentationGrid isi_grid(const IsiField& field, int frame) {
  if (frame < 0 || frame >= field.n_frames)
    throw std::invalid_argument("grid: frame index out of range");
  RepresentationGrid g;
  g.width = field.width;
  g.height = field.height;
  g.tag = ReprTag::Isi;
  const size_t plane = field.plane_size();
  g.val.resize(plane);
  const int32_t* src = field.val.data() + static_cast<size_t>(frame) * plane;
  for (size_t i = 0; i < plane; ++i) g.val[i] = src[i] > 0 ? 1.0 / src[i] : 0.0;
  return g;
}

namespace {

void check_window(const RepresentationGrid& g, int r) {
  if (r <= 0) throw std::invalid_argument("analysis: radius must be positive");
  const int side = 2 * r + 1;
  if (g.width < side || g.height < side)
    throw std::invalid_argument("analysis: grid smaller than the window");
}

// Neighborhood mean and center value at (y, x).
inline std::pair<double, double> window_pred(const RepresentationGrid& g,
                                             int y, int x, int r,
                                             bool include_center) {
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) sum += g.at(y + dy, x + dx);
  const double center = g.at(y, x);
  const int side = 2 * r + 1;
  int cnt = side * side;
  if (!include_center) {
    sum -= center;
    cnt -= 1;
  }
  return {sum / cnt, center};
}

inline int bin_of(double v, int bins) {
  int b = static_cast<int>(v * bins);
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

double neighborhood_variance(const RepresentationGrid& grid, int r,
                             bool include_center) {
  check_window(grid, r);
  const int h = grid.height, w = grid.width;

  // Row partials combined in row order keep the sum independent of the
  // thread count.
  std::vector<double> partial(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = r; y < h - r; ++y) {
    double acc = 0.0;
    for (int x = r; x < w - r; ++x) {
      auto [pred, center] = window_pred(grid, y, x, r, include_center);
      const double d = center - pred;
      acc += d * d;
    }
    partial[y] = acc;
  }
  double total = 0.0;
  for (int y = r; y < h - r; ++y) total += partial[y];
  const int64_t interior =
      static_cast<int64_t>(h - 2 * r) * static_cast<int64_t>(w - 2 * r);
  return total / interior;
}

double conditional_entropy(const RepresentationGrid& grid, int r,
                           int value_bins, int cond_bins,
                           bool include_center) {
  check_window(grid, r);
  if (value_bins < 2 || cond_bins < 2)
    throw std::invalid_argument("analysis: bin counts must be at least 2");

  const int h = grid.height, w = grid.width;
  const size_t cells = static_cast<size_t>(value_bins) * cond_bins;
  std::vector<int64_t> joint(cells, 0);

#pragma omp parallel
  {
    std::vector<int64_t> local(cells, 0);
#pragma omp for schedule(static) nowait
    for (int y = r; y < h - r; ++y) {
      for (int x = r; x < w - r; ++x) {
        auto [pred, center] = window_pred(grid, y, x, r, include_center);
        const int cb = bin_of(pred, cond_bins);
        const int vb = bin_of(center, value_bins);
        ++local[static_cast<size_t>(cb) * value_bins + vb];
      }
    }
#pragma omp critical
    for (size_t i = 0; i < cells; ++i) joint[i] += local[i];
  }

  int64_t n = 0;
  for (int64_t c : joint) n += c;

  double cond = 0.0;
  for (int cb = 0; cb < cond_bins; ++cb) {
    int64_t nc = 0;
    for (int vb = 0; vb < value_bins; ++vb)
      nc += joint[static_cast<size_t>(cb) * value_bins + vb];
    if (nc == 0) continue;
    double hc = 0.0;
    for (int vb = 0; vb < value_bins; ++vb) {
      const int64_t cnt = joint[static_cast<size_t>(cb) * value_bins + vb];
      if (cnt == 0) continue;
      const double p = static_cast<double>(cnt) / nc;
      hc -= p * std::log2(p);
    }
    cond += (static_cast<double>(nc) / n) * hc;
  }

  // Conditioning can never add information; verify against the
  // unconditional entropy of the same histogram.
  double plain = 0.0;
  for (int vb = 0; vb < value_bins; ++vb) {
    int64_t nv = 0;
    for (int cb = 0; cb < cond_bins; ++cb)
      nv += joint[static_cast<size_t>(cb) * value_bins + vb];
    if (nv == 0) continue;
    const double p = static_cast<double>(nv) / n;
    plain -= p * std::log2(p);
  }
  if (cond > plain + 1e-9)
    throw std::logic_error("analysis: conditional entropy exceeds entropy");
  return cond;
}

IsiStats isi_distribution(const IsiField& field) {
  IsiStats st;
  const int n = field.n_frames;
  const size_t plane = field.plane_size();
  // Positions inside an interval all carry its length; stepping by the
  // value at each defined position visits every interval exactly once.
  for (size_t off = 0; off < plane; ++off) {
    int f = 0;
    while (f < n) {
      const int32_t v = field.val[static_cast<size_t>(f) * plane + off];
      if (v <= 0) {
        ++f;
      } else {
        ++st.histogram[v];
        f += v;
      }
    }
  }
  for (const auto& [v, c] : st.histogram) st.count += c;
  if (st.count == 0) return st;

  auto order_stat = [&](int64_t k) -> double {
    int64_t seen = 0;
    for (const auto& [v, c] : st.histogram) {
      if (k < seen + c) return v;
      seen += c;
    }
    return st.histogram.rbegin()->first;
  };
  // Linear interpolation between the order statistics bracketing the
  // fractional rank (m - 1) * q.
  auto quantile = [&](double q) {
    const double hpos = static_cast<double>(st.count - 1) * q;
    const int64_t i0 = static_cast<int64_t>(hpos);
    const double frac = hpos - static_cast<double>(i0);
    const double x0 = order_stat(i0);
    if (frac == 0.0) return x0;
    return x0 + frac * (order_stat(i0 + 1) - x0);
  };
  st.q1 = quantile(0.25);
  st.median = quantile(0.5);
  st.q3 = quantile(0.75);
  return st;
}

std::vector<StateTrace> initial_state_sweep(
    const std::vector<double>& lum_trace, const SimulatorConfig& cfg,
    const std::vector<double>& taus) {
  validate(cfg);
  if (lum_trace.empty())
    throw std::invalid_argument("state sweep: empty luminance trace");
  for (double t0 : taus)
    if (!(t0 >= 0.0 && t0 < cfg.theta))
      throw std::invalid_argument("state sweep: start state outside [0, theta)");

  const int n = static_cast<int>(lum_trace.size());
  std::vector<StateTrace> out;
  out.reserve(taus.size());
  for (double t0 : taus) {
    StateTrace tr;
    tr.tau0 = t0;
    tr.tau.resize(n);
    tr.fired.assign(n, 0);
    tr.isi.assign(n, 0);
    double tau = t0;
    for (int f = 0; f < n; ++f) {
      auto res = step(tau, lum_trace[f], cfg);
      tau = res.tau;
      tr.tau[f] = res.tau;
      tr.fired[f] = res.fired ? 1 : 0;
    }
    int prev = -1;
    for (int f = 0; f < n; ++f) {
      if (!tr.fired[f]) continue;
      if (prev >= 0)
        for (int m = prev; m < f; ++m) tr.isi[m] = f - prev;
      prev = f;
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace spikecodec
