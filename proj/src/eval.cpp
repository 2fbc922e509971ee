#include "spikecodec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spikecodec {

namespace {

double capped_psnr(double mse_val, double peak) {
  if (mse_val <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse_val));
}

}  // namespace

double mse(const SceneFrame& a, const SceneFrame& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mse: frame shapes differ");
  if (a.pix.empty()) throw std::invalid_argument("mse: empty frames");
  double acc = 0.0;
  for (size_t i = 0; i < a.pix.size(); ++i) {
    const double d = a.pix[i] - b.pix[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.pix.size());
}

double psnr(const SceneFrame& a, const SceneFrame& b, double peak) {
  return capped_psnr(mse(a, b), peak);
}

double psnr(const SceneSequence& a, const SceneSequence& b, double peak) {
  if (a.n_frames() != b.n_frames())
    throw std::invalid_argument("psnr: frame counts differ");
  if (a.n_frames() == 0) throw std::invalid_argument("psnr: empty sequences");

  const int n = a.n_frames();
  std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < n; ++f) partial[f] = mse(a.frames[f], b.frames[f]);
  double acc = 0.0;
  for (int f = 0; f < n; ++f) acc += partial[f];
  return capped_psnr(acc / n, peak);
}

double domain_psnr(const SpikeStream& raw, const SpikeStream& recon,
                   Domain domain, int recon_start) {
  if (raw.width != recon.width || raw.height != recon.height)
    throw std::invalid_argument("domain psnr: stream shapes differ");

  // recon frame j lines up with raw frame j + recon_start.
  const int j0 = std::max(0, -recon_start);
  const int j1 = std::min(recon.n_frames, raw.n_frames - recon_start);
  if (j1 <= j0)
    throw std::invalid_argument("domain psnr: frame ranges do not overlap");

  const IsiField fa = spikes_to_isi(raw);
  const IsiField fb = spikes_to_isi(recon);
  const size_t plane = fa.plane_size();

  const int nf = j1 - j0;
  std::vector<double> part_sum(nf, 0.0);
  std::vector<int64_t> part_cnt(nf, 0);
#pragma omp parallel for schedule(static)
  for (int jj = 0; jj < nf; ++jj) {
    const int j = j0 + jj;
    const int32_t* pa =
        fa.val.data() + static_cast<size_t>(j + recon_start) * plane;
    const int32_t* pb = fb.val.data() + static_cast<size_t>(j) * plane;
    double acc = 0.0;
    int64_t cnt = 0;
    for (size_t i = 0; i < plane; ++i) {
      const int32_t va = pa[i], vb = pb[i];
      if (va <= 0 || vb <= 0) continue;
      double d;
      if (domain == Domain::Isi) {
        d = static_cast<double>(std::min(va, kIsiCap)) -
            static_cast<double>(std::min(vb, kIsiCap));
      } else {
        d = 1.0 / va - 1.0 / vb;
      }
      acc += d * d;
      ++cnt;
    }
    part_sum[jj] = acc;
    part_cnt[jj] = cnt;
  }

  double acc = 0.0;
  int64_t cnt = 0;
  for (int jj = 0; jj < nf; ++jj) {
    acc += part_sum[jj];
    cnt += part_cnt[jj];
  }
  if (cnt == 0)
    throw EmptyIntersectionError(
        "domain psnr: no position is defined in both streams");
  const double peak = domain == Domain::Isi ? kIsiCap : 1.0;
  return capped_psnr(acc / cnt, peak);
}

double bpp(const CompressedContainer& c) {
  if (c.payloads.empty())
    throw ScheduleEmptyError("bpp: container holds no keyframes");
  const double pixels = static_cast<double>(c.width) * c.height *
                        static_cast<double>(c.payloads.size());
  return static_cast<double>(c.total_bytes()) * 8.0 / pixels;
}

std::optional<std::pair<int, int>> bpp_order_violation(const RdCurve& curve) {
  for (size_t i = 1; i < curve.points.size(); ++i)
    if (!(curve.points[i].bpp > curve.points[i - 1].bpp))
      return std::make_pair(static_cast<int>(i - 1), static_cast<int>(i));
  return std::nullopt;
}

namespace {

std::optional<double> metric_of(const RdPoint& p, RdMetric m) {
  switch (m) {
    case RdMetric::Scene:
      return p.psnr_scene;
    case RdMetric::Isi:
      return p.psnr_isi;
    default:
      return p.psnr_fr;
  }
}

struct Cubic {
  double c[4];
  double eval_integral(double a, double b) const {
    auto prim = [&](double x) {
      return c[0] * x + c[1] * x * x / 2 + c[2] * x * x * x / 3 +
             c[3] * x * x * x * x / 4;
    };
    return prim(b) - prim(a);
  }
};

// Least-squares cubic of y against x via the normal equations; exact
// interpolation when given four points.
Cubic fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  double a[4][5] = {};
  for (size_t i = 0; i < x.size(); ++i) {
    double pw[7];
    pw[0] = 1.0;
    for (int k = 1; k < 7; ++k) pw[k] = pw[k - 1] * x[i];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] += pw[r + c];
      a[r][4] += pw[r] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting on the 4x5 tableau.
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300)
      throw std::invalid_argument("bd rate: degenerate curve fit");
    if (piv != col)
      for (int c = 0; c < 5; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Cubic out;
  for (int r = 0; r < 4; ++r) out.c[r] = a[r][4] / a[r][r];
  return out;
}

struct MetricCurve {
  std::vector<double> psnr, logbpp;
  double lo = 0.0, hi = 0.0;
};

MetricCurve extract(const RdCurve& curve, RdMetric metric) {
  MetricCurve mc;
  for (const auto& p : curve.points) {
    const auto v = metric_of(p, metric);
    if (!v || !(p.bpp > 0.0)) continue;
    mc.psnr.push_back(*v);
    mc.logbpp.push_back(std::log10(p.bpp));
  }
  if (mc.psnr.size() < 4)
    throw std::invalid_argument(
        "bd rate: need at least 4 points with the chosen metric");
  mc.lo = *std::min_element(mc.psnr.begin(), mc.psnr.end());
  mc.hi = *std::max_element(mc.psnr.begin(), mc.psnr.end());
  return mc;
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test, RdMetric metric) {
  MetricCurve a = extract(anchor, metric);
  MetricCurve t = extract(test, metric);

  const double lo = std::max(a.lo, t.lo);
  const double hi = std::min(a.hi, t.hi);
  if (!(hi > lo))
    throw std::invalid_argument("bd rate: PSNR ranges do not overlap");

  // Shift PSNR so the fit is conditioned around the overlap midpoint.
  const double shift = 0.5 * (lo + hi);
  auto shifted = [&](MetricCurve& mc) {
    for (auto& p : mc.psnr) p -= shift;
  };
  shifted(a);
  shifted(t);

  const Cubic fa = fit_cubic(a.psnr, a.logbpp);
  const Cubic ft = fit_cubic(t.psnr, t.logbpp);

  const double span = hi - lo;
  const double avg_diff =
      (ft.eval_integral(lo - shift, hi - shift) -
       fa.eval_integral(lo - shift, hi - shift)) /
      span;
  return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

RdCurve rd_sweep(const SpikeStream& stream, const CodecConfig& cfg,
                 const std::vector<int>& qualities,
                 std::vector<std::string>* errors) {
  if (qualities.empty())
    throw std::invalid_argument("sweep: need at least one quality");

  RdCurve curve;
  // The distortion reference: counting reconstruction of the raw stream
  // at each keyframe, shared by every quality point.
  SceneSequence ref;
  bool have_ref = false;

  for (int q : qualities) {
    try {
      CodecConfig point_cfg = cfg;
      point_cfg.quality = q;
      const CompressedContainer c = compress(stream, point_cfg);
      const DecompressResult res = decompress(c);

      if (!have_ref) {
        ref.width = stream.width;
        ref.height = stream.height;
        const int w_ref =
            cfg.reconstruction == ReconMode::Tfp ? cfg.tfp_window : 31;
        for (int k : res.keyframes)
          ref.frames.push_back(reconstruct_tfp(stream, k, w_ref, cfg.sim));
        have_ref = true;
      }

      RdPoint p;
      p.quality = q;
      p.bpp = bpp(c);
      p.psnr_scene = psnr(ref, res.scenes, 1.0);
      p.psnr_isi = domain_psnr(stream, res.regenerated, Domain::Isi,
                               res.start_frame);
      p.psnr_fr = domain_psnr(stream, res.regenerated, Domain::FiringRate,
                              res.start_frame);
      curve.points.push_back(p);
    } catch (const std::exception& e) {
      if (errors)
        errors->push_back("quality " + std::to_string(q) + ": " + e.what());
    }
  }
  return curve;
}

}  // namespace spikecodec
