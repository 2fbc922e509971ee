// Release gate. Each criterion prints one [PASS]/[FAIL] line and the
// process exits nonzero unless all pass. Tolerances are pinned as
// constants next to the checks that use them.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "spikecodec/analysis.hpp"
#include "spikecodec/codec.hpp"
#include "spikecodec/eval.hpp"
#include "spikecodec/io.hpp"
#include "spikecodec/range_coder.hpp"
#include "spikecodec/representation.hpp"
#include "spikecodec/spike_model.hpp"

using namespace spikecodec;
using namespace testgen;

namespace {

struct Result {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// --- 1: constant-input spike pattern and simulator speed ---------------
// Accumulating 0.5 per frame against a threshold of 2 with a hard reset
// fires on every fourth frame, starting at frame 3, at every pixel.
constexpr double kSimTimeLimitMs = 1000.0;

Result c1_pattern_and_speed() {
  SimulatorConfig cfg;  // alpha 1, theta 2, hard reset, zero start

  {
    const auto s = simulate(constant_scene(16, 16, 10000, 0.5), cfg);
    for (int f = 0; f < s.n_frames; ++f) {
      const uint8_t want = (f % 4 == 3) ? 1 : 0;
      const uint8_t* p = s.bits.data() + static_cast<size_t>(f) * s.plane_size();
      for (size_t i = 0; i < s.plane_size(); ++i)
        if (p[i] != want)
          return {false, fmt("pattern broke at frame %d", f)};
    }
  }

  double ms = 0.0;
  {
    const auto scene = constant_scene(128, 128, 10000, 0.5);
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = simulate(scene, cfg);
    ms = std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
             .count();
    for (int f = 0; f < s.n_frames; ++f) {
      const uint8_t want = (f % 4 == 3) ? 1 : 0;
      if (s.at(f, 0, 0) != want || s.at(f, 64, 64) != want ||
          s.at(f, 127, 127) != want)
        return {false, fmt("large-run pattern broke at frame %d", f)};
    }
  }
  return {ms < kSimTimeLimitMs,
          fmt("128x128x10000 in %.0f ms, limit %.0f", ms, kSimTimeLimitMs)};
}

// --- 2: interval and rate laws across luminance levels -----------------
// Soft reset keeps the accumulated charge, so over N frames the measured
// mean interval tracks theta/(alpha*I) within one frame and the spike
// count tracks alpha*I/theta within 1/N.
constexpr int kLawFrames = 10000;
constexpr double kIsiMeanTol = 1.0;
constexpr double kRateTol = 1.0 / kLawFrames + 1e-12;

Result c2_interval_rate_laws() {
  SimulatorConfig cfg;
  cfg.reset = ResetMode::Soft;

  double worst_isi = 0.0, worst_rate = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double lum = 0.1 + 0.9 * k / 19.0;
    const auto s = simulate(constant_scene(1, 1, kLawFrames, lum), cfg);
    std::vector<int> times;
    for (int f = 0; f < s.n_frames; ++f)
      if (s.at(f, 0, 0)) times.push_back(f);
    if (times.size() < 2)
      return {false, fmt("under two spikes at luminance %.3f", lum)};

    const double mean_isi =
        static_cast<double>(times.back() - times.front()) /
        (static_cast<double>(times.size()) - 1.0);
    const double rate =
        static_cast<double>(times.size()) / static_cast<double>(kLawFrames);
    worst_isi =
        std::max(worst_isi, std::fabs(mean_isi - expected_isi(lum, cfg)));
    worst_rate = std::max(
        worst_rate, std::fabs(rate - expected_firing_rate(lum, cfg)));
  }
  return {worst_isi <= kIsiMeanTol && worst_rate <= kRateTol,
          fmt("worst interval dev %.4f (tol %.1f), worst rate dev %.2e "
              "(tol %.1e)",
              worst_isi, kIsiMeanTol, worst_rate, kRateTol)};
}

// --- 3: interval stability across accumulator start states -------------
// Different start charges shift the first spike, so spike planes differ
// bit-wise, but every interval after the first spike is set by the input
// alone: exactly under hard reset, within one frame under soft reset.
constexpr int kStateTraceLen = 200;
constexpr double kStateLum = 0.37;

Result c3_start_state_stability() {
  const std::vector<double> trace(kStateTraceLen, kStateLum);
  const std::vector<double> taus = {0.2, 1.0, 1.8};  // of theta = 2

  for (ResetMode mode : {ResetMode::Hard, ResetMode::Soft}) {
    SimulatorConfig cfg;
    cfg.reset = mode;
    const auto traces = initial_state_sweep(trace, cfg, taus);

    int32_t gap_min = INT32_MAX, gap_max = INT32_MIN;
    std::vector<std::vector<int>> spike_times;
    for (const auto& tr : traces) {
      std::vector<int> times;
      for (int f = 0; f < kStateTraceLen; ++f)
        if (tr.fired[f]) times.push_back(f);
      if (times.size() < 2) return {false, "a run produced under two spikes"};
      for (size_t i = 1; i < times.size(); ++i) {
        const int32_t gap = times[i] - times[i - 1];
        gap_min = std::min(gap_min, gap);
        gap_max = std::max(gap_max, gap);
      }
      spike_times.push_back(std::move(times));
    }

    const int32_t spread = gap_max - gap_min;
    if (mode == ResetMode::Hard && spread != 0)
      return {false, fmt("hard-reset interval spread %d, expected 0", spread)};
    if (mode == ResetMode::Soft && spread > 1)
      return {false, fmt("soft-reset interval spread %d, tol 1", spread)};

    for (size_t a = 0; a < traces.size(); ++a) {
      for (size_t b = a + 1; b < traces.size(); ++b) {
        int hamming = 0;
        for (int f = 0; f < kStateTraceLen; ++f)
          hamming += traces[a].fired[f] != traces[b].fired[f];
        if (hamming == 0)
          return {false, fmt("runs %zu and %zu fired identically", a, b)};
      }
    }
  }
  return {true, "intervals stable, spike planes distinct, both reset modes"};
}

// --- 4: predictability ordering: scene < interval < spike --------------
// On naturalistic scenes the neighborhood-prediction residual must rank
// scene below the rate-normalized interval grid below the spike plane,
// and conditional entropy must rank scene below intervals.
constexpr int kOrderingScenes = 5;
constexpr int kOrderingSide = 256;
constexpr int kOrderingFrames = 64;
constexpr int kOrderingK = 32;

Result c4_predictability_ordering() {
  double var_margin = 1e9, ent_margin = 1e9;
  for (int i = 0; i < kOrderingScenes; ++i) {
    const uint64_t seed = 101 + i;
    const SceneFrame frame = natural_frame(kOrderingSide, kOrderingSide, seed);
    SceneSequence scene;
    scene.width = scene.height = kOrderingSide;
    scene.frames.assign(kOrderingFrames, frame);

    // Soft reset with random accumulator phases: the interval field then
    // carries per-pixel timing dither on top of the scene structure
    // instead of collapsing to a deterministic staircase of it.
    SimulatorConfig cfg;
    cfg.reset = ResetMode::Soft;
    cfg.init = InitPolicy::uniform_random(seed);
    const auto stream = simulate(scene, cfg);
    const auto field = spikes_to_isi(stream);
    const auto sg = scene_grid(frame);
    const auto ig = isi_grid(field, kOrderingK);
    const auto pg = spike_grid(stream, kOrderingK);

    for (int r : {1, 2}) {
      const double vs = neighborhood_variance(sg, r);
      const double vi = neighborhood_variance(ig, r);
      const double vp = neighborhood_variance(pg, r);
      var_margin = std::min({var_margin, vi - vs, vp - vi});
      if (!(vs < vi && vi < vp))
        return {false,
                fmt("variance order broke on seed %llu r=%d: scene %.3e, "
                    "interval %.3e, spike %.3e",
                    static_cast<unsigned long long>(seed), r, vs, vi, vp)};
    }
    const double es = conditional_entropy(sg, 2, 32, 32);
    const double ei = conditional_entropy(ig, 2, 32, 32);
    ent_margin = std::min(ent_margin, ei - es);
    if (!(es < ei))
      return {false, fmt("entropy order broke on seed %llu: scene %.3f, "
                         "interval %.3f",
                         static_cast<unsigned long long>(seed), es, ei)};
  }
  return {true, fmt("%d scenes; min variance margin %.2e, min entropy "
                    "margin %.3f",
                    kOrderingScenes, var_margin, ent_margin)};
}

// --- 5: a spurious spike splits exactly one interval --------------------
constexpr int kSplitFrames = 40;
constexpr int kSplitMaxGap = 32;

Result c5_spurious_split() {
  long triples = 0;
  for (int tp = 0; tp + 2 < kSplitFrames; ++tp) {
    const int tn_hi = std::min(kSplitFrames - 1, tp + kSplitMaxGap);
    for (int tn = tp + 2; tn <= tn_hi; ++tn) {
      for (int t = tp + 1; t < tn; ++t) {
        SpikeStream s(1, 1, kSplitFrames);
        s.at(tp, 0, 0) = 1;
        s.at(t, 0, 0) = 1;
        s.at(tn, 0, 0) = 1;
        const auto field = spikes_to_isi(s);
        for (int f = 0; f < kSplitFrames; ++f) {
          int32_t want = 0;
          if (f >= tp && f < t) want = t - tp;
          else if (f >= t && f < tn) want = tn - t;
          if (field.at(f, 0, 0) != want)
            return {false, fmt("triple (%d,%d,%d): frame %d holds %d, "
                               "expected %d",
                               tp, t, tn, f, field.at(f, 0, 0), want)};
        }
        ++triples;
      }
    }
  }
  return {true, fmt("%ld triples, every split exact", triples)};
}

// --- 6: lossless round trips over seeded random instances ---------------
constexpr int kRoundTrips = 1000;

Result c6_lossless_round_trips() {
  for (int i = 0; i < kRoundTrips; ++i) {
    const int w = 1 + i % 23, h = 1 + i % 5, n = 1 + i % 17;
    const double dens = 0.02 + 0.4 * per_index_unit(900, i);

    {
      const auto s = random_stream(w, h, n, dens, 1000 + i);
      std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
      write_spike_stream(s, ss);
      if (!(read_spike_stream(ss) == s))
        return {false, fmt("file round trip broke at instance %d", i)};
    }
    {
      const auto s = random_stream(w, h, n, dens, 2000 + i);
      if (!(isi_repr_to_spikes(spikes_to_isi_repr(s)) == s))
        return {false, fmt("interval bijection broke at instance %d", i)};
    }
    {
      const int alphabet = 2 + i % 319;
      const size_t len = static_cast<size_t>(i) * 7 % 512;
      std::vector<int> symbols(len);
      for (size_t j = 0; j < len; ++j)
        symbols[j] =
            static_cast<int>(per_index_unit(7000 + i, j) * alphabet);
      if (rc_decode(rc_encode(symbols, alphabet), len, alphabet) != symbols)
        return {false, fmt("entropy coder round trip broke at instance %d", i)};
    }
    {
      const auto s = random_stream(w, h, n, dens, 3000 + i);
      if (!(decode_spikes_lossless(encode_spikes_lossless(s)) == s))
        return {false, fmt("plane codec round trip broke at instance %d", i)};
    }
  }
  return {true, fmt("%d instances of each of the four identities", kRoundTrips)};
}

// --- 7: rate-distortion monotonicity and BD-rate oracles ----------------
constexpr double kBdSelfTol = 1e-9;
constexpr double kBdHalfTarget = -50.0;
constexpr double kBdHalfTol = 0.1;
constexpr double kMonoTol = 1e-9;
const std::vector<int> kSweepQualities = {20, 40, 60, 80};

Result check_curve(const RdCurve& curve, const std::vector<std::string>& errs,
                   const char* name) {
  if (!errs.empty()) return {false, fmt("%s: sweep error: %s", name, errs[0].c_str())};
  if (curve.points.size() != kSweepQualities.size())
    return {false, fmt("%s: %zu of %zu points", name, curve.points.size(),
                       kSweepQualities.size())};
  if (auto v = bpp_order_violation(curve))
    return {false, fmt("%s: bpp not increasing between qualities %d and %d",
                       name, curve.points[v->first].quality,
                       curve.points[v->second].quality)};
  for (size_t i = 0; i < curve.points.size(); ++i) {
    if (!curve.points[i].psnr_scene)
      return {false, fmt("%s: missing scene PSNR at quality %d", name,
                         curve.points[i].quality)};
    if (i > 0 && *curve.points[i].psnr_scene <
                     *curve.points[i - 1].psnr_scene - kMonoTol)
      return {false,
              fmt("%s: scene PSNR drops from %.3f to %.3f", name,
                  *curve.points[i - 1].psnr_scene, *curve.points[i].psnr_scene)};
  }
  return {true, ""};
}

Result c7_rate_distortion() {
  SimulatorConfig sim;
  CodecConfig cfg;
  cfg.sim = sim;

  const SpikeStream streams[3] = {
      simulate(static_scene(96, 96, 100, 31), sim),
      simulate(moving_scene(96, 96, 100, 32), sim),
      simulate(bar_scene(96, 96, 100, 8), sim)};
  const char* names[3] = {"static", "moving", "stepping"};

  RdCurve moving_curve;
  for (int i = 0; i < 3; ++i) {
    std::vector<std::string> errs;
    const RdCurve c = rd_sweep(streams[i], cfg, kSweepQualities, &errs);
    const Result r = check_curve(c, errs, names[i]);
    if (!r.ok) return r;
    if (i == 1) moving_curve = c;
  }

  const double self = bd_rate(moving_curve, moving_curve, RdMetric::Scene);
  if (std::fabs(self) > kBdSelfTol)
    return {false, fmt("self comparison gave %.3e%%, tol %.0e", self, kBdSelfTol)};

  RdCurve halved = moving_curve;
  for (auto& p : halved.points) p.bpp /= 2.0;
  const double half = bd_rate(moving_curve, halved, RdMetric::Scene);
  if (std::fabs(half - kBdHalfTarget) > kBdHalfTol)
    return {false, fmt("halved-rate curve gave %.4f%%, expected %.1f +- %.1f",
                       half, kBdHalfTarget, kBdHalfTol)};

  CodecConfig roi_cfg = cfg;
  roi_cfg.roi_enabled = true;
  std::vector<std::string> errs;
  const RdCurve roi_curve = rd_sweep(streams[1], roi_cfg, kSweepQualities, &errs);
  const Result roi_ok = check_curve(roi_curve, errs, "moving+roi");
  if (!roi_ok.ok) return roi_ok;
  const double roi_bd = bd_rate(moving_curve, roi_curve, RdMetric::FiringRate);
  if (!(roi_bd <= 0.0))
    return {false,
            fmt("activity weighting costs rate: %.2f%% (must be <= 0)", roi_bd)};

  return {true, fmt("3 corpora monotone; self 0.0%%, halved %.3f%%, activity "
                    "weighting %.2f%%",
                    half, roi_bd)};
}

// --- 8: reconstruction fidelity in rate and interval domains ------------
constexpr double kRatePsnrFloor = 35.0;
constexpr double kConstLum = 0.45;

SceneSequence slow_scene(int w, int h, int n, uint64_t seed) {
  const SceneFrame bg = natural_frame(w, h, seed, 0.15, 0.4);
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.reserve(n);
  for (int t = 0; t < n; ++t) {
    SceneFrame f = bg;
    const double cx = 0.3 * w + 0.06 * t, cy = 0.55 * h;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x - cx, dy = y - cy;
        f.at(y, x) = std::clamp(
            f.at(y, x) + 0.5 * std::exp(-(dx * dx + dy * dy) / (2.0 * 49.0)),
            0.0, 1.0);
      }
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

// Interval PSNR saturates once decoded luminance is within half a quant
// step of the interval estimate; past that point only pixels sitting on a
// stair boundary move, jittering the metric by ~0.1 dB in either
// direction. Allow that jitter pointwise; the net gain across the sweep
// and the rate-domain floor stay strict.
constexpr double kIsiJitterTol = 0.25;

Result check_fidelity(const SpikeStream& stream, const CodecConfig& cfg,
                      const char* name, bool expect_isi_gain) {
  std::vector<std::string> errs;
  const RdCurve c = rd_sweep(stream, cfg, kSweepQualities, &errs);
  if (!errs.empty()) return {false, fmt("%s: sweep error: %s", name, errs[0].c_str())};
  if (c.points.size() != kSweepQualities.size())
    return {false, fmt("%s: incomplete sweep", name)};

  for (size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    if (!p.psnr_isi || !std::isfinite(*p.psnr_isi) || *p.psnr_isi <= 0.0)
      return {false, fmt("%s: interval PSNR unusable at quality %d", name, p.quality)};
    if (i > 0 && *p.psnr_isi < *c.points[i - 1].psnr_isi - kIsiJitterTol)
      return {false, fmt("%s: interval PSNR drops from %.3f to %.3f", name,
                         *c.points[i - 1].psnr_isi, *p.psnr_isi)};
  }
  const double first_isi = *c.points.front().psnr_isi;
  const double last_isi = *c.points.back().psnr_isi;
  if (expect_isi_gain && !(last_isi > first_isi) && first_isi < kPsnrCap)
    return {false, fmt("%s: interval PSNR flat at %.3f across the sweep",
                       name, first_isi)};

  const auto& top = c.points.back();
  if (!top.psnr_fr)
    return {false, fmt("%s: missing rate PSNR at top quality", name)};
  if (*top.psnr_fr < kRatePsnrFloor)
    return {false, fmt("%s: rate PSNR %.2f under floor %.1f", name,
                       *top.psnr_fr, kRatePsnrFloor)};
  return {true, fmt("%s: top rate PSNR %.1f, interval PSNR %.1f..%.1f", name,
                    *top.psnr_fr, first_isi, last_isi)};
}

Result c8_reconstruction_fidelity() {
  SimulatorConfig sim;
  CodecConfig cfg;
  cfg.sim = sim;
  // Interval-based reconstruction: the counting estimate floor(count/span)
  // sits at or below a stair boundary on strictly periodic streams, so a
  // keyframe's phase decides which interval it regenerates and fidelity
  // stops tracking quality. The interval estimate has no such phase term.
  cfg.reconstruction = ReconMode::Tfi;

  const auto s_const =
      simulate(constant_scene(96, 96, 100, kConstLum), sim);
  const Result r1 = check_fidelity(s_const, cfg, "constant", false);
  if (!r1.ok) return r1;

  const auto s_slow = simulate(slow_scene(96, 96, 100, 41), sim);
  const Result r2 = check_fidelity(s_slow, cfg, "slow-moving", true);
  if (!r2.ok) return r2;

  return {true, r1.detail + "; " + r2.detail};
}

// --- 9: byte-identical recompression and regeneration -------------------
Result c9_determinism() {
  SimulatorConfig sim;
  const auto stream = simulate(moving_scene(64, 64, 80, 9), sim);

  CodecConfig cfg;
  cfg.quality = 60;
  cfg.roi_enabled = true;
  cfg.sim = sim;

  const auto b1 = serialize_container(compress(stream, cfg));
  const auto b2 = serialize_container(compress(stream, cfg));
  if (b1 != b2) return {false, "containers differ between runs"};

  const auto c = parse_container(b1.data(), b1.size());
  const auto d1 = decompress(c);
  const auto d2 = decompress(c);
  if (!(d1.regenerated == d2.regenerated))
    return {false, "regenerated streams differ between runs"};
  if (d1.start_frame != d2.start_frame || d1.keyframes != d2.keyframes)
    return {false, "schedules differ between runs"};
  for (size_t i = 0; i < d1.scenes.frames.size(); ++i)
    if (d1.scenes.frames[i].pix != d2.scenes.frames[i].pix)
      return {false, fmt("decoded scene %zu differs between runs", i)};
  return {true, fmt("%zu container bytes, %d regenerated frames", b1.size(),
                    d1.regenerated.n_frames)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Result (*run)();
  };
  const Criterion criteria[] = {
      {"constant-input spike pattern and simulator speed", c1_pattern_and_speed},
      {"interval and rate laws across luminance levels", c2_interval_rate_laws},
      {"interval stability across accumulator start states",
       c3_start_state_stability},
      {"predictability ordering: scene < interval < spike",
       c4_predictability_ordering},
      {"a spurious spike splits exactly one interval", c5_spurious_split},
      {"lossless round trips over seeded random instances",
       c6_lossless_round_trips},
      {"rate-distortion monotonicity and BD-rate oracles", c7_rate_distortion},
      {"reconstruction fidelity in rate and interval domains",
       c8_reconstruction_fidelity},
      {"byte-identical recompression and regeneration", c9_determinism},
  };

  int passed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d. %s%s%s\n", r.ok ? "PASS" : "FAIL", index, c.name,
                r.detail.empty() ? "" : " — ", r.detail.c_str());
    std::fflush(stdout);
    passed += r.ok;
  }
  std::printf("acceptance: %d/9 criteria pass\n", passed);
  return passed == 9 ? 0 : 1;
}
