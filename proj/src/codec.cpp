#include "spikecodec/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "bytes.hpp"
#include "spikecodec/range_coder.hpp"

namespace spikecodec {

namespace {
constexpr char kMagic[4] = {'S', 'P', 'K', 'C'};

// A firing-rate change of this much per frame period saturates the
// saliency scale.
constexpr double kActivityFullScale = 0.25;
}  // namespace

void validate(const CodecConfig& cfg) {
  if (cfg.d <= 0) throw std::invalid_argument("codec: d must be positive");
  if (cfg.s < 0 || cfg.r < 0)
    throw std::invalid_argument("codec: s and r must be non-negative");
  if (cfg.quality < 1 || cfg.quality > 100)
    throw std::invalid_argument("codec: quality must lie in [1, 100]");
  if (cfg.tfp_window <= 0 || cfg.tfp_window % 2 == 0)
    throw std::invalid_argument("codec: counting window must be odd");
  if (cfg.d > 65535 || cfg.s > 65535 || cfg.r > 65535 ||
      cfg.tfp_window > 65535)
    throw std::invalid_argument("codec: parameter exceeds 65535");
  validate(cfg.sim);
}

size_t CompressedContainer::header_bytes() const {
  // magic, version, dims, schedule, gains, modes, counts; see
  // serialize_container for the exact layout.
  return 4 + 2 + 12 + 6 + 16 + 1 + 1 + 2 + 1 + 1 + 4 +
         payloads.size() * 8;
}

size_t CompressedContainer::payload_bytes() const {
  size_t n = 0;
  for (const auto& p : payloads) n += p.bytes.size();
  return n;
}

size_t CompressedContainer::total_bytes() const {
  return header_bytes() + payload_bytes();
}

SaliencyMap activity_map(const SpikeStream& stream, int k,
                         const CodecConfig& cfg) {
  validate(cfg);
  if (k < 0 || k >= stream.n_frames)
    throw std::invalid_argument("activity: frame index out of range");

  const int hw = cfg.r * cfg.d + cfg.s;
  const int a0 = std::max(0, k - hw), a1 = k;          // before
  const int b0 = k, b1 = std::min(stream.n_frames, k + hw);  // after
  const int w = stream.width, h = stream.height;
  const size_t plane = stream.plane_size();

  SaliencyMap map(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t off = static_cast<size_t>(y) * w + x;
      double before = 0.0, after = 0.0;
      if (a1 > a0) {
        int c = 0;
        for (int f = a0; f < a1; ++f)
          c += stream.bits[static_cast<size_t>(f) * plane + off];
        before = static_cast<double>(c) / (a1 - a0);
      }
      if (b1 > b0) {
        int c = 0;
        for (int f = b0; f < b1; ++f)
          c += stream.bits[static_cast<size_t>(f) * plane + off];
        after = static_cast<double>(c) / (b1 - b0);
      }
      map.val[off] =
          std::min(std::abs(after - before) / kActivityFullScale, 1.0);
    }
  }
  return map;
}

std::vector<uint8_t> encode_spikes_lossless(const SpikeStream& stream) {
  std::vector<uint8_t> out;
  detail::put_u32(out, static_cast<uint32_t>(stream.width));
  detail::put_u32(out, static_cast<uint32_t>(stream.height));
  detail::put_u32(out, static_cast<uint32_t>(stream.n_frames));

  // Context: same pixel one plane back, left neighbor, top neighbor.
  RangeEncoder rc;
  BinaryModel ctx[8];
  const int w = stream.width, h = stream.height, n = stream.n_frames;
  const size_t plane = stream.plane_size();
  for (int f = 0; f < n; ++f) {
    const uint8_t* cur = stream.bits.data() + static_cast<size_t>(f) * plane;
    const uint8_t* prev = f > 0 ? cur - plane : nullptr;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t off = static_cast<size_t>(y) * w + x;
        const int p = prev ? prev[off] : 0;
        const int l = x > 0 ? cur[off - 1] : 0;
        const int t = y > 0 ? cur[off - w] : 0;
        ctx[p << 2 | l << 1 | t].encode(rc, cur[off]);
      }
    }
  }
  auto coded = rc.finish();
  out.insert(out.end(), coded.begin(), coded.end());
  return out;
}

SpikeStream decode_spikes_lossless(const std::vector<uint8_t>& bytes) {
  detail::Reader rd{bytes.data(), bytes.size()};
  const uint32_t w = rd.u32(), h = rd.u32(), n = rd.u32();
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20) || n > (1u << 28))
    throw FormatError("spike payload: implausible dimensions");

  SpikeStream out(static_cast<int>(w), static_cast<int>(h),
                  static_cast<int>(n));
  RangeDecoder rc(bytes.data() + rd.pos, bytes.size() - rd.pos);
  BinaryModel ctx[8];
  const size_t plane = out.plane_size();
  for (uint32_t f = 0; f < n; ++f) {
    uint8_t* cur = out.bits.data() + static_cast<size_t>(f) * plane;
    const uint8_t* prev = f > 0 ? cur - plane : nullptr;
    for (uint32_t y = 0; y < h; ++y) {
      for (uint32_t x = 0; x < w; ++x) {
        const size_t off = static_cast<size_t>(y) * w + x;
        const int p = prev ? prev[off] : 0;
        const int l = x > 0 ? cur[off - 1] : 0;
        const int t = y > 0 ? cur[off - w] : 0;
        cur[off] = static_cast<uint8_t>(ctx[p << 2 | l << 1 | t].decode(rc));
      }
    }
  }
  return out;
}

CompressedContainer compress(const SpikeStream& stream,
                             const CodecConfig& cfg) {
  validate(cfg);
  if (stream.width <= 0 || stream.height <= 0)
    throw std::invalid_argument("compress: empty stream");
  if (stream.width > 65535 || stream.height > 65535)
    throw std::invalid_argument("compress: stream dimensions exceed 65535");

  const auto schedule =
      keyframe_schedule(stream.n_frames, cfg.d, cfg.s, cfg.r);
  if (schedule.empty()) {
    const int hw = schedule.half_window;
    const int k0 = ((hw + cfg.d - 1) / cfg.d) * cfg.d;
    throw ScheduleEmptyError(
        "compress: no keyframe window fits " +
        std::to_string(stream.n_frames) + " frames (need at least " +
        std::to_string(k0 + hw + 1) + ")");
  }

  CompressedContainer c;
  c.width = stream.width;
  c.height = stream.height;
  c.n_frames = stream.n_frames;
  c.cfg = cfg;
  c.payloads.resize(schedule.keyframes.size());

  const int nk = static_cast<int>(schedule.keyframes.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nk; ++i) {
    const int k = schedule.keyframes[i];
    SceneFrame scene = cfg.reconstruction == ReconMode::Tfi
                           ? reconstruct_tfi(stream, k, cfg.sim)
                           : reconstruct_tfp(stream, k, cfg.tfp_window, cfg.sim);
    c.payloads[i].keyframe = k;
    if (cfg.roi_enabled) {
      SaliencyMap sal = activity_map(stream, k, cfg);
      c.payloads[i].bytes = encode_frame(scene, cfg.quality, &sal);
    } else {
      c.payloads[i].bytes = encode_frame(scene, cfg.quality, nullptr);
    }
  }
  return c;
}

DecompressResult decompress(const CompressedContainer& container) {
  validate(container.cfg);
  if (container.payloads.empty())
    throw FormatError("decompress: container holds no keyframes");
  if (container.width <= 0 || container.height <= 0 ||
      container.n_frames <= 0)
    throw FormatError("decompress: bad container dimensions");

  DecompressResult res;
  const int nk = static_cast<int>(container.payloads.size());
  res.keyframes.resize(nk);
  res.scenes.width = container.width;
  res.scenes.height = container.height;
  res.scenes.frames.resize(nk);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nk; ++i) {
    res.scenes.frames[i] = decode_frame(container.payloads[i].bytes);
  }
  for (int i = 0; i < nk; ++i) {
    res.keyframes[i] = container.payloads[i].keyframe;
    if (res.keyframes[i] < 0 || res.keyframes[i] >= container.n_frames)
      throw FormatError("decompress: keyframe index out of range");
    if (i > 0 && res.keyframes[i] <= res.keyframes[i - 1])
      throw FormatError("decompress: keyframes not increasing");
    if (res.scenes.frames[i].width != container.width ||
        res.scenes.frames[i].height != container.height)
      throw FormatError("decompress: payload dimensions disagree with header");
  }

  const int hw =
      container.cfg.r * container.cfg.d + container.cfg.s;
  const int first_k = res.keyframes.front(), last_k = res.keyframes.back();
  const int start = std::max(0, first_k - hw);
  const int end = std::min(container.n_frames, last_k + hw + 1);
  res.start_frame = start;

  // Regenerate spikes from luminance interpolated linearly between
  // keyframes (held flat outside them), with the carried simulator
  // settings but a fixed zero start state.
  SimulatorConfig sim = container.cfg.sim;
  sim.init = InitPolicy::constant(0.0);

  const int w = container.width, h = container.height;
  const size_t plane = static_cast<size_t>(w) * h;
  res.regenerated = SpikeStream(w, h, end - start);

  std::vector<double> tau(plane, 0.0);
  const double alpha = sim.alpha, theta = sim.theta;
  const bool hard = sim.reset == ResetMode::Hard;

  int seg = 0;  // keyframe interval containing the current frame
  for (int f = start; f < end; ++f) {
    while (seg + 1 < nk && res.keyframes[seg + 1] <= f) ++seg;
    const double* a = res.scenes.frames[seg].pix.data();
    const double* b = a;
    double t = 0.0;
    if (f <= res.keyframes.front()) {
      // flat before the first keyframe
    } else if (seg + 1 < nk) {
      b = res.scenes.frames[seg + 1].pix.data();
      t = static_cast<double>(f - res.keyframes[seg]) /
          (res.keyframes[seg + 1] - res.keyframes[seg]);
    }
    uint8_t* dst =
        res.regenerated.bits.data() + static_cast<size_t>(f - start) * plane;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      const size_t row = static_cast<size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const size_t i = row + x;
        const double l = a[i] + t * (b[i] - a[i]);
        double tv = tau[i] + alpha * l;
        if (tv >= theta) {
          dst[i] = 1;
          if (hard) {
            tv = 0.0;
          } else {
            tv -= theta;
            while (tv >= theta) tv -= theta;
          }
        }
        tau[i] = tv;
      }
    }
  }
  return res;
}

std::vector<uint8_t> serialize_container(const CompressedContainer& c) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u16(out, c.version);
  detail::put_u32(out, static_cast<uint32_t>(c.width));
  detail::put_u32(out, static_cast<uint32_t>(c.height));
  detail::put_u32(out, static_cast<uint32_t>(c.n_frames));
  detail::put_u16(out, static_cast<uint16_t>(c.cfg.d));
  detail::put_u16(out, static_cast<uint16_t>(c.cfg.s));
  detail::put_u16(out, static_cast<uint16_t>(c.cfg.r));
  detail::put_f64(out, c.cfg.sim.alpha);
  detail::put_f64(out, c.cfg.sim.theta);
  detail::put_u8(out, c.cfg.sim.reset == ResetMode::Soft ? 1 : 0);
  detail::put_u8(out, c.cfg.reconstruction == ReconMode::Tfp ? 1 : 0);
  detail::put_u16(out, static_cast<uint16_t>(c.cfg.tfp_window));
  detail::put_u8(out, static_cast<uint8_t>(c.cfg.quality));
  detail::put_u8(out, c.cfg.roi_enabled ? 1 : 0);
  detail::put_u32(out, static_cast<uint32_t>(c.payloads.size()));
  for (const auto& p : c.payloads) {
    detail::put_u32(out, static_cast<uint32_t>(p.keyframe));
    detail::put_u32(out, static_cast<uint32_t>(p.bytes.size()));
    out.insert(out.end(), p.bytes.begin(), p.bytes.end());
  }
  return out;
}

CompressedContainer parse_container(const uint8_t* data, size_t size) {
  detail::Reader rd{data, size};
  rd.need(4);
  if (std::memcmp(data, kMagic, 4) != 0)
    throw FormatError("container: bad magic");
  rd.pos = 4;

  CompressedContainer c;
  c.version = rd.u16();
  if (c.version != 1) throw FormatError("container: unsupported version");
  c.width = static_cast<int>(rd.u32());
  c.height = static_cast<int>(rd.u32());
  c.n_frames = static_cast<int>(rd.u32());
  if (c.width <= 0 || c.height <= 0 || c.width > 65535 || c.height > 65535 ||
      c.n_frames < 0)
    throw FormatError("container: bad dimensions");
  c.cfg.d = rd.u16();
  c.cfg.s = rd.u16();
  c.cfg.r = rd.u16();
  if (c.cfg.d == 0) throw FormatError("container: zero keyframe stride");
  c.cfg.sim.alpha = rd.f64();
  c.cfg.sim.theta = rd.f64();
  if (!std::isfinite(c.cfg.sim.alpha) || c.cfg.sim.alpha <= 0.0 ||
      !std::isfinite(c.cfg.sim.theta) || c.cfg.sim.theta <= 0.0)
    throw FormatError("container: bad simulator gains");
  const uint8_t reset = rd.u8();
  if (reset > 1) throw FormatError("container: bad reset mode");
  c.cfg.sim.reset = reset ? ResetMode::Soft : ResetMode::Hard;
  const uint8_t recon = rd.u8();
  if (recon > 1) throw FormatError("container: bad reconstruction mode");
  c.cfg.reconstruction = recon ? ReconMode::Tfp : ReconMode::Tfi;
  c.cfg.tfp_window = rd.u16();
  if (c.cfg.tfp_window == 0 || c.cfg.tfp_window % 2 == 0)
    throw FormatError("container: bad counting window");
  c.cfg.quality = rd.u8();
  if (c.cfg.quality < 1 || c.cfg.quality > 100)
    throw FormatError("container: quality out of range");
  const uint8_t roi = rd.u8();
  if (roi > 1) throw FormatError("container: bad region flag");
  c.cfg.roi_enabled = roi != 0;

  const uint32_t nk = rd.u32();
  if (nk == 0) throw FormatError("container: zero keyframes");
  if (nk > (1u << 24)) throw FormatError("container: implausible keyframe count");
  c.payloads.reserve(nk);
  for (uint32_t i = 0; i < nk; ++i) {
    CompressedContainer::Payload p;
    p.keyframe = static_cast<int>(rd.u32());
    const uint32_t len = rd.u32();
    rd.need(len);
    p.bytes.assign(data + rd.pos, data + rd.pos + len);
    rd.pos += len;
    c.payloads.push_back(std::move(p));
  }
  if (rd.remaining() != 0)
    throw FormatError("container: trailing bytes");
  return c;
}

}  // namespace spikecodec
