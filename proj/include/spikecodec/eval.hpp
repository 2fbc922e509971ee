#pragma once

#include <optional>

#include "codec.hpp"
#include "types.hpp"

namespace spikecodec {

// All PSNRs are capped here so identical inputs stay finite and curves
// stay plottable.
inline constexpr double kPsnrCap = 99.0;

// Intervals are clipped to this before comparison; it doubles as the
// PSNR peak in the interval domain.
inline constexpr int kIsiCap = 255;

enum class Domain : uint8_t { Isi, FiringRate };
enum class RdMetric : uint8_t { Scene, Isi, FiringRate };

double mse(const SceneFrame& a, const SceneFrame& b);
double psnr(const SceneFrame& a, const SceneFrame& b, double peak);
double psnr(const SceneSequence& a, const SceneSequence& b, double peak);

// Fidelity between two spike streams measured in interval or rate
// space. recon frame n aligns with raw frame n + recon_start; only
// positions defined (non-sentinel) in both fields count. Symmetric in
// its stream arguments at offset 0. Throws EmptyIntersectionError when
// no position is defined in both, std::invalid_argument on shape
// mismatch or zero frame overlap.
double domain_psnr(const SpikeStream& raw, const SpikeStream& recon,
                   Domain domain, int recon_start = 0);

// Total container bits over coded pixels (width x height x keyframes).
double bpp(const CompressedContainer& c);

struct RdPoint {
  int quality = 0;
  double bpp = 0.0;
  std::optional<double> psnr_scene, psnr_isi, psnr_fr;
};

struct RdCurve {
  std::vector<RdPoint> points;
};

// First adjacent pair (by index) where bpp fails to strictly increase,
// if any. Curves are expected monotone when qualities ascend.
std::optional<std::pair<int, int>> bpp_order_violation(const RdCurve& curve);

// Average bitrate difference of `test` against `anchor` in percent,
// from cubic fits of log10(bpp) against PSNR integrated over the
// overlapping PSNR range. Negative means `test` saves bits. Throws
// std::invalid_argument when either curve has fewer than 4 usable
// points or the PSNR ranges do not overlap.
double bd_rate(const RdCurve& anchor, const RdCurve& test, RdMetric metric);

// Compresses the stream at each quality and measures bpp plus the three
// PSNRs. Scene PSNR compares decoded keyframe scenes against the
// counting reconstruction of the raw stream at the same keyframes.
// A point that fails is skipped (its error lands in `errors` when
// given) and the sweep continues.
RdCurve rd_sweep(const SpikeStream& stream, const CodecConfig& cfg,
                 const std::vector<int>& qualities,
                 std::vector<std::string>* errors = nullptr);

}  // namespace spikecodec
