#pragma once

#include "frame_codec.hpp"
#include "representation.hpp"
#include "spike_model.hpp"
#include "types.hpp"

namespace spikecodec {

enum class ReconMode : uint8_t { Tfi = 0, Tfp = 1 };

struct CodecConfig {
  int d = 7;
  int s = 6;
  int r = 2;
  int quality = 50;
  bool roi_enabled = false;
  ReconMode reconstruction = ReconMode::Tfp;
  int tfp_window = 31;
  SimulatorConfig sim;  // carried to the decoder for spike regeneration
};

// Throws std::invalid_argument on out-of-range fields.
void validate(const CodecConfig& cfg);

struct CompressedContainer {
  uint16_t version = 1;
  int width = 0;
  int height = 0;
  int n_frames = 0;
  CodecConfig cfg;

  struct Payload {
    int keyframe = 0;
    std::vector<uint8_t> bytes;
  };
  std::vector<Payload> payloads;

  size_t header_bytes() const;
  size_t payload_bytes() const;
  size_t total_bytes() const;
};

// Saliency from temporal activity around keyframe k: the absolute
// firing-rate change between the windows before and after k, scaled so
// a rate change of 0.25 per frame period already saturates at 1.
SaliencyMap activity_map(const SpikeStream& stream, int k,
                         const CodecConfig& cfg);

// Lossless spike coding: each plane's bits under an adaptive binary
// model contexted on (previous plane, left, top). Exact round trip.
std::vector<uint8_t> encode_spikes_lossless(const SpikeStream& stream);
SpikeStream decode_spikes_lossless(const std::vector<uint8_t>& bytes);

// Reconstructs a scene at every scheduled keyframe and codes it.
// Throws ScheduleEmptyError when no keyframe window fits the stream.
CompressedContainer compress(const SpikeStream& stream,
                             const CodecConfig& cfg);

struct DecompressResult {
  int start_frame = 0;  // regenerated frame 0 in the source timeline
  std::vector<int> keyframes;
  SceneSequence scenes;  // decoded keyframe scenes in schedule order
  SpikeStream regenerated;
};

// Decodes every keyframe scene, interpolates luminance linearly between
// keyframes (held constant before the first and after the last), and
// reruns the simulator over [first_k - hw, last_k + hw] clipped to the
// source range, with the header's config but a fixed zero start state.
DecompressResult decompress(const CompressedContainer& container);

// Bit-exact container layout (all little-endian):
//   magic "SPKC", version u16, width/height/n_frames u32, d/s/r u16,
//   alpha/theta f64, reset u8, recon u8, tfp window u16, quality u8,
//   roi u8, keyframe count u32, then per keyframe: index u32,
//   payload length u32, payload bytes.
std::vector<uint8_t> serialize_container(const CompressedContainer& c);
CompressedContainer parse_container(const uint8_t* data, size_t size);

}  // namespace spikecodec
