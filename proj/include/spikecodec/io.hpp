#pragma once

#include <iosfwd>
#include <string>

#include "analysis.hpp"
#include "eval.hpp"
#include "types.hpp"

namespace spikecodec {

// Spike stream file: magic "SPK1", then width, height, frame count as
// u32 little-endian, then frame planes in order. Every row is packed
// 8 pixels per byte, leftmost pixel in bit 0, rows padded to a byte
// boundary. Throws FormatError on anything malformed.
SpikeStream read_spike_stream(std::istream& in);
SpikeStream read_spike_file(const std::string& path);
void write_spike_stream(const SpikeStream& s, std::ostream& out);
void write_spike_file(const SpikeStream& s, const std::string& path);

// Binary PGM (P5), maxval 255, gray mapped linearly to [0, 1].
SceneFrame read_pgm(std::istream& in);
SceneFrame read_pgm(const std::string& path);
void write_pgm(const SceneFrame& f, std::ostream& out);
void write_pgm(const SceneFrame& f, const std::string& path);

// Loads <dir>/*.pgm as a sequence. File stems must be zero-padded
// numerals of one shared width; anything else in .pgm is rejected, as
// are mixed paddings, duplicate indices, and mismatched frame sizes.
SceneSequence read_scene_dir(const std::string& dir);

// Rate-distortion CSV: optional '#' metadata lines, then the exact
// header `quality,bpp,psnr_scene,psnr_isi,psnr_fr`, then one row per
// point with six-decimal fixed formatting; absent metrics are empty
// fields.
void write_rd_csv(const RdCurve& curve, std::ostream& out,
                  const std::string& meta = "");
RdCurve read_rd_csv(std::istream& in);
RdCurve read_rd_csv_file(const std::string& path);

// `metric,value` rows for a single grid analysis.
void write_analysis_csv(const std::vector<std::pair<std::string, double>>& rows,
                        std::ostream& out);

// Per-frame columns for accumulator traces, one block per start value.
void write_trace_csv(const std::vector<StateTrace>& traces, std::ostream& out);

// Writes all-or-nothing: on any failure the partial file is removed
// before throwing.
void write_file_bytes(const std::string& path, const void* data, size_t size);

}  // namespace spikecodec
