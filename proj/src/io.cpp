#include "spikecodec/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bytes.hpp"

namespace spikecodec {

namespace {

constexpr char kSpikeMagic[4] = {'S', 'P', 'K', '1'};

std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw FormatError("read failed");
  return ss.str();
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  return f;
}

}  // namespace

SpikeStream read_spike_stream(std::istream& in) {
  const std::string buf = read_all(in);
  detail::Reader rd{reinterpret_cast<const uint8_t*>(buf.data()), buf.size()};
  rd.need(4);
  if (std::memcmp(buf.data(), kSpikeMagic, 4) != 0)
    throw FormatError("spike file: bad magic");
  rd.pos = 4;
  const uint32_t w = rd.u32(), h = rd.u32(), n = rd.u32();
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20) || n > (1u << 28))
    throw FormatError("spike file: implausible dimensions");

  const size_t row_bytes = (w + 7) / 8;
  const uint64_t expect = static_cast<uint64_t>(n) * h * row_bytes;
  if (rd.remaining() < expect) throw FormatError("spike file: truncated");
  if (rd.remaining() > expect) throw FormatError("spike file: trailing bytes");

  SpikeStream s(static_cast<int>(w), static_cast<int>(h), static_cast<int>(n));
  const uint8_t* src = rd.data + rd.pos;
  for (uint32_t f = 0; f < n; ++f) {
    for (uint32_t y = 0; y < h; ++y) {
      uint8_t* dst =
          s.bits.data() + (static_cast<size_t>(f) * h + y) * w;
      for (uint32_t x = 0; x < w; ++x)
        dst[x] = (src[x >> 3] >> (x & 7)) & 1;
      src += row_bytes;
    }
  }
  return s;
}

SpikeStream read_spike_file(const std::string& path) {
  auto f = open_binary(path);
  return read_spike_stream(f);
}

void write_spike_stream(const SpikeStream& s, std::ostream& out) {
  std::vector<uint8_t> head;
  head.insert(head.end(), kSpikeMagic, kSpikeMagic + 4);
  detail::put_u32(head, static_cast<uint32_t>(s.width));
  detail::put_u32(head, static_cast<uint32_t>(s.height));
  detail::put_u32(head, static_cast<uint32_t>(s.n_frames));
  out.write(reinterpret_cast<const char*>(head.data()),
            static_cast<std::streamsize>(head.size()));

  // Rows packed 8 pixels per byte, leftmost pixel in bit 0, each row
  // padded to a whole byte.
  const size_t row_bytes = (static_cast<size_t>(s.width) + 7) / 8;
  std::vector<uint8_t> row(row_bytes);
  for (int f = 0; f < s.n_frames; ++f) {
    for (int y = 0; y < s.height; ++y) {
      std::fill(row.begin(), row.end(), 0);
      const uint8_t* src =
          s.bits.data() + (static_cast<size_t>(f) * s.height + y) * s.width;
      for (int x = 0; x < s.width; ++x)
        if (src[x]) row[x >> 3] |= static_cast<uint8_t>(1u << (x & 7));
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row_bytes));
    }
  }
  if (!out) throw std::runtime_error("spike file: write failed");
}

void write_spike_file(const SpikeStream& s, const std::string& path) {
  std::ostringstream ss(std::ios::binary);
  write_spike_stream(s, ss);
  const std::string buf = ss.str();
  write_file_bytes(path, buf.data(), buf.size());
}

namespace {

// One whitespace-delimited token, with '#' comments spanning to end of
// line allowed between tokens.
std::string pgm_token(detail::Reader& rd) {
  while (rd.remaining() > 0) {
    const uint8_t c = rd.data[rd.pos];
    if (c == '#') {
      while (rd.remaining() > 0 && rd.data[rd.pos] != '\n') ++rd.pos;
    } else if (std::isspace(c)) {
      ++rd.pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (rd.remaining() > 0 && !std::isspace(rd.data[rd.pos]) &&
         rd.data[rd.pos] != '#')
    tok.push_back(static_cast<char>(rd.data[rd.pos++]));
  if (tok.empty()) throw FormatError("pgm: truncated header");
  return tok;
}

uint32_t pgm_number(detail::Reader& rd) {
  const std::string tok = pgm_token(rd);
  uint32_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw FormatError("pgm: bad number in header");
  return v;
}

}  // namespace

SceneFrame read_pgm(std::istream& in) {
  const std::string buf = read_all(in);
  detail::Reader rd{reinterpret_cast<const uint8_t*>(buf.data()), buf.size()};
  if (pgm_token(rd) != "P5") throw FormatError("pgm: not a binary graymap");
  const uint32_t w = pgm_number(rd);
  const uint32_t h = pgm_number(rd);
  const uint32_t maxval = pgm_number(rd);
  if (w == 0 || h == 0 || w > 65535 || h > 65535)
    throw FormatError("pgm: bad dimensions");
  if (maxval == 0 || maxval > 255)
    throw FormatError("pgm: unsupported maxval");
  rd.need(1);
  ++rd.pos;  // single whitespace byte before the raster
  const size_t count = static_cast<size_t>(w) * h;
  if (rd.remaining() < count) throw FormatError("pgm: truncated raster");
  if (rd.remaining() > count) throw FormatError("pgm: trailing bytes");

  SceneFrame f(static_cast<int>(w), static_cast<int>(h));
  for (size_t i = 0; i < count; ++i)
    f.pix[i] = static_cast<double>(rd.data[rd.pos + i]) / maxval;
  return f;
}

SceneFrame read_pgm(const std::string& path) {
  auto f = open_binary(path);
  return read_pgm(f);
}

void write_pgm(const SceneFrame& f, std::ostream& out) {
  if (f.width <= 0 || f.height <= 0)
    throw std::invalid_argument("pgm: empty frame");
  out << "P5\n" << f.width << " " << f.height << "\n255\n";
  std::vector<uint8_t> raster(f.pix.size());
  for (size_t i = 0; i < f.pix.size(); ++i)
    raster[i] = static_cast<uint8_t>(
        std::lround(std::clamp(f.pix[i], 0.0, 1.0) * 255.0));
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw std::runtime_error("pgm: write failed");
}

void write_pgm(const SceneFrame& f, const std::string& path) {
  std::ostringstream ss(std::ios::binary);
  write_pgm(f, ss);
  const std::string buf = ss.str();
  write_file_bytes(path, buf.data(), buf.size());
}

SceneSequence read_scene_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw FormatError("scenes: " + dir + " is not a directory");

  std::vector<std::pair<long long, fs::path>> entries;
  size_t stem_width = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".pgm") continue;
    const std::string stem = e.path().stem().string();
    if (stem.empty() ||
        !std::all_of(stem.begin(), stem.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
      throw FormatError("scenes: non-numeric frame name " +
                        e.path().filename().string());
    if (stem_width == 0) stem_width = stem.size();
    if (stem.size() != stem_width)
      throw FormatError(
          "scenes: inconsistent zero padding makes frame order ambiguous");
    entries.emplace_back(std::stoll(stem), e.path());
  }
  if (entries.empty()) throw FormatError("scenes: no .pgm frames in " + dir);
  std::sort(entries.begin(), entries.end());

  SceneSequence seq;
  for (const auto& [idx, path] : entries) {
    SceneFrame f = read_pgm(path.string());
    if (seq.frames.empty()) {
      seq.width = f.width;
      seq.height = f.height;
    } else if (f.width != seq.width || f.height != seq.height) {
      throw FormatError("scenes: frame sizes differ at " +
                        path.filename().string());
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

namespace {

constexpr const char* kRdHeader = "quality,bpp,psnr_scene,psnr_isi,psnr_fr";

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_rd_csv(const RdCurve& curve, std::ostream& out,
                  const std::string& meta) {
  if (!meta.empty()) out << "# " << meta << "\n";
  out << kRdHeader << "\n";
  for (const auto& p : curve.points) {
    out << p.quality << "," << fixed6(p.bpp) << ",";
    if (p.psnr_scene) out << fixed6(*p.psnr_scene);
    out << ",";
    if (p.psnr_isi) out << fixed6(*p.psnr_isi);
    out << ",";
    if (p.psnr_fr) out << fixed6(*p.psnr_fr);
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed");
}

RdCurve read_rd_csv(std::istream& in) {
  RdCurve curve;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kRdHeader)
        throw FormatError("csv: expected header " + std::string(kRdHeader));
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      fields.push_back(line.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) throw FormatError("csv: wrong field count");

    auto num = [&](const std::string& s) -> double {
      try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return v;
      } catch (...) {
        throw FormatError("csv: bad number '" + s + "'");
      }
    };
    RdPoint p;
    p.quality = static_cast<int>(num(fields[0]));
    p.bpp = num(fields[1]);
    if (!fields[2].empty()) p.psnr_scene = num(fields[2]);
    if (!fields[3].empty()) p.psnr_isi = num(fields[3]);
    if (!fields[4].empty()) p.psnr_fr = num(fields[4]);
    curve.points.push_back(p);
  }
  if (!saw_header) throw FormatError("csv: missing header");
  return curve;
}

RdCurve read_rd_csv_file(const std::string& path) {
  auto f = open_binary(path);
  return read_rd_csv(f);
}

void write_analysis_csv(
    const std::vector<std::pair<std::string, double>>& rows,
    std::ostream& out) {
  out << "metric,value\n";
  for (const auto& [name, value] : rows) out << name << "," << fixed6(value) << "\n";
  if (!out) throw std::runtime_error("csv: write failed");
}

void write_trace_csv(const std::vector<StateTrace>& traces,
                     std::ostream& out) {
  out << "tau0,frame,tau,fired,isi\n";
  for (const auto& tr : traces) {
    for (size_t f = 0; f < tr.tau.size(); ++f) {
      out << fixed6(tr.tau0) << "," << f << "," << fixed6(tr.tau[f]) << ","
          << static_cast<int>(tr.fired[f]) << "," << tr.isi[f] << "\n";
    }
  }
  if (!out) throw std::runtime_error("csv: write failed");
}

void write_file_bytes(const std::string& path, const void* data, size_t size) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot create " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  f.flush();
  if (!f) {
    f.close();
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace spikecodec
