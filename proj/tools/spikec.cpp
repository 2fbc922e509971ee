#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spikecodec/codec.hpp"
#include "spikecodec/eval.hpp"
#include "spikecodec/io.hpp"

namespace sc = spikecodec;
namespace fs = std::filesystem;

namespace {

sc::ResetMode parse_reset(const std::string& s) {
  if (s == "hard") return sc::ResetMode::Hard;
  if (s == "soft") return sc::ResetMode::Soft;
  throw std::invalid_argument("reset must be 'hard' or 'soft'");
}

// "tfi" or "tfp:<odd window>".
std::pair<sc::ReconMode, int> parse_recon(const std::string& s) {
  if (s == "tfi") return {sc::ReconMode::Tfi, 31};
  if (s.rfind("tfp:", 0) == 0) {
    int w = 0;
    try {
      size_t used = 0;
      w = std::stoi(s.substr(4), &used);
      if (used != s.size() - 4) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("reconstruction window must be an integer");
    }
    return {sc::ReconMode::Tfp, w};
  }
  throw std::invalid_argument("reconstruction must be 'tfi' or 'tfp:<w>'");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    out.push_back(std::stoi(item, &used));
    if (used != item.size())
      throw std::invalid_argument("bad integer list element '" + item + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

struct SimOpts {
  double alpha = 1.0;
  double theta = 2.0;
  std::string reset = "hard";

  sc::SimulatorConfig config() const {
    sc::SimulatorConfig cfg;
    cfg.alpha = alpha;
    cfg.theta = theta;
    cfg.reset = parse_reset(reset);
    return cfg;
  }
};

void add_sim_opts(CLI::App* cmd, SimOpts& o) {
  cmd->add_option("--alpha", o.alpha, "luminance gain per frame period");
  cmd->add_option("--theta", o.theta, "firing threshold");
  cmd->add_option("--reset", o.reset, "reset mode: hard|soft");
}

struct CodecOpts {
  int d = 7, s = 6, r = 2;
  bool roi = false;
  std::string recon = "tfp:31";
  SimOpts sim;

  sc::CodecConfig config(int quality) const {
    sc::CodecConfig cfg;
    cfg.d = d;
    cfg.s = s;
    cfg.r = r;
    cfg.quality = quality;
    cfg.roi_enabled = roi;
    auto [mode, w] = parse_recon(recon);
    cfg.reconstruction = mode;
    cfg.tfp_window = w;
    cfg.sim = sim.config();
    return cfg;
  }
};

void add_codec_opts(CLI::App* cmd, CodecOpts& o) {
  cmd->add_option("--d", o.d, "keyframe stride");
  cmd->add_option("--s", o.s, "window slack beyond r*d");
  cmd->add_option("--r", o.r, "window reach in strides");
  cmd->add_flag("--roi", o.roi, "weight quantization by activity");
  cmd->add_option("--recon", o.recon, "keyframe reconstruction: tfi|tfp:<w>");
  add_sim_opts(cmd, o.sim);
}

void write_text_file(const std::string& path, const std::string& text) {
  sc::write_file_bytes(path, text.data(), text.size());
}

// --- subcommand bodies ---

struct SimulateArgs {
  std::string scenes, out, init = "0";
  uint64_t seed = 0;
  SimOpts sim;
};

void run_simulate(const SimulateArgs& a) {
  sc::SimulatorConfig cfg = a.sim.config();
  if (a.init == "rand") {
    cfg.init = sc::InitPolicy::uniform_random(a.seed);
  } else {
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(a.init, &used);
      if (used != a.init.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("--init must be a number or 'rand'");
    }
    cfg.init = sc::InitPolicy::constant(v);
  }
  const sc::SceneSequence scenes = sc::read_scene_dir(a.scenes);
  const sc::SpikeStream stream = sc::simulate(scenes, cfg);
  sc::write_spike_file(stream, a.out);
  std::cout << "simulated " << stream.n_frames << " frames of "
            << stream.width << "x" << stream.height << "\n";
}

struct EncodeArgs {
  std::string in, out;
  int quality = 50;
  CodecOpts codec;
};

void run_encode(const EncodeArgs& a) {
  const sc::SpikeStream stream = sc::read_spike_file(a.in);
  const sc::CodecConfig cfg = a.codec.config(a.quality);
  const sc::CompressedContainer c = sc::compress(stream, cfg);
  const auto bytes = sc::serialize_container(c);
  sc::write_file_bytes(a.out, bytes.data(), bytes.size());
  std::cout << "keyframes=" << c.payloads.size() << " bytes=" << bytes.size()
            << " bpp=" << sc::bpp(c) << "\n";
}

struct DecodeArgs {
  std::string in, out_spikes, out_scenes;
};

void run_decode(const DecodeArgs& a) {
  std::ifstream f(a.in, std::ios::binary);
  if (!f) throw sc::FormatError("cannot open " + a.in);
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();
  const sc::CompressedContainer c = sc::parse_container(
      reinterpret_cast<const uint8_t*>(buf.data()), buf.size());
  const sc::DecompressResult res = sc::decompress(c);

  sc::write_spike_file(res.regenerated, a.out_spikes);
  if (!a.out_scenes.empty()) {
    fs::create_directories(a.out_scenes);
    char name[32];
    for (size_t i = 0; i < res.scenes.frames.size(); ++i) {
      std::snprintf(name, sizeof name, "%06d.pgm", res.keyframes[i]);
      sc::write_pgm(res.scenes.frames[i],
                    (fs::path(a.out_scenes) / name).string());
    }
  }
  std::cout << "start_frame=" << res.start_frame << "\n"
            << "frames=" << res.regenerated.n_frames << "\n"
            << "keyframes=" << res.keyframes.size() << "\n";
}

struct AnalyzeArgs {
  std::string in, repr = "isi", csv;
  int frame = -1;
  int radius = 2;
  int value_bins = 32;
  int cond_bins = 32;
  SimOpts sim;
};

void run_analyze(const AnalyzeArgs& a) {
  const sc::SpikeStream stream = sc::read_spike_file(a.in);
  const int frame = a.frame >= 0 ? a.frame : stream.n_frames / 2;

  std::vector<std::pair<std::string, double>> rows;
  sc::RepresentationGrid grid;
  sc::IsiStats stats;
  bool have_stats = false;

  if (a.repr == "spike") {
    grid = sc::spike_grid(stream, frame);
  } else if (a.repr == "isi") {
    const sc::IsiField field = sc::spikes_to_isi(stream);
    grid = sc::isi_grid(field, frame);
    stats = sc::isi_distribution(field);
    have_stats = true;
  } else if (a.repr == "scene") {
    grid = sc::scene_grid(
        sc::reconstruct_tfp(stream, frame, 31, a.sim.config()));
  } else {
    throw std::invalid_argument("repr must be spike, isi, or scene");
  }

  // Binary grids only need two value bins.
  const int vbins = a.repr == "spike" ? 2 : a.value_bins;
  rows.emplace_back("variance",
                    sc::neighborhood_variance(grid, a.radius));
  rows.emplace_back("conditional_entropy",
                    sc::conditional_entropy(grid, a.radius, vbins, a.cond_bins));
  if (have_stats) {
    rows.emplace_back("isi_count", static_cast<double>(stats.count));
    if (stats.q1) rows.emplace_back("isi_q1", *stats.q1);
    if (stats.median) rows.emplace_back("isi_median", *stats.median);
    if (stats.q3) rows.emplace_back("isi_q3", *stats.q3);
  }

  std::ostringstream out;
  sc::write_analysis_csv(rows, out);
  write_text_file(a.csv, out.str());
  std::cout << "analyzed frame " << frame << " as " << a.repr << "\n";
}

struct EvalArgs {
  std::string raw, recon, csv;
  int offset = 0;
  SimOpts sim;
};

void run_eval(const EvalArgs& a) {
  const sc::SpikeStream raw = sc::read_spike_file(a.raw);
  const sc::SpikeStream rec = sc::read_spike_file(a.recon);

  const double p_isi = sc::domain_psnr(raw, rec, sc::Domain::Isi, a.offset);
  const double p_fr =
      sc::domain_psnr(raw, rec, sc::Domain::FiringRate, a.offset);

  // Scene comparison at the middle of the frame overlap, both sides
  // reconstructed by counting over the default window.
  const int m0 = std::max(0, a.offset);
  const int m1 = std::min(raw.n_frames, a.offset + rec.n_frames);
  const int mid_raw = (m0 + m1 - 1) / 2;
  const sc::SimulatorConfig cfg = a.sim.config();
  const double p_scene =
      sc::psnr(sc::reconstruct_tfp(raw, mid_raw, 31, cfg),
               sc::reconstruct_tfp(rec, mid_raw - a.offset, 31, cfg), 1.0);

  std::vector<std::pair<std::string, double>> rows = {
      {"psnr_scene", p_scene}, {"psnr_isi", p_isi}, {"psnr_fr", p_fr}};
  std::ostringstream out;
  sc::write_analysis_csv(rows, out);
  write_text_file(a.csv, out.str());
  std::cout << "psnr_scene=" << p_scene << " psnr_isi=" << p_isi
            << " psnr_fr=" << p_fr << "\n";
}

struct SweepArgs {
  std::string in, csv, qualities = "20,40,60,80", bd_against;
  CodecOpts codec;
};

void run_sweep(const SweepArgs& a) {
  const sc::SpikeStream stream = sc::read_spike_file(a.in);
  const std::vector<int> qualities = parse_int_list(a.qualities);
  const sc::CodecConfig cfg = a.codec.config(50);

  std::vector<std::string> errors;
  const sc::RdCurve curve = sc::rd_sweep(stream, cfg, qualities, &errors);
  for (const auto& e : errors) std::cerr << "spikec sweep: " << e << "\n";
  if (curve.points.empty())
    throw std::runtime_error("sweep produced no points");

  if (auto viol = sc::bpp_order_violation(curve)) {
    std::cerr << "spikec sweep: warning: bpp not strictly increasing between "
              << "qualities " << curve.points[viol->first].quality << " and "
              << curve.points[viol->second].quality << "\n";
  }

  std::ostringstream meta;
  meta << "in=" << fs::path(a.in).filename().string() << " d=" << a.codec.d
       << " s=" << a.codec.s << " r=" << a.codec.r
       << " roi=" << (a.codec.roi ? 1 : 0) << " recon=" << a.codec.recon;
  std::ostringstream out;
  sc::write_rd_csv(curve, out, meta.str());
  write_text_file(a.csv, out.str());

  if (!a.bd_against.empty()) {
    const sc::RdCurve anchor = sc::read_rd_csv_file(a.bd_against);
    const std::pair<const char*, sc::RdMetric> metrics[] = {
        {"scene", sc::RdMetric::Scene},
        {"isi", sc::RdMetric::Isi},
        {"fr", sc::RdMetric::FiringRate}};
    for (const auto& [name, metric] : metrics) {
      try {
        const double bd = sc::bd_rate(anchor, curve, metric);
        std::printf("BD-rate %s: %.1f%%\n", name, bd);
      } catch (const std::exception& e) {
        std::printf("BD-rate %s: n/a (%s)\n", name, e.what());
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic spike-camera simulation and compression"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "scenes to spike stream");
  sim_cmd->add_option("--scenes", sim_args.scenes, "directory of numbered .pgm frames")
      ->required();
  sim_cmd->add_option("--out", sim_args.out, "output spike file")->required();
  sim_cmd->add_option("--init", sim_args.init,
                      "start state: a value in [0,theta) or 'rand'");
  sim_cmd->add_option("--seed", sim_args.seed, "seed for 'rand' init");
  add_sim_opts(sim_cmd, sim_args.sim);

  EncodeArgs enc_args;
  auto* enc_cmd = app.add_subcommand("encode", "spike stream to container");
  enc_cmd->add_option("--in", enc_args.in, "input spike file")->required();
  enc_cmd->add_option("--out", enc_args.out, "output container")->required();
  enc_cmd->add_option("--quality", enc_args.quality, "quality in [1,100]");
  add_codec_opts(enc_cmd, enc_args.codec);

  DecodeArgs dec_args;
  auto* dec_cmd = app.add_subcommand("decode", "container to spikes/scenes");
  dec_cmd->add_option("--in", dec_args.in, "input container")->required();
  dec_cmd->add_option("--out-spikes", dec_args.out_spikes,
                      "regenerated spike file")
      ->required();
  dec_cmd->add_option("--out-scenes", dec_args.out_scenes,
                      "directory for decoded keyframe scenes");

  AnalyzeArgs ana_args;
  auto* ana_cmd = app.add_subcommand("analyze", "predictability of one frame");
  ana_cmd->add_option("--in", ana_args.in, "input spike file")->required();
  ana_cmd->add_option("--repr", ana_args.repr, "spike|isi|scene");
  ana_cmd->add_option("--frame", ana_args.frame, "frame index (default middle)");
  ana_cmd->add_option("--radius", ana_args.radius, "neighborhood radius");
  ana_cmd->add_option("--value-bins", ana_args.value_bins, "histogram bins");
  ana_cmd->add_option("--cond-bins", ana_args.cond_bins, "context bins");
  ana_cmd->add_option("--csv", ana_args.csv, "output csv")->required();
  add_sim_opts(ana_cmd, ana_args.sim);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "fidelity between spike files");
  eval_cmd->add_option("--raw", eval_args.raw, "reference spike file")
      ->required();
  eval_cmd->add_option("--recon", eval_args.recon, "reconstructed spike file")
      ->required();
  eval_cmd->add_option("--offset", eval_args.offset,
                       "frame of the reference where the reconstruction starts");
  eval_cmd->add_option("--csv", eval_args.csv, "output csv")->required();
  add_sim_opts(eval_cmd, eval_args.sim);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "rate-distortion curve");
  sweep_cmd->add_option("--in", sweep_args.in, "input spike file")->required();
  sweep_cmd->add_option("--qualities", sweep_args.qualities,
                        "comma-separated qualities");
  sweep_cmd->add_option("--csv", sweep_args.csv, "output csv")->required();
  sweep_cmd->add_option("--bd-against", sweep_args.bd_against,
                        "anchor csv for a BD-rate comparison");
  add_codec_opts(sweep_cmd, sweep_args.codec);

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sim_cmd->parsed()) run_simulate(sim_args);
    else if (enc_cmd->parsed()) run_encode(enc_args);
    else if (dec_cmd->parsed()) run_decode(dec_args);
    else if (ana_cmd->parsed()) run_analyze(ana_args);
    else if (eval_cmd->parsed()) run_eval(eval_args);
    else if (sweep_cmd->parsed()) run_sweep(sweep_args);
  } catch (const sc::FormatError& e) {
    std::cerr << "spikec " << sub << ": " << e.what() << "\n";
    return 2;
  } catch (const sc::ScheduleEmptyError& e) {
    std::cerr << "spikec " << sub << ": " << e.what() << "\n";
    return 3;
  } catch (const sc::EmptyIntersectionError& e) {
    std::cerr << "spikec " << sub << ": " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spikec " << sub << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "spikec " << sub << ": " << e.what() << "\n";
    return 4;
  }
  return 0;
}
