#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "iris/config.hpp"
#include "iris/error.hpp"
#include "iris/imgcore.hpp"
#include "iris/matching.hpp"
#include "iris/pipeline.hpp"
#include "iris/store.hpp"
#include "iris/synth.hpp"

namespace fs = std::filesystem;
using namespace iris;

namespace {

constexpr int kExitReject = 1;
constexpr int kExitError = 2;

struct Globals {
  std::string config_path;
  std::string reference_pgm;
  bool print_config = false;
};

PipelineConfig effective_config(const Globals& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (!g.reference_pgm.empty()) {
    cfg.reference_pgm = g.reference_pgm;
    cfg.validate();
  }
  return cfg;
}

MatchOptions match_options(const PipelineConfig& cfg) { return {cfg.shifts, cfg.match_threshold, cfg.min_overlap}; }

void print_circle(const char* label, const CircleParams& c) { std::printf("%s %.4f %.4f %.4f\n", label, c.cx, c.cy, c.r); }

// segment ------------------------------------------------------------------

struct SegmentArgs {
  std::string input;
  std::string out_dir;
  bool emit_stages = false;
  std::string method = "cht";
};

int cmd_segment(const Globals& g, const SegmentArgs& a) {
  const PipelineConfig cfg = effective_config(g);
  const Histogram ref = cfg.reference_histogram();
  const auto t0 = std::chrono::steady_clock::now();
  const GrayImage image = load_pgm(a.input);
  const auto out = run_pipeline(image, cfg, ref, a.method == "idop" ? Localizer::Idop : Localizer::Cht);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  print_circle("pupil", out.boundaries.pupil);
  print_circle("limbic", out.boundaries.limbic);
  std::printf("elapsed_seconds %.6f\n", elapsed);
  if (out.quality_warning) {
    std::fprintf(stderr, "warning: pupil boundary quality %.3f below gate %.3f\n", out.boundary_quality, cfg.quality_gate);
  }

  if (a.emit_stages) {
    const fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
    fs::create_directories(dir);
    save_pgm(out.stages.matched, dir / "01_matched.pgm");
    save_pgm(out.stages.blurred, dir / "02_blur.pgm");
    save_pgm(binary_to_gray(out.stages.thresholded), dir / "03_thresh.pgm");
    save_pgm(binary_to_gray(out.stages.edges), dir / "04_edges.pgm");
    save_pgm(overlay_boundaries(image, out.boundaries), dir / "05_boundaries_overlay.pgm");
    save_pgm(out.enhanced.strip, dir / "06_strip.pgm");
    save_pgm(binary_to_gray(out.enhanced.mask), dir / "07_mask.pgm");
  }
  return 0;
}

// enroll / verify / identify ------------------------------------------------

struct StoreArgs {
  std::string input;
  std::string id;
  std::string db;
  bool overwrite = false;
  std::optional<double> threshold;
  int top = 0;
};

PipelineOutput process(const PipelineConfig& cfg, const std::string& path) {
  return run_pipeline(load_pgm(path), cfg, cfg.reference_histogram());
}

int cmd_enroll(const Globals& g, const StoreArgs& a) {
  const PipelineConfig cfg = effective_config(g);
  const auto out = process(cfg, a.input);
  TemplateRecord rec{a.id, out.code, out.boundaries, static_cast<std::int64_t>(std::time(nullptr))};
  enroll(a.db, rec, a.overwrite);
  std::printf("enrolled %s usable_bits=%zu\n", a.id.c_str(), out.code.mask.count());
  return 0;
}

int cmd_verify(const Globals& g, const StoreArgs& a) {
  const PipelineConfig cfg = effective_config(g);
  MatchOptions opts = match_options(cfg);
  if (a.threshold) opts.threshold = *a.threshold;
  const auto probe = process(cfg, a.input);
  const MatchResult r = verify(a.db, a.id, probe.enhanced, opts);
  const bool accept = r.decision == Decision::Accept;
  std::printf("hd=%.6f shift=%d decision=%s\n", r.hd, r.best_shift, accept ? "accept" : "reject");
  return accept ? 0 : kExitReject;
}

int cmd_identify(const Globals& g, const StoreArgs& a) {
  const PipelineConfig cfg = effective_config(g);
  const auto probe = process(cfg, a.input);
  const auto ranked = identify(a.db, probe.enhanced, match_options(cfg));
  const std::size_t n = a.top > 0 ? std::min<std::size_t>(ranked.size(), a.top) : ranked.size();
  for (std::size_t i = 0; i < n; ++i) std::printf("%s %.6f\n", ranked[i].first.c_str(), ranked[i].second.hd);
  return 0;
}

// eval ------------------------------------------------------------------------

struct EvalArgs {
  std::string genuine_list;
  std::string imposter_list;
  std::string out_csv;
  int jobs = 0;
};

using PairList = std::vector<std::pair<std::string, std::string>>;

// One `gallery probe` pair per line; blank lines and `#` comments skipped.
// Relative paths resolve against the list file's directory.
PairList read_pair_list(const fs::path& list) {
  std::ifstream in(list);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + list.string());
  const fs::path base = list.parent_path();
  const auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
  PairList pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a)) continue;
    if (!(ss >> b) || (ss >> extra)) {
      throw Error(ErrorCode::InvalidArgument, list.string() + ":" + std::to_string(lineno) + ": expected two paths");
    }
    pairs.emplace_back(resolve(a), resolve(b));
  }
  return pairs;
}

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const PipelineConfig cfg = effective_config(g);
  const Histogram ref = cfg.reference_histogram();
  const PairList genuine = read_pair_list(a.genuine_list);
  const PairList imposter = read_pair_list(a.imposter_list);
  if (genuine.empty() || imposter.empty()) throw Error(ErrorCode::EmptyInput, "both pair lists must be non-empty");

  std::vector<std::string> paths;
  for (const auto* list : {&genuine, &imposter}) {
    for (const auto& [x, y] : *list) {
      paths.push_back(x);
      paths.push_back(y);
    }
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

  // Each image runs through the pipeline once; workers write disjoint slots.
  std::vector<std::optional<PipelineOutput>> outputs(paths.size());
  std::vector<std::string> failures(paths.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      try {
        outputs[i] = run_pipeline(load_pgm(paths[i]), cfg, ref);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned jobs = a.jobs > 0 ? static_cast<unsigned>(a.jobs) : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, paths.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i]] = i;
  const MatchOptions opts = match_options(cfg);
  const auto score = [&](const PairList& pairs, const char* kind) {
    std::vector<double> scores;
    for (const auto& [gallery, probe] : pairs) {
      const auto& ga = outputs[index[gallery]];
      const auto& pa = outputs[index[probe]];
      if (!ga || !pa) {
        const auto& bad = !ga ? gallery : probe;
        std::fprintf(stderr, "skipping %s pair (%s, %s): %s\n", kind, gallery.c_str(), probe.c_str(),
                     failures[index[bad]].c_str());
        continue;
      }
      try {
        scores.push_back(match_with_shifts(pa->enhanced, ga->code, opts).hd);
      } catch (const Error& e) {
        std::fprintf(stderr, "skipping %s pair (%s, %s): %s\n", kind, gallery.c_str(), probe.c_str(), e.what());
      }
    }
    return scores;
  };
  const auto gs = score(genuine, "genuine");
  const auto is = score(imposter, "imposter");
  if (gs.empty() || is.empty()) throw Error(ErrorCode::EmptyInput, "every pair of one kind failed");

  const std::string csv = format_score_csv(evaluate(gs, is));
  if (a.out_csv.empty() || a.out_csv == "-") {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(a.out_csv, std::ios::binary);
    out << csv;
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + a.out_csv);
  }
  std::fprintf(stderr, "scored %zu genuine and %zu imposter pairs\n", gs.size(), is.size());
  return 0;
}

// synth -----------------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string truth_out;
  synth::EyeSpec spec;
  std::optional<std::uint64_t> noise_seed;
  std::vector<double> specular;
  double dilation = 0.0;
  double rotate = 0.0;
  double add_noise = 0.0;
  int add_clutter = 0;
};

int cmd_synth(SynthArgs a) {
  synth::EyeSpec spec = a.spec;
  spec.identity_seed = a.seed;
  spec.noise_seed = a.noise_seed.value_or(a.seed);
  if (!a.specular.empty()) {
    if (a.specular.size() != 3 && a.specular.size() != 4) {
      throw Error(ErrorCode::SpecInvalid, "--specular takes cx,cy,r[,intensity]");
    }
    spec.specular = synth::Specular{a.specular[0], a.specular[1], a.specular[2],
                                    a.specular.size() == 4 ? static_cast<int>(a.specular[3]) : 250};
  }
  synth::validate(spec);
  if (a.dilation != 0.0) spec = synth::perturb(spec, synth::Perturbation::Dilation, a.dilation);
  if (a.rotate != 0.0) spec = synth::perturb(spec, synth::Perturbation::Rotation, a.rotate);
  if (a.add_noise != 0.0) spec = synth::perturb(spec, synth::Perturbation::Noise, a.add_noise);
  if (a.add_clutter != 0) spec = synth::perturb(spec, synth::Perturbation::Clutter, a.add_clutter);

  const auto eye = synth::render_eye(spec);
  save_pgm(eye.image, a.out);
  const std::string truth = synth::format_truth(eye.truth);
  if (a.truth_out.empty()) {
    std::fputs(truth.c_str(), stdout);
  } else {
    std::ofstream t(a.truth_out, std::ios::binary);
    t << truth;
    if (!t) throw Error(ErrorCode::IoFailure, "cannot write " + a.truth_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iris segmentation, encoding and matching"};
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--reference", g.reference_pgm, "PGM whose histogram replaces the built-in reference");
  app.add_flag("--print-config", g.print_config, "print every effective setting and exit");

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "localize boundaries and encode one image");
  segment->add_option("input", seg.input, "input PGM")->required();
  segment->add_option("-o,--out-dir", seg.out_dir, "directory for stage dumps");
  segment->add_flag("--emit-stages", seg.emit_stages, "write numbered stage PGMs");
  segment->add_option("--method", seg.method, "pupil localizer")->check(CLI::IsMember({"cht", "idop"}));

  StoreArgs st;
  auto* enroll_cmd = app.add_subcommand("enroll", "add an image's template to a store");
  enroll_cmd->add_option("input", st.input, "input PGM")->required();
  enroll_cmd->add_option("--id", st.id, "subject id")->required();
  enroll_cmd->add_option("--db", st.db, "template store")->required();
  enroll_cmd->add_flag("--overwrite", st.overwrite, "replace an existing template");

  auto* verify_cmd = app.add_subcommand("verify", "1:1 match against a stored subject");
  verify_cmd->add_option("input", st.input, "probe PGM")->required();
  verify_cmd->add_option("--id", st.id, "claimed subject id")->required();
  verify_cmd->add_option("--db", st.db, "template store")->required();
  verify_cmd->add_option("--threshold", st.threshold, "accept when hd <= threshold");

  auto* identify_cmd = app.add_subcommand("identify", "rank every stored subject against a probe");
  identify_cmd->add_option("input", st.input, "probe PGM")->required();
  identify_cmd->add_option("--db", st.db, "template store")->required();
  identify_cmd->add_option("--top", st.top, "print only the best N");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "FAR/FRR curve and d' from genuine and imposter pair lists");
  eval_cmd->add_option("genuine", ev.genuine_list, "genuine pair list")->required();
  eval_cmd->add_option("imposter", ev.imposter_list, "imposter pair list")->required();
  eval_cmd->add_option("-o,--out", ev.out_csv, "CSV output (default stdout)");
  eval_cmd->add_option("-j,--jobs", ev.jobs, "worker threads (default: all cores)");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "render a synthetic eye with ground truth");
  synth_cmd->add_option("--seed", sy.seed, "identity seed")->required();
  synth_cmd->add_option("-o,--out", sy.out, "output PGM")->required();
  synth_cmd->add_option("--truth", sy.truth_out, "ground-truth sidecar (default stdout)");
  synth_cmd->add_option("--noise-seed", sy.noise_seed, "noise realization (default: identity seed)");
  synth_cmd->add_option("--width", sy.spec.width);
  synth_cmd->add_option("--height", sy.spec.height);
  synth_cmd->add_option("--pupil-cx", sy.spec.pupil.cx);
  synth_cmd->add_option("--pupil-cy", sy.spec.pupil.cy);
  synth_cmd->add_option("--pupil-r", sy.spec.pupil.r);
  synth_cmd->add_option("--limbic-r", sy.spec.limbic_r);
  synth_cmd->add_option("--sclera", sy.spec.sclera_intensity);
  synth_cmd->add_option("--iris", sy.spec.iris_intensity);
  synth_cmd->add_option("--pupil", sy.spec.pupil_intensity);
  synth_cmd->add_option("--rotation", sy.spec.rotation, "radians, counterclockwise");
  synth_cmd->add_option("--noise", sy.spec.noise_sigma, "Gaussian noise sigma");
  synth_cmd->add_option("--eyelashes", sy.spec.eyelash_count);
  synth_cmd->add_option("--specular", sy.specular, "cx,cy,r[,intensity]")->delimiter(',');
  synth_cmd->add_option("--dilation", sy.dilation, "perturbation: add to the pupil radius");
  synth_cmd->add_option("--rotate", sy.rotate, "perturbation: add to the rotation");
  synth_cmd->add_option("--add-noise", sy.add_noise, "perturbation: add to sigma with a fresh realization");
  synth_cmd->add_option("--add-clutter", sy.add_clutter, "perturbation: add eyelashes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (g.print_config) {
      std::fputs(format_config(effective_config(g)).c_str(), stdout);
      return 0;
    }
    if (segment->parsed()) return cmd_segment(g, seg);
    if (enroll_cmd->parsed()) return cmd_enroll(g, st);
    if (verify_cmd->parsed()) return cmd_verify(g, st);
    if (identify_cmd->parsed()) return cmd_identify(g, st);
    if (eval_cmd->parsed()) return cmd_eval(g, ev);
    if (synth_cmd->parsed()) return cmd_synth(sy);
    std::fputs(app.help().c_str(), stderr);
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return kExitError;
}
