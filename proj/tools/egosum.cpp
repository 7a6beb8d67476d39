// egosum: keyframe summaries of egocentric photostreams.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "egosum/clustering.hpp"
#include "egosum/datamodel.hpp"
#include "egosum/evaluation.hpp"
#include "egosum/ingest.hpp"
#include "egosum/io.hpp"
#include "egosum/keyframes.hpp"
#include "egosum/pipeline.hpp"
#include "egosum/render.hpp"
#include "egosum/temporal.hpp"

namespace fs = std::filesystem;
using namespace egosum;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Flags shared by the pipeline subcommands. Values are applied on top of the
// config file only when the flag was given on the command line.
struct ConfigFlags {
  std::string config_file;
  std::string linkage;
  double cutoff = 0.0;
  double min_event_duration = 0.0;
  std::size_t min_event_frames = 0;
  std::string method;
  std::uint64_t seed = 0;
  bool normalize = false;
  double frame_interval = 0.0;
  double damping = 0.0;

  CLI::Option* opt_linkage = nullptr;
  CLI::Option* opt_cutoff = nullptr;
  CLI::Option* opt_duration = nullptr;
  CLI::Option* opt_frames = nullptr;
  CLI::Option* opt_method = nullptr;
  CLI::Option* opt_seed = nullptr;
  CLI::Option* opt_normalize = nullptr;
  CLI::Option* opt_interval = nullptr;
  CLI::Option* opt_damping = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON pipeline config; flags take precedence");
    opt_linkage = app->add_option("--linkage", linkage, "single|complete|average|ward (default average)");
    opt_cutoff = app->add_option("--cutoff", cutoff, "dendrogram cutoff (default 1.154)");
    opt_duration = app->add_option("--min-event-duration", min_event_duration,
                                   "minimum event duration in seconds (default 180)");
    opt_frames = app->add_option("--min-event-frames", min_event_frames,
                                 "minimum event length in frames, used with --frame-interval");
    opt_method = app->add_option("--method", method,
                                 "random_walk|min_distance|random|uniform (default random_walk)");
    opt_seed = app->add_option("--seed", seed, "seed for the random baseline (default 0)");
    opt_normalize = app->add_flag("--normalize", normalize, "L2-normalize features before clustering");
    opt_interval = app->add_option("--frame-interval", frame_interval,
                                   "ignore manifest timestamps and assume this many seconds per frame (e.g. 30)");
    opt_damping = app->add_option("--damping", damping, "random walk teleport weight (default 0.01)");
  }

  PipelineConfig resolve() const {
    PipelineConfig c;
    if (!config_file.empty()) {
      try {
        merge_config(c, nlohmann::json::parse(read_text_file(config_file)));
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed config " + config_file + ": " + e.what());
      }
    }
    if (opt_linkage->count()) c.linkage = parse_linkage(linkage);
    if (opt_cutoff->count()) c.cutoff = cutoff;
    if (opt_duration->count()) c.min_event_duration = min_event_duration;
    if (opt_frames->count()) c.min_event_frames = min_event_frames;
    if (opt_method->count()) c.method = parse_selection_method(method);
    if (opt_seed->count()) c.seed = seed;
    if (opt_normalize->count()) c.normalize = normalize;
    if (opt_interval->count()) c.frame_interval_seconds = frame_interval;
    if (opt_damping->count()) c.damping = damping;
    if (!(c.cutoff > 0.0)) throw ValidationError("cutoff must be positive");
    if (!(c.min_event_duration > 0.0)) throw ValidationError("min_event_duration must be positive");
    return c;
  }
};

Photostream load_stream(const std::string& manifest, const PipelineConfig& config) {
  ManifestOptions options;
  options.fixed_interval_seconds = config.frame_interval_seconds;
  Photostream stream = load_manifest(manifest, options);
  return config.normalize ? normalize_stream(stream) : stream;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyframe-based visual summaries of egocentric photostreams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kFormatVersion));

  // extract-basic
  auto* extract = app.add_subcommand("extract-basic", "colour-histogram features for an image directory");
  std::string images_dir, out_path, ts_source = "pattern", features_name;
  std::size_t bins = 8;
  bool extract_normalize = false;
  extract->add_option("--images", images_dir, "image directory")->required();
  extract->add_option("--out", out_path, "manifest to write")->required();
  extract->add_option("--bins", bins, "histogram bins per channel")->check(CLI::Range(2, 256));
  extract->add_option("--timestamps", ts_source, "pattern|mtime")->check(CLI::IsMember({"pattern", "mtime"}));
  extract->add_option("--features-file", features_name, "sidecar name (default <manifest stem>.egof)");
  extract->add_flag("--normalize", extract_normalize, "L2-normalize each feature vector");

  // segment
  auto* seg_cmd = app.add_subcommand("segment", "agglomerative clustering and dendrogram cut");
  ConfigFlags seg_flags;
  std::string manifest_path;
  seg_cmd->add_option("--manifest", manifest_path)->required();
  seg_cmd->add_option("--out", out_path, "labels CSV")->required();
  seg_flags.attach(seg_cmd);

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "division and fusion of cluster labels into events");
  ConfigFlags refine_flags;
  std::string labels_path;
  refine_cmd->add_option("--labels", labels_path)->required();
  refine_cmd->add_option("--manifest", manifest_path)->required();
  refine_cmd->add_option("--out", out_path, "events CSV")->required();
  refine_flags.attach(refine_cmd);

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "one keyframe per event");
  ConfigFlags summarize_flags;
  std::string events_path;
  summarize_cmd->add_option("--manifest", manifest_path)->required();
  summarize_cmd->add_option("--events", events_path)->required();
  summarize_cmd->add_option("--out", out_path, "summary JSON")->required();
  summarize_flags.attach(summarize_cmd);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Jaccard score of events against ground truth");
  std::string pred_path, gt_path;
  evaluate_cmd->add_option("--pred", pred_path)->required();
  evaluate_cmd->add_option("--gt", gt_path)->required();
  evaluate_cmd->add_option("--out", out_path, "report JSON (stdout when omitted)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Jaccard score over a range of cutoffs");
  ConfigFlags sweep_flags;
  std::string cutoffs = "0.8:0.05:1.6";
  sweep_cmd->add_option("--manifest", manifest_path)->required();
  sweep_cmd->add_option("--gt", gt_path)->required();
  sweep_cmd->add_option("--cutoffs", cutoffs, "start:step:stop or a comma list");
  sweep_cmd->add_option("--out", out_path, "CSV table (stdout when omitted)");
  sweep_flags.attach(sweep_cmd);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "synthetic photostream with ground truth");
  std::string synth_config, out_dir;
  synth_cmd->add_option("--config", synth_config, "synth JSON config (defaults when omitted)");
  synth_cmd->add_option("--out-dir", out_dir)->required();

  // render
  auto* render_cmd = app.add_subcommand("render", "HTML contact sheet of a summary");
  std::string summary_path;
  render_cmd->add_option("--summary", summary_path)->required();
  render_cmd->add_option("--manifest", manifest_path)->required();
  render_cmd->add_option("--images", images_dir, "image directory")->required();
  render_cmd->add_option("--out", out_path, "HTML file")->required();

  // run-all
  auto* run_cmd = app.add_subcommand("run-all", "segment, refine, summarize, render and evaluate");
  ConfigFlags run_flags;
  run_cmd->add_option("--manifest", manifest_path)->required();
  run_cmd->add_option("--gt", gt_path, "ground-truth CSV");
  run_cmd->add_option("--out-dir", out_dir)->required();
  run_cmd->add_option("--images", images_dir, "image directory (default: manifest directory)");
  run_flags.attach(run_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*extract) {
      ExtractOptions options;
      options.histogram.bins_per_channel = bins;
      options.timestamps = ts_source == "mtime" ? TimestampSource::kModificationTime
                                                : TimestampSource::kFilenamePattern;
      options.normalize = extract_normalize;
      std::vector<std::string> warnings;
      const auto stream = extract_directory(images_dir, options, warnings);
      print_warnings(warnings);
      const fs::path manifest(out_path);
      const fs::path sidecar = features_name.empty() ? fs::path(manifest.stem().string() + ".egof")
                                                     : fs::path(features_name);
      write_manifest(stream, manifest, sidecar);
      std::cerr << "extracted " << stream.size() << " frames, dimension " << stream.dimension() << '\n';
    } else if (*seg_cmd) {
      const auto config = seg_flags.resolve();
      const auto stream = load_stream(manifest_path, config);
      write_frame_labels(out_path, segment(stream, config.linkage, config.cutoff));
    } else if (*refine_cmd) {
      const auto config = refine_flags.resolve();
      const auto stream = load_stream(manifest_path, config);
      const auto labels = read_frame_labels(labels_path, stream.size());
      write_segmentation(out_path, refine(labels, stream, config.fusion()));
    } else if (*summarize_cmd) {
      const auto config = summarize_flags.resolve();
      const auto stream = load_stream(manifest_path, config);
      const auto events = load_ground_truth(events_path, stream);
      SummarizeOptions options;
      options.method = config.method;
      options.parameters = config.summary_parameters();
      options.random_walk.damping = config.damping;
      write_summary(summarize(stream, events, options), out_path);
    } else if (*evaluate_cmd) {
      const auto pred = load_ground_truth(pred_path);
      const auto gt = load_ground_truth(gt_path);
      const auto report = jaccard(pred, gt);
      const auto text = to_json(report, pred, gt).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text_file(out_path, text);
        std::cout << "jaccard " << report.aggregate << '\n';
      }
    } else if (*sweep_cmd) {
      const auto config = sweep_flags.resolve();
      const auto stream = load_stream(manifest_path, config);
      const auto gt = load_ground_truth(gt_path, stream);
      const auto list = parse_cutoff_list(cutoffs);
      const auto csv = sweep_to_csv(sweep_cutoff(stream, gt, config.linkage, list, config.fusion()));
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        write_text_file(out_path, csv);
      }
    } else if (*synth_cmd) {
      SynthConfig config;
      if (!synth_config.empty()) {
        try {
          config = synth_config_from_json(nlohmann::json::parse(read_text_file(synth_config)));
        } catch (const nlohmann::json::parse_error& e) {
          throw ValidationError("malformed synth config: " + std::string(e.what()));
        }
      }
      const auto day = synth_generate(config);
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
      write_manifest(day.stream, fs::path(out_dir) / "manifest.json", "features.egof");
      write_segmentation(fs::path(out_dir) / "gt.csv", day.ground_truth);
    } else if (*render_cmd) {
      const auto stream = load_manifest(manifest_path);
      const auto summary = load_summary(summary_path);
      RenderOptions options;
      options.image_root = images_dir;
      const auto abs_images = fs::absolute(images_dir).lexically_normal();
      const auto abs_out = fs::absolute(fs::path(out_path)).parent_path().lexically_normal();
      options.href_prefix = abs_images.lexically_relative(abs_out).generic_string();
      std::vector<std::string> warnings;
      write_text_file(out_path, render_html(summary, stream, options, warnings));
      print_warnings(warnings);
    } else if (*run_cmd) {
      const auto config = run_flags.resolve();
      std::optional<fs::path> gt;
      if (!gt_path.empty()) gt = gt_path;
      const auto result = run_all(manifest_path, gt, config, out_dir, images_dir);
      print_warnings(result.warnings);
      std::cout << "events " << result.event_count << '\n';
      if (result.aggregate) std::cout << "jaccard " << *result.aggregate << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
