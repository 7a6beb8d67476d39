#include "egosum/pipeline.hpp"

#include "egosum/evaluation.hpp"
#include "egosum/ingest.hpp"
#include "egosum/io.hpp"
#include "egosum/render.hpp"

namespace egosum {

void merge_config(PipelineConfig& config, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("pipeline config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "linkage") {
        config.linkage = parse_linkage(value.get<std::string>());
      } else if (key == "cutoff") {
        config.cutoff = value.get<double>();
      } else if (key == "min_event_duration") {
        config.min_event_duration = value.get<double>();
      } else if (key == "min_event_frames") {
        config.min_event_frames = value.get<std::size_t>();
      } else if (key == "method") {
        config.method = parse_selection_method(value.get<std::string>());
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "normalize") {
        config.normalize = value.get<bool>();
      } else if (key == "frame_interval") {
        config.frame_interval_seconds = value.get<double>();
      } else if (key == "damping") {
        config.damping = value.get<double>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid pipeline config: ") + e.what());
  }
  if (!(config.cutoff > 0.0)) throw ValidationError("cutoff must be positive");
  if (!(config.min_event_duration > 0.0)) throw ValidationError("min_event_duration must be positive");
}

RunArtifacts run_all(const std::filesystem::path& manifest,
                     const std::optional<std::filesystem::path>& ground_truth,
                     const PipelineConfig& config, const std::filesystem::path& out_dir,
                     const std::filesystem::path& image_root) {
  ManifestOptions load_options;
  load_options.fixed_interval_seconds = config.frame_interval_seconds;
  Photostream stream = load_manifest(manifest, load_options);
  if (config.normalize) stream = normalize_stream(stream);
  std::optional<EventSegmentation> gt;
  if (ground_truth) gt = load_ground_truth(*ground_truth, stream);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  RunArtifacts out;
  out.labels = out_dir / "labels.csv";
  out.events = out_dir / "events.csv";
  out.summary = out_dir / "summary.json";
  out.sheet = out_dir / "sheet.html";
  out.sheet_manifest = out_dir / "sheet.json";

  const auto labels = segment(stream, config.linkage, config.cutoff);
  write_frame_labels(out.labels, labels);

  const auto divided = divide(labels, stream);
  const auto events = refine(labels, stream, config.fusion());
  write_segmentation(out.events, events);
  out.event_count = events.size();

  SummarizeOptions summarize_options;
  summarize_options.method = config.method;
  summarize_options.parameters = config.summary_parameters();
  summarize_options.random_walk.damping = config.damping;
  const Summary summary = summarize(stream, events, summarize_options);
  write_summary(summary, out.summary);

  RenderOptions render_options;
  render_options.image_root = image_root.empty() ? manifest.parent_path() : image_root;
  const auto abs_images = std::filesystem::absolute(render_options.image_root).lexically_normal();
  const auto abs_out = std::filesystem::absolute(out_dir).lexically_normal();
  render_options.href_prefix = abs_images.lexically_relative(abs_out).generic_string();
  if (render_options.href_prefix.empty()) render_options.href_prefix = abs_images.generic_string();
  write_text_file(out.sheet, render_html(summary, stream, render_options, out.warnings));
  write_text_file(out.sheet_manifest, render_manifest(summary, stream).dump(2) + "\n");

  if (gt) {
    const auto report = jaccard(events, *gt);
    auto doc = to_json(report, events, *gt);
    doc["division_fusion"] = {{"without_refine", jaccard(divided, *gt).aggregate},
                              {"with_refine", report.aggregate}};
    out.report = out_dir / "report.json";
    write_text_file(*out.report, doc.dump(2) + "\n");
    out.aggregate = report.aggregate;
  }
  return out;
}

}  // namespace egosum
