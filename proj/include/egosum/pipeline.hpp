#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosum/clustering.hpp"
#include "egosum/datamodel.hpp"
#include "egosum/keyframes.hpp"
#include "egosum/temporal.hpp"

namespace egosum {

struct PipelineConfig {
  LinkageMethod linkage = LinkageMethod::kAverage;
  double cutoff = kDefaultCutoff;
  double min_event_duration = 180.0;
  std::optional<std::size_t> min_event_frames;
  SelectionMethod method = SelectionMethod::kRandomWalk;
  std::uint64_t seed = 0;
  bool normalize = false;
  std::optional<double> frame_interval_seconds;  // synthesize timestamps
  double damping = RandomWalkConfig{}.damping;

  FusionConfig fusion() const { return {min_event_duration, min_event_frames}; }
  SummaryParameters summary_parameters() const {
    return {std::string(to_string(linkage)), cutoff, min_event_duration, seed};
  }
};

/// Overrides the fields present in `doc`; unknown keys are rejected.
void merge_config(PipelineConfig& config, const nlohmann::json& doc);

struct RunArtifacts {
  std::filesystem::path labels;
  std::filesystem::path events;
  std::filesystem::path summary;
  std::filesystem::path sheet;
  std::filesystem::path sheet_manifest;
  std::optional<std::filesystem::path> report;
  std::optional<double> aggregate;
  std::size_t event_count = 0;
  std::vector<std::string> warnings;
};

/// segment -> refine -> summarize -> render (-> evaluate with ground truth), all
/// artifacts written into `out_dir`. Images are looked up under `image_root`
/// (the manifest directory when empty).
RunArtifacts run_all(const std::filesystem::path& manifest,
                     const std::optional<std::filesystem::path>& ground_truth,
                     const PipelineConfig& config, const std::filesystem::path& out_dir,
                     const std::filesystem::path& image_root = {});

}  // namespace egosum
