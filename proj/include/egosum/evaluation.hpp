#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosum/clustering.hpp"
#include "egosum/datamodel.hpp"
#include "egosum/temporal.hpp"

namespace egosum {

struct EventMatch {
  std::size_t event = 0;         // index into the detected events
  std::size_t ground_truth = 0;  // index of the best-overlapping segment
  std::size_t intersection = 0;  // frames
  std::size_t union_size = 0;    // frames
  double ratio = 0.0;
};

/// Best-match overlap of every detected event. The indicator matrix M has a
/// single 1 per detected event, at column `matches[i].ground_truth`.
struct JaccardReport {
  std::vector<EventMatch> matches;
  double aggregate = 0.0;  // mean ratio over detected events
  std::size_t detected_count = 0;
  std::size_t ground_truth_count = 0;

  bool indicator(std::size_t event, std::size_t segment) const {
    return matches.at(event).ground_truth == segment;
  }
};

JaccardReport jaccard(const EventSegmentation& predicted, const EventSegmentation& ground_truth);

nlohmann::ordered_json to_json(const JaccardReport& report, const EventSegmentation& predicted,
                               const EventSegmentation& ground_truth);

struct SynthConfig {
  std::size_t num_events = 5;
  std::size_t min_frames_per_event = 20;
  std::size_t max_frames_per_event = 20;
  std::size_t dimension = 64;
  double separation = 10.0;  // minimum centre distance, in multiples of noise_sigma
  double noise_sigma = 1.0;  // RMS norm of the per-frame noise vector
  double frame_interval_seconds = 30.0;
  std::uint64_t seed = 0;
  std::size_t noise_frames = 0;  // single frames inside events replaced by another event's look
  std::string day_id = "synthetic";
  std::string start_time = "2015-03-04T08:00:00Z";
};

SynthConfig synth_config_from_json(const nlohmann::json& doc);

struct SynthDay {
  Photostream stream;
  EventSegmentation ground_truth;
  std::vector<std::size_t> noise_frame_indices;
};

/// Gaussian clusters with pairwise centre separation >= separation * noise_sigma.
/// Features are rounded to float so the stream survives a sidecar round trip unchanged.
/// Uses mt19937_64 with Box-Muller normals, so output is identical across platforms.
SynthDay synth_generate(const SynthConfig& config);

struct SweepRow {
  double cutoff = 0.0;
  double aggregate = 0.0;
  std::size_t events = 0;
};

/// Scores segment + refine at every cutoff; clustering runs once.
std::vector<SweepRow> sweep_cutoff(const Photostream& stream, const EventSegmentation& ground_truth,
                                   LinkageMethod linkage, std::span<const double> cutoffs,
                                   const FusionConfig& fusion = {});

std::string sweep_to_csv(std::span<const SweepRow> rows);

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
std::vector<double> parse_cutoff_list(const std::string& text);

struct DivisionFusionComparison {
  double without_refine = 0.0;  // cut labels split into runs, no fusion
  double with_refine = 0.0;
};

DivisionFusionComparison compare_division_fusion(const Photostream& stream,
                                                 const EventSegmentation& ground_truth,
                                                 LinkageMethod linkage, double cutoff,
                                                 const FusionConfig& fusion = {});

}  // namespace egosum
