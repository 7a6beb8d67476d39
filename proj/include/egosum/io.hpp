#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosum/datamodel.hpp"

namespace egosum {

namespace fs = std::filesystem;

struct ManifestOptions {
  // When set, frame timestamps are synthesized as first + i * interval and any
  // timestamps in the manifest beyond the first are ignored. Default interval is 30 s (2 fpm).
  std::optional<double> fixed_interval_seconds;
};

inline constexpr double kDefaultFrameIntervalSeconds = 30.0;

/// Raw content of an EGOF feature sidecar.
struct FeatureBlock {
  std::size_t frames = 0;
  std::size_t dimension = 0;
  std::vector<float> values;  // row-major, frames x dimension
};

// EGOF layout: "EGOF", u32 version (1), u32 N, u32 D, then N*D f32, all little-endian.
FeatureBlock read_feature_sidecar(const fs::path& path);
void write_feature_sidecar(const fs::path& path, const Photostream& stream);

Photostream load_manifest(const fs::path& path, const ManifestOptions& options = {});

/// Writes the manifest and its sidecar. `features_file` is stored relative to the manifest directory.
void write_manifest(const Photostream& stream, const fs::path& manifest_path,
                    const fs::path& features_file);

/// Reads a `frame_index,event_id` CSV. With `frame_count` unset, the row count defines N.
std::vector<std::size_t> read_frame_labels(const fs::path& path,
                                           std::optional<std::size_t> frame_count = std::nullopt);
void write_frame_labels(const fs::path& path, std::span<const std::size_t> labels);

EventSegmentation load_ground_truth(const fs::path& path, const Photostream& stream);
EventSegmentation load_ground_truth(const fs::path& path,
                                    std::optional<std::size_t> frame_count = std::nullopt);
void write_segmentation(const fs::path& path, const EventSegmentation& seg);

nlohmann::ordered_json summary_to_json(const Summary& summary);
Summary summary_from_json(const nlohmann::json& doc);

/// Validates, then writes. Throws ValidationError before touching the file system.
void write_summary(const Summary& summary, const fs::path& path);
Summary load_summary(const fs::path& path);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view content);

}  // namespace egosum
