#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosum/datamodel.hpp"

namespace egosum {

struct ContactSheetEntry {
  std::size_t event_id = 0;
  Timestamp span_begin{};
  Timestamp span_end{};
  std::size_t frame_count = 0;
  std::size_t keyframe_index = 0;
  std::string keyframe_id;
};

struct ContactSheet {
  std::string day_id;
  std::string caption;
  std::vector<ContactSheetEntry> entries;  // temporal order
};

/// Resolves every selection against the stream; throws ValidationError on an unknown frame.
ContactSheet build_contact_sheet(const Summary& summary, const Photostream& stream);

struct RenderOptions {
  std::filesystem::path image_root;  // where keyframe files are looked up
  std::string href_prefix;           // prepended to frame ids in <img src>; defaults to image_root
};

/// Static HTML page, one cell per event. Keyframes whose file is missing under
/// `image_root` become placeholder cells and add a message to `warnings`.
std::string render_html(const Summary& summary, const Photostream& stream,
                        const RenderOptions& options, std::vector<std::string>& warnings);

/// Summary document extended with ISO-8601 event spans and frame counts.
/// `summary_from_json` reads it back as the original summary.
nlohmann::ordered_json render_manifest(const Summary& summary, const Photostream& stream);

}  // namespace egosum
