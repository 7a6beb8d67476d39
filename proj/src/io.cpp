#include "egosum/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace egosum {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'G', 'O', 'F'};
constexpr std::uint32_t kSidecarVersion = 1;
constexpr std::size_t kHeaderBytes = 16;
constexpr std::string_view kLabelsHeader = "frame_index,event_id";

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFFu));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) {
    v = (v << 8) | static_cast<unsigned char>(in[pos + static_cast<std::size_t>(k)]);
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::size_t parse_index(std::string_view field, const fs::path& path, std::size_t line) {
  field = trim(field);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ValidationError(path.string() + ":" + std::to_string(line) +
                          ": expected a non-negative integer, got '" + std::string(field) + "'");
  }
  return v;
}

nlohmann::json parse_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureBlock read_feature_sidecar(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() < kHeaderBytes) {
    throw ValidationError("feature sidecar " + path.string() + " is " +
                          std::to_string(bytes.size()) + " bytes, shorter than its 16-byte header");
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ValidationError("feature sidecar " + path.string() + " lacks the EGOF magic");
  }
  if (const auto version = get_u32(bytes, 4); version != kSidecarVersion) {
    throw ValidationError("feature sidecar " + path.string() + " has unsupported version " +
                          std::to_string(version));
  }
  FeatureBlock block;
  block.frames = get_u32(bytes, 8);
  block.dimension = get_u32(bytes, 12);
  const std::size_t expected = kHeaderBytes + block.frames * block.dimension * 4;
  if (bytes.size() != expected) {
    throw ValidationError("feature sidecar " + path.string() + ": expected " +
                          std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()));
  }
  block.values.resize(block.frames * block.dimension);
  for (std::size_t k = 0; k < block.values.size(); ++k) {
    block.values[k] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * k));
  }
  return block;
}

void write_feature_sidecar(const fs::path& path, const Photostream& stream) {
  std::string out;
  out.reserve(kHeaderBytes + stream.size() * stream.dimension() * 4);
  out.append(kMagic.data(), kMagic.size());
  put_u32(out, kSidecarVersion);
  put_u32(out, static_cast<std::uint32_t>(stream.size()));
  put_u32(out, static_cast<std::uint32_t>(stream.dimension()));
  for (const auto& f : stream.frames()) {
    for (double v : f.features) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  write_text_file(path, out);
}

Photostream load_manifest(const fs::path& path, const ManifestOptions& options) {
  const auto doc = parse_json_file(path);
  try {
    const auto day_id = doc.at("day_id").get<std::string>();
    const auto dimension = doc.at("dimension").get<std::size_t>();
    const auto features_file = doc.at("features_file").get<std::string>();
    const auto& entries = doc.at("frames");
    if (!entries.is_array()) throw ValidationError("manifest 'frames' must be an array");

    const fs::path sidecar = path.parent_path() / features_file;
    if (!fs::exists(sidecar)) throw IoError("feature sidecar not found: " + sidecar.string());
    const FeatureBlock block = read_feature_sidecar(sidecar);
    if (block.dimension != dimension) {
      throw ValidationError("manifest declares dimension " + std::to_string(dimension) +
                            " but sidecar " + sidecar.string() + " has " +
                            std::to_string(block.dimension));
    }
    if (block.frames != entries.size()) {
      throw ValidationError("manifest lists " + std::to_string(entries.size()) +
                            " frames but sidecar holds " + std::to_string(block.frames));
    }

    Timestamp base{};
    if (options.fixed_interval_seconds) {
      if (*options.fixed_interval_seconds <= 0.0) {
        throw ValidationError("fixed frame interval must be positive");
      }
      if (!entries.empty() && entries[0].contains("timestamp")) {
        base = parse_iso8601(entries[0]["timestamp"].get<std::string>());
      }
    }

    std::vector<FrameDescriptor> frames(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto& f = frames[i];
      f.frame_index = i;
      f.frame_id = entries[i].at("id").get<std::string>();
      if (options.fixed_interval_seconds) {
        const auto step = std::chrono::duration<double>(*options.fixed_interval_seconds * static_cast<double>(i));
        f.timestamp = base + std::chrono::round<std::chrono::milliseconds>(step);
      } else {
        if (!entries[i].contains("timestamp")) {
          throw ValidationError("frame '" + f.frame_id +
                                "' has no timestamp; supply a fixed frame interval instead");
        }
        f.timestamp = parse_iso8601(entries[i]["timestamp"].get<std::string>());
      }
      const auto row = std::span<const float>(block.values).subspan(i * dimension, dimension);
      f.features.assign(row.begin(), row.end());
    }
    return Photostream::create(day_id, std::move(frames), options.fixed_interval_seconds.has_value());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid manifest " + path.string() + ": " + e.what());
  }
}

void write_manifest(const Photostream& stream, const fs::path& manifest_path,
                    const fs::path& features_file) {
  nlohmann::ordered_json doc;
  doc["day_id"] = stream.day_id();
  doc["dimension"] = stream.dimension();
  doc["features_file"] = features_file.generic_string();
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : stream.frames()) {
    frames.push_back({{"id", f.frame_id}, {"timestamp", format_iso8601(f.timestamp)}});
  }
  doc["frames"] = std::move(frames);
  write_feature_sidecar(manifest_path.parent_path() / features_file, stream);
  write_text_file(manifest_path, doc.dump(2) + "\n");
}

std::vector<std::size_t> read_frame_labels(const fs::path& path,
                                           std::optional<std::size_t> frame_count) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != kLabelsHeader) {
    throw ValidationError(path.string() + ": expected header '" + std::string(kLabelsHeader) + "'");
  }
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected two fields");
    }
    rows.emplace_back(parse_index(text.substr(0, comma), path, line_no),
                      parse_index(text.substr(comma + 1), path, line_no));
  }

  const std::size_t n = frame_count.value_or(rows.size());
  std::vector<std::size_t> labels(n);
  std::vector<bool> seen(n, false);
  for (const auto& [frame, label] : rows) {
    if (frame >= n) {
      throw ValidationError(path.string() + ": unknown frame_index " + std::to_string(frame) +
                            " (stream has " + std::to_string(n) + " frames)");
    }
    if (seen[frame]) {
      throw ValidationError(path.string() + ": duplicate frame_index " + std::to_string(frame));
    }
    seen[frame] = true;
    labels[frame] = label;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) throw ValidationError(path.string() + ": no label for frame " + std::to_string(i));
  }
  if (n == 0) throw ValidationError(path.string() + ": no rows");
  return labels;
}

void write_frame_labels(const fs::path& path, std::span<const std::size_t> labels) {
  std::string out(kLabelsHeader);
  out.push_back('\n');
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out.push_back(',');
    out += std::to_string(labels[i]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

EventSegmentation load_ground_truth(const fs::path& path, const Photostream& stream) {
  return load_ground_truth(path, stream.size());
}

EventSegmentation load_ground_truth(const fs::path& path, std::optional<std::size_t> frame_count) {
  const auto labels = read_frame_labels(path, frame_count);
  return segmentation_from_labels(labels);
}

void write_segmentation(const fs::path& path, const EventSegmentation& seg) {
  validate_segmentation(seg, seg.frame_count());
  write_frame_labels(path, labels_from_segmentation(seg));
}

nlohmann::ordered_json summary_to_json(const Summary& summary) {
  nlohmann::ordered_json doc;
  doc["spec_version"] = std::string(kFormatVersion);
  doc["day_id"] = summary.day_id;
  doc["method"] = std::string(to_string(summary.method));
  doc["parameters"] = {{"linkage", summary.parameters.linkage},
                       {"cutoff", summary.parameters.cutoff},
                       {"min_event_duration", summary.parameters.min_event_duration},
                       {"seed", summary.parameters.seed}};
  auto selections = nlohmann::ordered_json::array();
  for (const auto& s : summary.selections) {
    selections.push_back({{"event_id", s.event_id},
                          {"start_index", s.start_index},
                          {"end_index", s.end_index},
                          {"frame_index", s.frame_index},
                          {"frame_id", s.frame_id}});
  }
  doc["selections"] = std::move(selections);
  return doc;
}

Summary summary_from_json(const nlohmann::json& doc) {
  try {
    Summary s;
    s.day_id = doc.at("day_id").get<std::string>();
    s.method = parse_selection_method(doc.at("method").get<std::string>());
    const auto& p = doc.at("parameters");
    s.parameters.linkage = p.at("linkage").get<std::string>();
    s.parameters.cutoff = p.at("cutoff").get<double>();
    s.parameters.min_event_duration = p.at("min_event_duration").get<double>();
    s.parameters.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& item : doc.at("selections")) {
      Selection sel;
      sel.event_id = item.at("event_id").get<std::size_t>();
      sel.start_index = item.at("start_index").get<std::size_t>();
      sel.end_index = item.at("end_index").get<std::size_t>();
      sel.frame_index = item.at("frame_index").get<std::size_t>();
      sel.frame_id = item.at("frame_id").get<std::string>();
      s.selections.push_back(std::move(sel));
    }
    validate_summary(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid summary document: ") + e.what());
  }
}

void write_summary(const Summary& summary, const fs::path& path) {
  validate_summary(summary);
  write_text_file(path, summary_to_json(summary).dump(2) + "\n");
}

Summary load_summary(const fs::path& path) { return summary_from_json(parse_json_file(path)); }

}  // namespace egosum
