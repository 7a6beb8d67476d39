#include "egosum/render.hpp"

#include <algorithm>
#include <sstream>

#include "egosum/io.hpp"

namespace egosum {

namespace {

std::string escape_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string clock_time(Timestamp t) {
  // HH:MM:SS out of the ISO form.
  return format_iso8601(t).substr(11, 8);
}

}  // namespace

ContactSheet build_contact_sheet(const Summary& summary, const Photostream& stream) {
  validate_summary(summary);
  ContactSheet sheet;
  sheet.day_id = summary.day_id;
  sheet.caption = std::string(to_string(summary.method));
  for (const auto& s : summary.selections) {
    if (s.end_index >= stream.size() || s.frame_index >= stream.size()) {
      throw ValidationError("selection for event " + std::to_string(s.event_id) +
                            " refers to frames beyond the " + std::to_string(stream.size()) +
                            "-frame stream");
    }
    sheet.entries.push_back({s.event_id, stream[s.start_index].timestamp,
                             stream[s.end_index].timestamp, s.end_index - s.start_index + 1,
                             s.frame_index, stream[s.frame_index].frame_id});
  }
  std::stable_sort(sheet.entries.begin(), sheet.entries.end(),
                   [](const auto& a, const auto& b) { return a.span_begin < b.span_begin; });
  return sheet;
}

std::string render_html(const Summary& summary, const Photostream& stream,
                        const RenderOptions& options, std::vector<std::string>& warnings) {
  const ContactSheet sheet = build_contact_sheet(summary, stream);
  std::string prefix = options.href_prefix.empty() ? options.image_root.generic_string()
                                                   : options.href_prefix;
  if (!prefix.empty() && prefix.back() != '/') prefix.push_back('/');

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>" << escape_html(sheet.day_id) << " summary</title>\n"
       << "<style>\n"
       << "body{font-family:sans-serif;margin:1.5em;background:#fafafa}\n"
       << ".sheet{display:flex;flex-wrap:wrap;gap:12px}\n"
       << "figure{margin:0;width:220px;background:#fff;border:1px solid #ccc;padding:6px}\n"
       << "figure img{width:100%;display:block}\n"
       << ".missing{height:150px;display:flex;align-items:center;justify-content:center;"
          "background:#eee;color:#666;font-size:12px;word-break:break-all}\n"
       << "figcaption{font-size:12px;margin-top:4px}\n"
       << "</style>\n</head>\n<body>\n"
       << "<h1>" << escape_html(sheet.day_id) << "</h1>\n"
       << "<p>" << sheet.entries.size() << " events, keyframes by " << escape_html(sheet.caption)
       << "</p>\n<div class=\"sheet\">\n";

  for (const auto& e : sheet.entries) {
    html << "<figure>\n";
    if (std::filesystem::exists(options.image_root / e.keyframe_id)) {
      html << "<img src=\"" << escape_html(prefix + e.keyframe_id) << "\" alt=\""
           << escape_html(e.keyframe_id) << "\">\n";
    } else {
      warnings.push_back("image not found: " + (options.image_root / e.keyframe_id).string());
      html << "<div class=\"missing\">" << escape_html(e.keyframe_id) << "</div>\n";
    }
    html << "<figcaption>" << clock_time(e.span_begin) << " - " << clock_time(e.span_end) << ", "
         << e.frame_count << (e.frame_count == 1 ? " frame" : " frames") << "</figcaption>\n"
         << "</figure>\n";
  }
  html << "</div>\n</body>\n</html>\n";
  return html.str();
}

nlohmann::ordered_json render_manifest(const Summary& summary, const Photostream& stream) {
  const ContactSheet sheet = build_contact_sheet(summary, stream);
  auto doc = summary_to_json(summary);
  doc["caption"] = sheet.caption;
  for (auto& sel : doc["selections"]) {
    const auto start = sel["start_index"].get<std::size_t>();
    const auto end = sel["end_index"].get<std::size_t>();
    sel["start_time"] = format_iso8601(stream[start].timestamp);
    sel["end_time"] = format_iso8601(stream[end].timestamp);
    sel["frame_count"] = end - start + 1;
  }
  return doc;
}

}  // namespace egosum
