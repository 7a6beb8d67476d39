#include "egosum/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

namespace egosum {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw ValidationError("truncated timestamp: '" + std::string(text) + "'");
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc{} || ptr != text.data() + pos + count) {
    throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_digits(text, 0, 4);
  expect_char(text, 4, "-");
  const int mo = parse_digits(text, 5, 2);
  expect_char(text, 7, "-");
  const int d = parse_digits(text, 8, 2);
  expect_char(text, 10, "T ");
  const int hh = parse_digits(text, 11, 2);
  expect_char(text, 13, ":");
  const int mm = parse_digits(text, 14, 2);
  expect_char(text, 16, ":");
  const int ss = parse_digits(text, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw ValidationError("timestamp out of range: '" + std::string(text) + "'");
  }

  std::size_t pos = 19;
  milliseconds frac{0};
  if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
    ++pos;
    const std::size_t begin = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == begin) throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
    // Sub-millisecond digits are truncated.
    int scale = 100;
    for (std::size_t k = begin; k < pos && scale > 0; ++k, scale /= 10) {
      frac += milliseconds{(text[k] - '0') * scale};
    }
  }

  minutes offset{0};
  if (pos < text.size()) {
    if (text[pos] == 'Z' || text[pos] == 'z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const int sign = text[pos] == '-' ? -1 : 1;
      const int oh = parse_digits(text, pos + 1, 2);
      std::size_t next = pos + 3;
      if (next < text.size() && text[next] == ':') ++next;
      const int om = parse_digits(text, next, 2);
      offset = minutes{sign * (oh * 60 + om)};
      pos = next + 2;
    }
  }
  if (pos != text.size()) {
    throw ValidationError("trailing characters in timestamp: '" + std::string(text) + "'");
  }

  const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + frac;
  return time_point_cast<milliseconds>(local - offset);
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  const int y = static_cast<int>(ymd.year());
  const unsigned mo = static_cast<unsigned>(ymd.month());
  const unsigned d = static_cast<unsigned>(ymd.day());
  const auto h = static_cast<long>(tod.hours().count());
  const auto m = static_cast<long>(tod.minutes().count());
  const auto s = static_cast<long>(tod.seconds().count());
  const auto ms = static_cast<long>(tod.subseconds().count());
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", y, mo, d, h, m, s);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", y, mo, d, h, m, s, ms);
  }
  return buf;
}

double seconds_between(Timestamp earlier, Timestamp later) {
  return std::chrono::duration<double>(later - earlier).count();
}

Photostream Photostream::create(std::string day_id, std::vector<FrameDescriptor> frames,
                                bool synthetic_timestamps) {
  if (frames.empty()) throw ValidationError("photostream has no frames");
  const std::size_t dim = frames.front().features.size();
  if (dim == 0) throw ValidationError("feature dimension must be positive");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.frame_index != i) {
      throw ValidationError("frame '" + f.frame_id + "' has frame_index " +
                            std::to_string(f.frame_index) + " at position " + std::to_string(i));
    }
    if (f.features.size() != dim) {
      throw ValidationError("frame '" + f.frame_id + "' has " + std::to_string(f.features.size()) +
                            " features, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      if (!std::isfinite(f.features[c])) {
        throw ValidationError("non-finite feature in frame '" + f.frame_id + "' at component " +
                              std::to_string(c));
      }
    }
    if (i > 0 && f.timestamp < frames[i - 1].timestamp) {
      throw ValidationError("timestamps decrease at frame '" + f.frame_id + "' (" +
                            format_iso8601(f.timestamp) + " < " +
                            format_iso8601(frames[i - 1].timestamp) + ")");
    }
  }
  Photostream s;
  s.day_id_ = std::move(day_id);
  s.dimension_ = dim;
  s.frames_ = std::move(frames);
  s.synthetic_timestamps_ = synthetic_timestamps;
  return s;
}

std::span<const FrameDescriptor> Photostream::slice(std::size_t first,
                                                    std::size_t last_inclusive) const {
  if (first > last_inclusive || last_inclusive >= frames_.size()) {
    throw ValidationError("frame range [" + std::to_string(first) + ", " +
                          std::to_string(last_inclusive) + "] outside photostream of " +
                          std::to_string(frames_.size()) + " frames");
  }
  return std::span<const FrameDescriptor>(frames_).subspan(first, last_inclusive - first + 1);
}

void validate_segmentation(const EventSegmentation& seg, std::size_t frame_count) {
  if (seg.events.empty()) throw ValidationError("segmentation has no events");
  std::unordered_set<std::size_t> ids;
  std::size_t expected_start = 0;
  for (const auto& e : seg.events) {
    if (e.start_index != expected_start || e.end_index < e.start_index) {
      throw ValidationError("event " + std::to_string(e.event_id) + " spans [" +
                            std::to_string(e.start_index) + ", " + std::to_string(e.end_index) +
                            "] but should start at " + std::to_string(expected_start));
    }
    if (!ids.insert(e.event_id).second) {
      throw ValidationError("duplicate event id " + std::to_string(e.event_id));
    }
    expected_start = e.end_index + 1;
  }
  if (expected_start != frame_count) {
    throw ValidationError("segmentation covers " + std::to_string(expected_start) +
                          " frames, expected " + std::to_string(frame_count));
  }
}

double event_duration_seconds(const Event& event, const Photostream& stream) {
  return seconds_between(stream[event.start_index].timestamp, stream[event.end_index].timestamp);
}

EventSegmentation segmentation_from_labels(std::span<const std::size_t> labels) {
  EventSegmentation seg;
  if (labels.empty()) return seg;
  std::size_t next_fresh = *std::max_element(labels.begin(), labels.end()) + 1;
  std::set<std::size_t> used;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i == labels.size() || labels[i] != labels[start]) {
      std::size_t id = labels[start];
      if (!used.insert(id).second) id = next_fresh++;
      seg.events.push_back({id, start, i - 1});
      start = i;
    }
  }
  return seg;
}

std::vector<std::size_t> labels_from_segmentation(const EventSegmentation& seg) {
  std::vector<std::size_t> labels(seg.frame_count());
  for (const auto& e : seg.events) {
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(e.start_index),
              labels.begin() + static_cast<std::ptrdiff_t>(e.end_index + 1), e.event_id);
  }
  return labels;
}

std::vector<double> DistanceMatrix::row_sums() const {
  std::vector<double> v(order_, 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < order_; ++j) acc += (*this)(i, j);
    v[i] = acc;
  }
  return v;
}

void DistanceMatrix::validate() const {
  for (std::size_t i = 0; i < order_; ++i) {
    if ((*this)(i, i) != 0.0) throw ValidationError("distance matrix has non-zero diagonal");
    for (std::size_t j = 0; j < order_; ++j) {
      const double a = (*this)(i, j);
      if (!std::isfinite(a) || a < 0.0) {
        throw ValidationError("distance matrix entry (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") is negative or non-finite");
      }
      if (a != (*this)(j, i)) throw ValidationError("distance matrix is not symmetric");
    }
  }
}

std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kRandomWalk: return "random_walk";
    case SelectionMethod::kMinDistance: return "min_distance";
    case SelectionMethod::kRandom: return "random";
    case SelectionMethod::kUniform: return "uniform";
  }
  return "unknown";
}

SelectionMethod parse_selection_method(std::string_view name) {
  for (auto m : {SelectionMethod::kRandomWalk, SelectionMethod::kMinDistance,
                 SelectionMethod::kRandom, SelectionMethod::kUniform}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown selection method '" + std::string(name) + "'");
}

void validate_summary(const Summary& summary) {
  std::unordered_set<std::size_t> ids;
  for (const auto& s : summary.selections) {
    if (s.start_index > s.end_index) {
      throw ValidationError("event " + std::to_string(s.event_id) + " has start after end");
    }
    if (s.frame_index < s.start_index || s.frame_index > s.end_index) {
      throw ValidationError("keyframe " + std::to_string(s.frame_index) + " lies outside event " +
                            std::to_string(s.event_id) + " [" + std::to_string(s.start_index) +
                            ", " + std::to_string(s.end_index) + "]");
    }
    if (!ids.insert(s.event_id).second) {
      throw ValidationError("event " + std::to_string(s.event_id) + " has more than one selection");
    }
  }
}

}  // namespace egosum
