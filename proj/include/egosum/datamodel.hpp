#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace egosum {

/// Version string written into every JSON artifact and printed by `--version`.
inline constexpr std::string_view kFormatVersion = "1.0";

/// Input that violates a documented format or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure: missing file, unreadable or unwritable path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// UTC wall-clock time at millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]`. A missing zone means UTC.
Timestamp parse_iso8601(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`, adding `.mmm` only when milliseconds are non-zero.
std::string format_iso8601(Timestamp t);

/// Signed difference `later - earlier` in seconds.
double seconds_between(Timestamp earlier, Timestamp later);

struct FrameDescriptor {
  std::size_t frame_index = 0;
  std::string frame_id;
  Timestamp timestamp{};
  std::vector<double> features;

  bool operator==(const FrameDescriptor&) const = default;
};

/// One day of frames in capture order.
///
/// Construct through `Photostream::create`, which enforces the invariants:
/// non-empty, shared dimension, finite features, `frame_index` equal to
/// position, and non-decreasing timestamps.
class Photostream {
 public:
  static Photostream create(std::string day_id, std::vector<FrameDescriptor> frames,
                            bool synthetic_timestamps = false);

  const std::string& day_id() const noexcept { return day_id_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const std::vector<FrameDescriptor>& frames() const noexcept { return frames_; }
  const FrameDescriptor& operator[](std::size_t i) const { return frames_.at(i); }

  /// True when timestamps were synthesized from a fixed frame interval.
  bool synthetic_timestamps() const noexcept { return synthetic_timestamps_; }

  std::span<const FrameDescriptor> slice(std::size_t first, std::size_t last_inclusive) const;

  bool operator==(const Photostream&) const = default;

 private:
  Photostream() = default;

  std::string day_id_;
  std::size_t dimension_ = 0;
  std::vector<FrameDescriptor> frames_;
  bool synthetic_timestamps_ = false;
};

struct Event {
  std::size_t event_id = 0;
  std::size_t start_index = 0;
  std::size_t end_index = 0;  // inclusive

  std::size_t frame_count() const noexcept { return end_index - start_index + 1; }
  bool contains(std::size_t frame) const noexcept {
    return frame >= start_index && frame <= end_index;
  }
  bool operator==(const Event&) const = default;
};

/// Partition of `[0, N-1]` into contiguous events, in temporal order.
struct EventSegmentation {
  std::vector<Event> events;

  std::size_t size() const noexcept { return events.size(); }
  std::size_t frame_count() const noexcept {
    return events.empty() ? 0 : events.back().end_index + 1;
  }
  bool operator==(const EventSegmentation&) const = default;
};

/// Throws ValidationError unless `seg` tiles `[0, frame_count-1]` with unique event ids.
void validate_segmentation(const EventSegmentation& seg, std::size_t frame_count);

/// Last timestamp minus first timestamp of the event, in seconds.
double event_duration_seconds(const Event& event, const Photostream& stream);

/// Builds events from maximal runs of equal labels. Runs of a label that was
/// already used earlier get fresh ids above the largest label.
EventSegmentation segmentation_from_labels(std::span<const std::size_t> labels);

/// Per-frame event id, the inverse of `segmentation_from_labels` on valid input.
std::vector<std::size_t> labels_from_segmentation(const EventSegmentation& seg);

/// Dense symmetric matrix of pairwise frame distances, row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t order) : order_(order), entries_(order * order, 0.0) {}

  std::size_t order() const noexcept { return order_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * order_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * order_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * order_, order_};
  }

  /// Accumulated distance of each row, `v_i = sum_j a_ij`, summed in ascending `j`.
  std::vector<double> row_sums() const;

  /// Throws ValidationError unless symmetric, zero-diagonal, finite and non-negative.
  void validate() const;

 private:
  std::size_t order_ = 0;
  std::vector<double> entries_;
};

enum class SelectionMethod { kRandomWalk, kMinDistance, kRandom, kUniform };

std::string_view to_string(SelectionMethod m);
SelectionMethod parse_selection_method(std::string_view name);

struct SummaryParameters {
  std::string linkage = "average";
  double cutoff = 1.154;
  double min_event_duration = 180.0;
  std::uint64_t seed = 0;

  bool operator==(const SummaryParameters&) const = default;
};

/// One keyframe together with the bounds of the event it represents.
struct Selection {
  std::size_t event_id = 0;
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  std::size_t frame_index = 0;
  std::string frame_id;

  bool operator==(const Selection&) const = default;
};

struct Summary {
  std::string day_id;
  SelectionMethod method = SelectionMethod::kRandomWalk;
  SummaryParameters parameters;
  std::vector<Selection> selections;

  bool operator==(const Summary&) const = default;
};

/// Throws ValidationError if any keyframe lies outside its event or events repeat.
void validate_summary(const Summary& summary);

}  // namespace egosum
