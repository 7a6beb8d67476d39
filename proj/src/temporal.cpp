#include "egosum/temporal.hpp"

namespace egosum {

EventSegmentation divide(std::span<const std::size_t> labels, const Photostream& stream) {
  if (labels.size() != stream.size()) {
    throw ValidationError("got " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(stream.size()) + " frames");
  }
  EventSegmentation seg;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i == labels.size() || labels[i] != labels[start]) {
      seg.events.push_back({seg.events.size(), start, i - 1});
      start = i;
    }
  }
  return seg;
}

namespace {

bool too_short(const Event& e, const Photostream& stream, const FusionConfig& config) {
  if (stream.synthetic_timestamps() && config.min_event_frames) {
    return e.frame_count() < *config.min_event_frames;
  }
  return event_duration_seconds(e, stream) < config.min_event_duration;
}

// Comparable shortness: frame count in frame mode, seconds otherwise.
double length_of(const Event& e, const Photostream& stream, const FusionConfig& config) {
  if (stream.synthetic_timestamps() && config.min_event_frames) {
    return static_cast<double>(e.frame_count());
  }
  return event_duration_seconds(e, stream);
}

// Shared fusion loop. With `run_labels` (one cluster label per event) the merged
// event takes the absorbing neighbour's label, and neighbours left adjacent with
// the same label are joined, so an interruption that fusion removes no longer
// splits its cluster.
std::vector<Event> fuse_events(std::vector<Event> events, std::vector<std::size_t>* run_labels,
                               const Photostream& stream, const FusionConfig& config) {
  if (!(config.min_event_duration > 0.0)) throw ValidationError("min_event_duration must be positive");
  if (config.min_event_frames && *config.min_event_frames == 0) {
    throw ValidationError("min_event_frames must be positive");
  }

  auto join = [&](std::size_t first) {
    events[first].end_index = events[first + 1].end_index;
    events.erase(events.begin() + static_cast<std::ptrdiff_t>(first + 1));
    if (run_labels) run_labels->erase(run_labels->begin() + static_cast<std::ptrdiff_t>(first + 1));
  };

  while (events.size() > 1) {
    std::size_t shortest = events.size();
    double shortest_len = 0.0;
    for (std::size_t k = 0; k < events.size(); ++k) {
      if (!too_short(events[k], stream, config)) continue;
      const double len = length_of(events[k], stream, config);
      if (shortest == events.size() || len < shortest_len) {
        shortest = k;
        shortest_len = len;
      }
    }
    if (shortest == events.size()) break;

    const Event& s = events[shortest];
    bool into_previous;
    if (shortest == 0) {
      into_previous = false;
    } else if (shortest + 1 == events.size()) {
      into_previous = true;
    } else {
      const double prev_gap = seconds_between(stream[events[shortest - 1].end_index].timestamp,
                                              stream[s.start_index].timestamp);
      const double next_gap = seconds_between(stream[s.end_index].timestamp,
                                              stream[events[shortest + 1].start_index].timestamp);
      into_previous = prev_gap <= next_gap;
    }

    std::size_t merged = into_previous ? shortest - 1 : shortest;
    if (run_labels) (*run_labels)[merged] = (*run_labels)[into_previous ? shortest - 1 : shortest + 1];
    join(merged);
    if (run_labels) {
      if (merged + 1 < events.size() && (*run_labels)[merged + 1] == (*run_labels)[merged]) join(merged);
      if (merged > 0 && (*run_labels)[merged - 1] == (*run_labels)[merged]) join(merged - 1);
    }
  }
  return events;
}

}  // namespace

EventSegmentation fuse(const EventSegmentation& seg, const Photostream& stream,
                       const FusionConfig& config) {
  validate_segmentation(seg, stream.size());
  return EventSegmentation{fuse_events(seg.events, nullptr, stream, config)};
}

EventSegmentation refine(std::span<const std::size_t> labels, const Photostream& stream,
                         const FusionConfig& config) {
  auto divided = divide(labels, stream);
  std::vector<std::size_t> run_labels;
  run_labels.reserve(divided.size());
  for (const auto& e : divided.events) run_labels.push_back(labels[e.start_index]);
  return EventSegmentation{fuse_events(std::move(divided.events), &run_labels, stream, config)};
}

}  // namespace egosum
