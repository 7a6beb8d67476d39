#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "egosum/datamodel.hpp"

namespace egosum {

struct FusionConfig {
  double min_event_duration = 180.0;  // seconds
  // Frame-count threshold that replaces the duration test on streams whose
  // timestamps were synthesized from a fixed interval.
  std::optional<std::size_t> min_event_frames;
};

/// Splits labels into maximal runs; a label that recurs after an interruption becomes a new event.
/// Event ids are the run ordinals 0..m-1.
EventSegmentation divide(std::span<const std::size_t> labels, const Photostream& stream);

/// Repeatedly merges the shortest too-short event (earliest on ties) into the
/// neighbour with the smaller boundary-timestamp gap (previous on ties) until
/// every event is long enough or one event is left. The merged event keeps the
/// earlier event's id.
EventSegmentation fuse(const EventSegmentation& seg, const Photostream& stream,
                       const FusionConfig& config = {});

/// `fuse(divide(labels))`, except that a run absorbed during fusion takes the
/// cluster label of the event that absorbed it, and events left adjacent with
/// the same label are joined.
EventSegmentation refine(std::span<const std::size_t> labels, const Photostream& stream,
                         const FusionConfig& config = {});

}  // namespace egosum
