#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "egosum/datamodel.hpp"

namespace egosum {

enum class LinkageMethod { kSingle, kComplete, kAverage, kWard };

std::string_view to_string(LinkageMethod m);
LinkageMethod parse_linkage(std::string_view name);

inline constexpr double kDefaultCutoff = 1.154;

/// One agglomeration step. `cluster_a < cluster_b`; the new cluster gets id N + step.
struct Merge {
  std::size_t cluster_a = 0;
  std::size_t cluster_b = 0;
  double distance = 0.0;
  std::size_t new_size = 0;

  bool operator==(const Merge&) const = default;
};

/// Merge history of N leaves. Leaves are ids 0..N-1, merge k creates id N+k.
struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;
};

/// Euclidean distances between frame features. Each entry is an ascending-index
/// sum of squared differences in double precision, so results do not depend on
/// the number of worker threads.
DistanceMatrix pairwise_distances(const Photostream& stream, unsigned threads = 0);
DistanceMatrix pairwise_distances(std::span<const FrameDescriptor> frames, unsigned threads = 1);

/// Greedy agglomeration: at every step merge the pair with the smallest linkage
/// distance. Equal distances go to the lexicographically smallest (min id, max id).
/// Linkage distances are maintained with the Lance-Williams recurrence.
Dendrogram agglomerate(const DistanceMatrix& dist, LinkageMethod linkage = LinkageMethod::kAverage);

/// Applies every merge with distance strictly below `cutoff`. Labels are 0..K-1,
/// numbered by each cluster's first frame.
std::vector<std::size_t> cut(const Dendrogram& dendrogram, double cutoff);

std::vector<std::size_t> segment(const Photostream& stream,
                                 LinkageMethod linkage = LinkageMethod::kAverage,
                                 double cutoff = kDefaultCutoff);

}  // namespace egosum
