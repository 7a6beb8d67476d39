#include "egosum/keyframes.hpp"

#include <cmath>

#include "egosum/clustering.hpp"

namespace egosum {

__extension__ using Uint128 = unsigned __int128;

TransitionMatrix similarity_matrix(const DistanceMatrix& dist) {
  const std::size_t n = dist.order();
  if (n == 0) throw ValidationError("similarity matrix of an empty event");
  TransitionMatrix p(n);
  if (n == 1) {
    p(0, 0) = 1.0;
    return p;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) total += dist(i, j);
    }
  }
  double sigma = total / static_cast<double>(n * (n - 1));
  if (sigma == 0.0) sigma = 1.0;

  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p(i, j) = std::exp(-dist(i, j) / sigma);
      row += p(i, j);
    }
    // exp(-a/sigma) underflows only for a > ~745 sigma; fall back to a uniform row.
    if (row == 0.0) {
      for (std::size_t j = 0; j < n; ++j) p(i, j) = i == j ? 0.0 : 1.0;
      row = static_cast<double>(n - 1);
    }
    for (std::size_t j = 0; j < n; ++j) p(i, j) /= row;
  }
  return p;
}

StationaryResult stationary_distribution(const TransitionMatrix& p, const RandomWalkConfig& config) {
  const std::size_t n = p.order();
  if (n == 0) throw ValidationError("stationary distribution of an empty chain");
  if (config.damping < 0.0 || config.damping >= 1.0) {
    throw ValidationError("damping must lie in [0, 1)");
  }
  StationaryResult result;
  result.distribution.assign(n, 1.0 / static_cast<double>(n));
  if (n == 1) return result;

  const double keep = 1.0 - config.damping;
  const double teleport = config.damping / static_cast<double>(n);
  std::vector<double> next(n);
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double mass = result.distribution[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += mass * p(i, j);
    }
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = keep * next[j] + teleport;
      residual += std::abs(next[j] - result.distribution[j]);
    }
    result.distribution.swap(next);
    result.iterations = it;
    result.residual = residual;
    if (residual < config.tolerance) return result;
  }
  throw ConvergenceError("random walk did not converge after " +
                             std::to_string(config.max_iterations) +
                             " iterations (residual " + std::to_string(result.residual) + ")",
                         result.residual);
}

std::size_t random_walk_keyframe(std::span<const FrameDescriptor> event, const RandomWalkConfig& config) {
  if (event.empty()) throw ValidationError("empty event");
  if (event.size() == 1) return event.front().frame_index;
  const auto pi = stationary_distribution(similarity_matrix(pairwise_distances(event, 1)), config);
  std::size_t best = 0;
  for (std::size_t i = 1; i < event.size(); ++i) {
    if (pi.distribution[i] > pi.distribution[best]) best = i;
  }
  return event[best].frame_index;
}

std::size_t min_distance_keyframe(std::span<const FrameDescriptor> event) {
  if (event.empty()) throw ValidationError("empty event");
  const auto v = pairwise_distances(event, 1).row_sums();
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return event[best].frame_index;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t seeded_index(std::uint64_t seed, std::uint64_t event_id, std::size_t n) noexcept {
  const std::uint64_t draw = splitmix64(seed ^ splitmix64(event_id));
  return static_cast<std::size_t>((static_cast<Uint128>(draw) * n) >> 64);
}

std::size_t random_keyframe(std::span<const FrameDescriptor> event, std::uint64_t seed,
                            std::uint64_t event_id) {
  if (event.empty()) throw ValidationError("empty event");
  return event[seeded_index(seed, event_id, event.size())].frame_index;
}

Summary uniform_summary(const Photostream& stream, std::size_t k, const SummaryParameters& params) {
  const std::size_t n = stream.size();
  if (k < 1 || k > n) {
    throw ValidationError("uniform sample count " + std::to_string(k) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  std::vector<std::size_t> centers(k);
  for (std::size_t i = 0; i < k; ++i) centers[i] = (2 * i + 1) * n / (2 * k);

  Summary s;
  s.day_id = stream.day_id();
  s.method = SelectionMethod::kUniform;
  s.parameters = params;
  // Bin boundaries sit halfway between consecutive centres so each bin holds its centre.
  std::size_t start = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t end = i + 1 < k ? (centers[i] + centers[i + 1]) / 2 : n - 1;
    s.selections.push_back({i, start, end, centers[i], stream[centers[i]].frame_id});
    start = end + 1;
  }
  return s;
}

Summary summarize(const Photostream& stream, const EventSegmentation& seg,
                  const SummarizeOptions& options) {
  validate_segmentation(seg, stream.size());
  if (options.method == SelectionMethod::kUniform) {
    return uniform_summary(stream, seg.size(), options.parameters);
  }
  Summary s;
  s.day_id = stream.day_id();
  s.method = options.method;
  s.parameters = options.parameters;
  s.selections.reserve(seg.size());
  for (const auto& e : seg.events) {
    const auto frames = stream.slice(e.start_index, e.end_index);
    std::size_t key = e.start_index;
    switch (options.method) {
      case SelectionMethod::kRandomWalk: key = random_walk_keyframe(frames, options.random_walk); break;
      case SelectionMethod::kMinDistance: key = min_distance_keyframe(frames); break;
      case SelectionMethod::kRandom: key = random_keyframe(frames, options.parameters.seed, e.event_id); break;
      case SelectionMethod::kUniform: break;
    }
    s.selections.push_back({e.event_id, e.start_index, e.end_index, key, stream[key].frame_id});
  }
  return s;
}

}  // namespace egosum
