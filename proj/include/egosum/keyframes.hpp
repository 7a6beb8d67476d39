#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "egosum/datamodel.hpp"

namespace egosum {

/// Row-stochastic matrix of a random walk over the frames of one event.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(std::size_t order) : order_(order), p_(order * order, 0.0) {}

  std::size_t order() const noexcept { return order_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return p_[i * order_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return p_[i * order_ + j]; }

 private:
  std::size_t order_ = 0;
  std::vector<double> p_;
};

/// w_ij = exp(-a_ij / sigma) off the diagonal, sigma = mean off-diagonal distance
/// (1 when every distance is zero), w_ii = 0; rows normalized to sum to one.
/// A single frame gives [[1]].
TransitionMatrix similarity_matrix(const DistanceMatrix& dist);

struct RandomWalkConfig {
  double damping = 0.01;  // weight of the uniform teleport in each step
  double tolerance = 1e-12;  // L1 change between iterates
  std::size_t max_iterations = 10000;
};

struct StationaryResult {
  std::vector<double> distribution;
  std::size_t iterations = 0;
  double residual = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Power iteration from the uniform vector on pi <- (1 - damping) pi P + damping / n.
/// Throws ConvergenceError with the final residual if `max_iterations` is reached.
StationaryResult stationary_distribution(const TransitionMatrix& p, const RandomWalkConfig& config = {});

/// Frame with the largest stationary probability; ties go to the lowest frame_index.
std::size_t random_walk_keyframe(std::span<const FrameDescriptor> event,
                                 const RandomWalkConfig& config = {});

/// Frame with the smallest accumulated distance to the rest of the event; ties go to the lowest frame_index.
std::size_t min_distance_keyframe(std::span<const FrameDescriptor> event);

/// SplitMix64 output function (Steele, Lea and Flood): add the golden-ratio
/// increment 0x9E3779B97F4A7C15, then xor-shift-multiply by 0xBF58476D1CE4E5B9
/// (shift 30) and 0x94D049BB133111EB (shift 27), final xor-shift 31.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Uniform draw in [0, n): draw = splitmix64(seed ^ splitmix64(event_id)),
/// index = floor(draw * n / 2^64) (128-bit multiply-high).
std::size_t seeded_index(std::uint64_t seed, std::uint64_t event_id, std::size_t n) noexcept;

std::size_t random_keyframe(std::span<const FrameDescriptor> event, std::uint64_t seed,
                            std::uint64_t event_id);

/// k frames at the centres of k equal bins over frame ordinals: floor((i + 0.5) N / k).
Summary uniform_summary(const Photostream& stream, std::size_t k, const SummaryParameters& params = {});

struct SummarizeOptions {
  SelectionMethod method = SelectionMethod::kRandomWalk;
  SummaryParameters parameters;
  RandomWalkConfig random_walk;
};

/// One keyframe per event with the chosen selector. The uniform method ignores
/// event boundaries and samples |seg| bins over the whole day.
Summary summarize(const Photostream& stream, const EventSegmentation& seg,
                  const SummarizeOptions& options);

}  // namespace egosum
