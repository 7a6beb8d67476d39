#include "egosum/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace egosum {

__extension__ using Uint128 = unsigned __int128;

namespace {

// Mean of `values` with the sum carried as an unevaluated hi + lo pair and a
// corrected final division, so e.g. n copies of 1/n average to exactly 1/n.
double accurate_mean(const std::vector<double>& values) {
  double hi = 0.0, lo = 0.0;
  for (double x : values) {
    const double t = hi + x;
    const double b = t - hi;
    lo += (hi - (t - b)) + (x - b);
    hi = t;
  }
  const double m = static_cast<double>(values.size());
  const double q = hi / m;
  const double r = std::fma(-q, m, hi) + lo;
  return q + r / m;
}

}  // namespace

JaccardReport jaccard(const EventSegmentation& predicted, const EventSegmentation& ground_truth) {
  const std::size_t n = predicted.frame_count();
  if (n != ground_truth.frame_count()) {
    throw ValidationError("segmentations cover " + std::to_string(n) + " and " +
                          std::to_string(ground_truth.frame_count()) + " frames");
  }
  validate_segmentation(predicted, n);
  validate_segmentation(ground_truth, n);

  JaccardReport report;
  report.detected_count = predicted.size();
  report.ground_truth_count = ground_truth.size();
  report.matches.reserve(predicted.size());

  const auto& gt = ground_truth.events;
  std::size_t first_gt = 0;
  std::vector<double> ratios;
  ratios.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const Event& e = predicted.events[i];
    while (gt[first_gt].end_index < e.start_index) ++first_gt;
    EventMatch best{i, first_gt, 0, 0, 0.0};
    for (std::size_t j = first_gt; j < gt.size() && gt[j].start_index <= e.end_index; ++j) {
      const std::size_t lo = std::max(e.start_index, gt[j].start_index);
      const std::size_t hi = std::min(e.end_index, gt[j].end_index);
      const std::size_t inter = hi - lo + 1;
      if (inter > best.intersection) {
        best.ground_truth = j;
        best.intersection = inter;
      }
    }
    best.union_size = e.frame_count() + gt[best.ground_truth].frame_count() - best.intersection;
    best.ratio = static_cast<double>(best.intersection) / static_cast<double>(best.union_size);
    ratios.push_back(best.ratio);
    report.matches.push_back(best);
  }
  report.aggregate = accurate_mean(ratios);
  return report;
}

nlohmann::ordered_json to_json(const JaccardReport& report, const EventSegmentation& predicted,
                               const EventSegmentation& ground_truth) {
  nlohmann::ordered_json doc;
  doc["spec_version"] = std::string(kFormatVersion);
  doc["aggregate"] = report.aggregate;
  doc["detected_events"] = report.detected_count;
  doc["ground_truth_events"] = report.ground_truth_count;
  auto matches = nlohmann::ordered_json::array();
  for (const auto& m : report.matches) {
    matches.push_back({{"event_id", predicted.events[m.event].event_id},
                       {"ground_truth_id", ground_truth.events[m.ground_truth].event_id},
                       {"intersection", m.intersection},
                       {"union", m.union_size},
                       {"ratio", m.ratio}});
  }
  doc["matches"] = std::move(matches);
  return doc;
}

SynthConfig synth_config_from_json(const nlohmann::json& doc) {
  SynthConfig c;
  try {
    c.num_events = doc.value("num_events", c.num_events);
    if (doc.contains("frames_per_event")) {
      const auto& f = doc["frames_per_event"];
      if (f.is_array()) {
        c.min_frames_per_event = f.at(0).get<std::size_t>();
        c.max_frames_per_event = f.at(1).get<std::size_t>();
      } else {
        c.min_frames_per_event = c.max_frames_per_event = f.get<std::size_t>();
      }
    }
    c.dimension = doc.value("dimension", c.dimension);
    c.separation = doc.value("separation", c.separation);
    c.noise_sigma = doc.value("noise_sigma", c.noise_sigma);
    c.frame_interval_seconds = doc.value("frame_interval_seconds", c.frame_interval_seconds);
    c.seed = doc.value("seed", c.seed);
    c.noise_frames = doc.value("noise_frames", c.noise_frames);
    c.day_id = doc.value("day_id", c.day_id);
    c.start_time = doc.value("start_time", c.start_time);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid synth config: ") + e.what());
  }
  return c;
}

namespace {

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  // 53-bit uniform in (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<Uint128>(engine_()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

constexpr std::size_t kCenterRetries = 1000;

}  // namespace

SynthDay synth_generate(const SynthConfig& config) {
  if (config.num_events < 1) throw ValidationError("num_events must be at least 1");
  if (config.min_frames_per_event < 1 || config.max_frames_per_event < config.min_frames_per_event) {
    throw ValidationError("invalid frames_per_event range");
  }
  if (config.dimension < 1) throw ValidationError("dimension must be positive");
  if (config.separation < 0.0) throw ValidationError("separation must be non-negative");
  if (!(config.noise_sigma > 0.0)) throw ValidationError("noise_sigma must be positive");
  if (!(config.frame_interval_seconds > 0.0)) throw ValidationError("frame interval must be positive");

  NormalSource rng(config.seed);
  const double dim = static_cast<double>(config.dimension);
  const double min_gap = config.separation * config.noise_sigma;
  // Typical centre distance is about twice the required separation.
  const double center_scale = min_gap * std::sqrt(2.0 / dim);
  const double noise_scale = config.noise_sigma / std::sqrt(dim);

  std::vector<std::vector<double>> centers;
  for (std::size_t k = 0; k < config.num_events; ++k) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kCenterRetries && !placed; ++attempt) {
      std::vector<double> c(config.dimension);
      for (double& x : c) x = center_scale * rng.normal();
      placed = std::all_of(centers.begin(), centers.end(),
                           [&](const auto& other) { return euclidean(c, other) >= min_gap; });
      if (placed) centers.push_back(std::move(c));
    }
    if (!placed) {
      throw ValidationError("cannot place " + std::to_string(config.num_events) +
                            " centres with separation " + std::to_string(config.separation) +
                            " in dimension " + std::to_string(config.dimension));
    }
  }

  auto sample_around = [&](const std::vector<double>& center) {
    std::vector<double> f(config.dimension);
    for (std::size_t d = 0; d < f.size(); ++d) {
      f[d] = static_cast<double>(static_cast<float>(center[d] + noise_scale * rng.normal()));
    }
    return f;
  };

  const Timestamp start = parse_iso8601(config.start_time);
  EventSegmentation ground_truth;
  std::vector<std::size_t> noise_indices;
  std::vector<FrameDescriptor> frames;
  std::vector<std::size_t> event_of_frame;
  const std::size_t span = config.max_frames_per_event - config.min_frames_per_event + 1;
  for (std::size_t k = 0; k < config.num_events; ++k) {
    const std::size_t count = config.min_frames_per_event + rng.below(span);
    ground_truth.events.push_back({k, frames.size(), frames.size() + count - 1});
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t index = frames.size();
      const auto offset = std::chrono::duration<double>(config.frame_interval_seconds * static_cast<double>(index));
      char id[32];
      std::snprintf(id, sizeof id, "frame_%06zu.jpg", index);
      frames.push_back({index, id, start + std::chrono::round<std::chrono::milliseconds>(offset),
                        sample_around(centers[k])});
      event_of_frame.push_back(k);
    }
  }

  if (config.noise_frames > 0) {
    if (config.num_events < 2) throw ValidationError("noise frames need at least two events");
    std::vector<std::size_t> interior;
    for (const auto& e : ground_truth.events) {
      for (std::size_t i = e.start_index + 1; i < e.end_index; ++i) interior.push_back(i);
    }
    if (interior.size() < config.noise_frames) {
      throw ValidationError("not enough interior frames for " + std::to_string(config.noise_frames) +
                            " noise frames");
    }
    for (std::size_t r = 0; r < config.noise_frames; ++r) {
      const std::size_t pick = r + rng.below(interior.size() - r);
      std::swap(interior[r], interior[pick]);
      const std::size_t frame = interior[r];
      std::size_t other = rng.below(config.num_events - 1);
      if (other >= event_of_frame[frame]) ++other;
      frames[frame].features = sample_around(centers[other]);
      noise_indices.push_back(frame);
    }
    std::sort(noise_indices.begin(), noise_indices.end());
  }

  return SynthDay{Photostream::create(config.day_id, std::move(frames)), std::move(ground_truth),
                  std::move(noise_indices)};
}

std::vector<SweepRow> sweep_cutoff(const Photostream& stream, const EventSegmentation& ground_truth,
                                   LinkageMethod linkage, std::span<const double> cutoffs,
                                   const FusionConfig& fusion) {
  const Dendrogram tree = agglomerate(pairwise_distances(stream), linkage);
  std::vector<SweepRow> rows;
  rows.reserve(cutoffs.size());
  for (double c : cutoffs) {
    const auto seg = refine(cut(tree, c), stream, fusion);
    rows.push_back({c, jaccard(seg, ground_truth).aggregate, seg.size()});
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out.precision(17);
  out << "cutoff,jaccard,events\n";
  for (const auto& r : rows) out << r.cutoff << ',' << r.aggregate << ',' << r.events << '\n';
  return out.str();
}

std::vector<double> parse_cutoff_list(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("invalid cutoff '" + s + "' in '" + text + "'");
    return v;
  };

  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("cutoff range must be start:step:stop");
    const double start = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw ValidationError("invalid cutoff range '" + text + "'");
    // Index-based so the endpoint is not lost to accumulated rounding.
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
  }
  for (double c : out) {
    if (!(c > 0.0)) throw ValidationError("cutoffs must be positive");
  }
  if (out.empty()) throw ValidationError("empty cutoff list");
  return out;
}

DivisionFusionComparison compare_division_fusion(const Photostream& stream,
                                                 const EventSegmentation& ground_truth,
                                                 LinkageMethod linkage, double cutoff,
                                                 const FusionConfig& fusion) {
  const auto labels = segment(stream, linkage, cutoff);
  const auto divided = divide(labels, stream);
  const auto refined = refine(labels, stream, fusion);
  return {jaccard(divided, ground_truth).aggregate, jaccard(refined, ground_truth).aggregate};
}

}  // namespace egosum
