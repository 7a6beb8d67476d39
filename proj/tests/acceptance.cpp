// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <fcntl.h>
#include <spawn.h>
#include <unistd.h>
#include <sys/resource.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "egosum/clustering.hpp"
#include "egosum/evaluation.hpp"
#include "egosum/io.hpp"
#include "egosum/keyframes.hpp"
#include "egosum/temporal.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

extern char** environ;

using namespace egosum;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs the CLI and reports exit status, wall time and the child's peak RSS in MiB.
struct ChildRun {
  int code = -1;
  double seconds = 0.0;
  double max_rss_mib = 0.0;
};

ChildRun run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv_s{EGOSUM_CLI_PATH};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  ChildRun out;
  const auto t0 = Clock::now();
  pid_t pid = 0;
  if (posix_spawn(&pid, argv[0], &actions, nullptr, argv.data(), environ) != 0) {
    posix_spawn_file_actions_destroy(&actions);
    return out;
  }
  int status = 0;
  rusage usage{};
  wait4(pid, &status, 0, &usage);
  out.seconds = seconds_since(t0);
  posix_spawn_file_actions_destroy(&actions);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  out.max_rss_mib = static_cast<double>(usage.ru_maxrss) / 1024.0;  // ru_maxrss is KiB on Linux
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EventSegmentation random_segmentation(std::mt19937_64& rng, std::size_t n) {
  EventSegmentation seg;
  std::size_t start = 0;
  while (start < n) {
    const std::size_t len = 1 + rng() % std::min<std::size_t>(n - start, 15);
    seg.events.push_back({seg.events.size(), start, start + len - 1});
    start += len;
  }
  return seg;
}

Outcome clustering_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const std::size_t d = 1 + rng() % 4;
    const auto rows = egosum::testing::random_rows(rng, n, d);
    const auto tree = agglomerate(pairwise_distances(egosum::testing::make_stream(rows)), LinkageMethod::kAverage);
    const auto expected = oracle::brute_force_average(rows);
    if (tree.merges.size() != expected.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const auto& a = tree.merges[k];
      const auto& b = expected[k];
      const double err = std::abs(a.distance - b.distance);
      worst = std::max(worst, err);
      if (a.cluster_a != b.cluster_a || a.cluster_b != b.cluster_b || a.new_size != b.new_size || err > 1e-9) {
        ++mismatches;
        break;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0, std::to_string(mismatches) + " mismatching instances of 100, max |dd| " +
                                             fmt("%.2e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome eigen_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  std::size_t index_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const auto rows = egosum::testing::random_rows(rng, n, 1 + rng() % 8);
    const auto stream = egosum::testing::make_stream(rows);
    const auto p = similarity_matrix(pairwise_distances(stream));
    std::vector<std::vector<double>> dense(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dense[i][j] = p(i, j);
    }
    const auto expected = oracle::dense_stationary(dense, RandomWalkConfig{}.damping);
    const auto got = stationary_distribution(p).distribution;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got[i] - expected[i]));
      if (expected[i] > expected[argmax]) argmax = i;
    }
    if (random_walk_keyframe(stream.slice(0, n - 1)) != argmax) ++index_mismatch;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && index_mismatch == 0 && secs < 5.0,
          "max L-inf " + fmt("%.2e", worst) + ", " + std::to_string(index_mismatch) + " index mismatches, " +
              fmt("%.3f", secs) + " s"};
}

Outcome min_distance_exactness() {
  std::mt19937_64 rng(3003);
  std::size_t mismatches = 0, ties = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<std::vector<double>> rows;
    if (trial % 4 == 0) {
      // Integer lattice points with duplicates produce exact ties.
      std::uniform_int_distribution<int> coord(0, 2);
      for (std::size_t i = 0; i < n; ++i) rows.push_back({double(coord(rng)), double(coord(rng))});
    } else {
      rows = egosum::testing::random_rows(rng, n, 1 + rng() % 16);
    }
    const auto expected = oracle::brute_force_min_distance(rows);
    const auto stream = egosum::testing::make_stream(rows);
    const auto sums = pairwise_distances(stream).row_sums();
    ties += std::count(sums.begin(), sums.end(), sums[expected]) > 1;
    if (min_distance_keyframe(stream.slice(0, n - 1)) != expected) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches of 1000 (" + std::to_string(ties) +
                               " events with tied minima)"};
}

Outcome temporal_invariants() {
  std::mt19937_64 rng(4004);
  std::size_t tiling = 0, duration = 0, idempotence = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 120;
    std::vector<double> offsets(n);
    double t = 0.0;
    for (auto& o : offsets) {
      t += static_cast<double>(rng() % 150);
      o = t;
    }
    const auto stream = egosum::testing::make_scalar_stream(std::vector<double>(n, 0.0), offsets);
    std::vector<std::size_t> labels(n);
    const std::size_t k = 1 + rng() % 6;
    for (auto& l : labels) l = rng() % k;

    const auto once = refine(labels, stream);
    try {
      validate_segmentation(once, n);
    } catch (const ValidationError&) {
      ++tiling;
      continue;
    }
    if (once.size() > 1) {
      for (const auto& e : once.events) {
        if (event_duration_seconds(e, stream) < 180.0) {
          ++duration;
          break;
        }
      }
    }
    const auto twice = refine(labels_from_segmentation(once), stream);
    bool same = twice.size() == once.size();
    for (std::size_t i = 0; same && i < once.size(); ++i) {
      same = twice.events[i].start_index == once.events[i].start_index &&
             twice.events[i].end_index == once.events[i].end_index;
    }
    if (!same || !(fuse(once, stream) == once)) ++idempotence;
  }
  return {tiling + duration + idempotence == 0,
          "500 sequences; tiling failures " + std::to_string(tiling) + ", short events " + std::to_string(duration) +
              ", non-idempotent " + std::to_string(idempotence)};
}

Outcome jaccard_properties() {
  std::mt19937_64 rng(5005);
  std::size_t failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    const auto a = random_segmentation(rng, n);
    const auto b = random_segmentation(rng, n);
    const double s = jaccard(a, b).aggregate;
    if (!(s >= 0.0 && s <= 1.0)) ++failures;
    if (jaccard(a, a).aggregate != 1.0) ++failures;
  }
  const EventSegmentation whole{{{0, 0, 9}}};
  const EventSegmentation halves{{{0, 0, 4}, {1, 5, 9}}};
  const bool half = jaccard(whole, halves).aggregate == 0.5;
  bool one_over_n = true;
  for (std::size_t n = 1; n <= 50; ++n) {
    EventSegmentation one{{{0, 0, n - 1}}};
    EventSegmentation singles;
    for (std::size_t i = 0; i < n; ++i) singles.events.push_back({i, i, i});
    one_over_n = one_over_n && jaccard(one, singles).aggregate == 1.0 / static_cast<double>(n) &&
                 jaccard(singles, one).aggregate == 1.0 / static_cast<double>(n);
  }
  return {failures == 0 && half && one_over_n,
          std::to_string(failures) + " property failures over 500 pairs; 0.5 case " + (half ? "exact" : "wrong") +
              "; 1/N cases " + (one_over_n ? "exact" : "wrong")};
}

Outcome end_to_end_synthetic() {
  constexpr double kCutoff = 5.0;  // intra-event distances ~1.4 sigma, inter-event >= 10 sigma
  double worst = 1.0;
  double sum_without = 0.0, sum_with = 0.0;
  std::size_t unabsorbed = 0, boundary_shifts = 0, single_frame_events = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthConfig config;
    config.num_events = 5;
    config.min_frames_per_event = config.max_frames_per_event = 20;
    config.dimension = 64;
    config.separation = 10.0;
    config.seed = seed;
    const auto clean = synth_generate(config);
    const auto events = refine(segment(clean.stream, LinkageMethod::kAverage, kCutoff), clean.stream);
    worst = std::min(worst, jaccard(events, clean.ground_truth).aggregate);

    config.noise_frames = 3;
    const auto noisy = synth_generate(config);
    const auto labels = segment(noisy.stream, LinkageMethod::kAverage, kCutoff);
    const auto refined = refine(labels, noisy.stream);
    for (const auto& e : refined.events) single_frame_events += e.frame_count() == 1;
    for (std::size_t f : noisy.noise_frame_indices) {
      const auto it = std::find_if(refined.events.begin(), refined.events.end(),
                                   [&](const Event& e) { return e.contains(f); });
      // Absorbed: not an event of its own, and grouped with a neighbour from its true event.
      // A noise frame next to an event's first frame can leave that frame as a one-frame run
      // that fusion hands to the previous event; that shows up as a boundary shift.
      if (it->frame_count() == 1 || (!it->contains(f - 1) && !it->contains(f + 1))) ++unabsorbed;
      if (!it->contains(f - 1) || !it->contains(f + 1)) ++boundary_shifts;
    }
    const auto cmp = compare_division_fusion(noisy.stream, noisy.ground_truth, LinkageMethod::kAverage, kCutoff);
    sum_without += cmp.without_refine;
    sum_with += cmp.with_refine;
  }
  const bool pass = worst >= 0.95 && unabsorbed == 0 && single_frame_events == 0 && sum_with >= sum_without;
  return {pass, "min Jaccard over 20 seeds " + fmt("%.4f", worst) + "; noise frames not absorbed " +
                    std::to_string(unabsorbed) + " (boundary shifts " + std::to_string(boundary_shifts) +
                    "), 1-frame events " + std::to_string(single_frame_events) +
                    "; mean without/with refine " + fmt("%.4f", sum_without / 20) + " / " +
                    fmt("%.4f", sum_with / 20)};
}

Outcome scale_check() {
  egosum::testing::TempDir dir("accept_scale");
  std::ofstream(dir / "synth.json") << R"({"num_events": 45, "frames_per_event": 89, "dimension": 4096, "seed": 7})";
  const auto synth = run_cli({"synth", "--config", (dir / "synth.json").string(), "--out-dir", (dir / "day").string()});
  if (synth.code != 0) return {false, "synth failed with exit code " + std::to_string(synth.code)};
  const auto stream = load_manifest(dir / "day" / "manifest.json");
  if (stream.size() != 4005 || stream.dimension() != 4096) return {false, "unexpected synthetic shape"};

  const auto run = run_cli({"run-all", "--manifest", (dir / "day" / "manifest.json").string(), "--gt",
                            (dir / "day" / "gt.csv").string(), "--cutoff", "5", "--out-dir",
                            (dir / "out").string()});
  const bool pass = run.code == 0 && run.seconds < 120.0 && run.max_rss_mib < 2048.0;
  return {pass, "4005 x 4096 run-all exit " + std::to_string(run.code) + " in " + fmt("%.1f", run.seconds) +
                    " s, peak RSS " + fmt("%.0f", run.max_rss_mib) + " MiB"};
}

Outcome determinism() {
  egosum::testing::TempDir dir("accept_det");
  SynthConfig config;
  config.noise_frames = 2;
  config.seed = 13;
  const auto day = synth_generate(config);
  write_manifest(day.stream, dir / "manifest.json", "features.egof");
  write_segmentation(dir / "gt.csv", day.ground_truth);
  // Some keyframe images exist so both the <img> and the placeholder paths are exercised.
  for (std::size_t i = 0; i < day.stream.size(); i += 2) std::ofstream(dir / day.stream[i].frame_id) << "x";

  for (const char* out : {"a", "b"}) {
    const auto r = run_cli({"run-all", "--manifest", (dir / "manifest.json").string(), "--gt",
                            (dir / "gt.csv").string(), "--method", "random", "--seed", "5", "--out-dir",
                            (dir / out).string()});
    if (r.code != 0) return {false, "run-all failed with exit code " + std::to_string(r.code)};
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++compared;
    if (slurp(entry.path()) != slurp(dir / "b" / entry.path().filename())) ++differing;
  }
  return {compared == 6 && differing == 0,
          std::to_string(compared) + " artifacts compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"clustering oracle equivalence", clustering_oracle},
      {"eigenvector oracle", eigen_oracle},
      {"minimum distance exactness", min_distance_exactness},
      {"temporal invariants", temporal_invariants},
      {"jaccard properties", jaccard_properties},
      {"end-to-end synthetic", end_to_end_synthetic},
      {"scale check", scale_check},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
